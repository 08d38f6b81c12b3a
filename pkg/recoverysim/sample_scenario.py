""" Sample scenario file.

    Also documents the scenario fields.  A scenario file holds two
    sections, SCENARIO and EXPECT; JSON files use the same names as
    top-level keys.

    Run it with:  recoverysim run --config recoverysim/sample_scenario.py
"""

# SCENARIO
#
#   n: number of validators (v0 .. v{n-1}).
#   delta: the network delay bound, in rounds.
#   horizon: the last simulated round R.
#   gadget: 'freezing' (no recovery) or 'recovery'.
#   protocol:
#       kind: 'simple_sync' or 'scripted_oracle'.
#       latency: u_PI.  (Default: 8*delta*(n+2) for simple_sync,
#           4*delta for scripted_oracle)
#       forged_votes: scripted_oracle only, a list of
#           {'round', 'signers', 'ledger'} at or after r_maj.
#   validator_wait: rounds a validator waits before bookmarking.
#       (Default: delta)
#   client_wait: rounds a client waits before confirming.
#       (Default: delta for freezing, 3*delta for recovery)
#   client_gossip: clients relay what they receive. (Default: True)
#   corruption:
#       corrupt: list of {'validator', 'round'}.
#       r_maj: first round the adversary may hold a majority, or None.
#       r_rec: the recovery round, or None.
#       kill: validators removed at r_rec.
#   clients: a count, or a list of {'wake', 'sleep'} windows.
#   transactions: a list of {'id', 'round', 'recipients'}, or
#       {'count', 'start', 'every', 'prefix'}.
#   adversary:
#       strategy: none, validator_lag, double_spend_equivocator,
#           eve_confuser or bookmark_liar.
#       params: strategy parameters.
#   seed: seeds the adversary's random choices.
#
SCENARIO = {
    'name': 'sample',
    'description': 'an eve_confuser attack healed at round 30',
    'n': 7,
    'delta': 2,
    'horizon': 80,
    'gadget': 'recovery',
    'protocol': {'kind': 'scripted_oracle'},
    'corruption': {
        'corrupt': [{'validator': index, 'round': 20}
                    for index in range(4)],
        'r_maj': 20,
        'r_rec': 30,
        'kill': [0, 1, 2],
    },
    'clients': [
        {'wake': 0},
        {'wake': 0},
        {'wake': 10, 'sleep': 70},
    ],
    'transactions': {'count': 24, 'start': 1, 'every': 3},
    'adversary': {'strategy': 'eve_confuser', 'params': {'fork_depth': 1}},
    'seed': 7,
}

# EXPECT
#
#   outcome: 'pass' (every checker passes) or 'fail'.
#   failing: with 'fail', the checkers that must fail.
#
EXPECT = {'outcome': 'pass'}
