""" Verdicts over a persisted trace.

    Every checker is a pure function of a Trace: it rebuilds the
    scenario from the header event and reads nothing else, so checking
    a trace loaded from disk gives the same verdicts as checking it
    right after the run.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import collections
from dataclasses import dataclass, field

from recoverysim.base import RecoverysimHarnessError
from recoverysim.core.ledger import EMPTY_LEDGER, Ledger, common_prefix, \
    consistent, is_prefix
from recoverysim.core.party import PartyId
from recoverysim.harness.scenario import ScenarioConfig


@dataclass
class Verdict:
    """ The outcome of one checker.

        Attributes:
            checker: the checker name.
            passed: True when no violation was found.
            evidence: the first violation found (event indices, ledgers,
                rounds), or summary figures for a pass.
            details: one line for humans.
            applicable: False when the scenario gives the checked
                statement nothing to range over (the verdict passes).
    """
    checker: str
    passed: bool
    evidence: dict = field(default_factory=dict)
    details: str = ''
    applicable: bool = True

    def to_dict(self):
        return {'checker': self.checker, 'passed': self.passed,
                'applicable': self.applicable, 'details': self.details,
                'evidence': self.evidence}


class TraceFacts:
    """ The scenario of a trace plus lookups shared by the checkers. """

    def __init__(self, trace):
        header = trace.header
        self.trace = trace
        self.events = trace.events
        self.config = ScenarioConfig.from_dict(header['config'])
        self.constants = header['constants']
        self.corruption = self.config.corruption
        self.clients = self.config.client_schedule
        self.horizon = self.config.horizon
        self.r_rec = self.corruption.r_rec
        self._parties = {}

    def party(self, text):
        if text not in self._parties:
            self._parties[text] = PartyId.parse(text)
        return self._parties[text]

    def honest(self, text, round_index):
        """ True iff the party is not a corrupted validator at round. """
        party = self.party(text)
        return party.is_client or \
            not self.corruption.is_corrupted(party.index, round_index)

    def present(self, text, round_index):
        """ Alive validator, or awake client, at round_index. """
        party = self.party(text)
        if party.is_client:
            return self.clients.awake(party, round_index)
        return self.corruption.is_alive(party.index, round_index)

    def validators(self):
        return [f"v{index}" for index in range(self.config.n)]

    def client_names(self):
        return [str(party) for party in self.clients.clients()]

    def of_kind(self, *kinds):
        return self.trace.of_kind(*kinds)

    def ledgers(self, kind, party_kind):
        """ Yields (index, event, Ledger) for kind events of validators
            ('v') or clients ('c').
        """
        for index, event in self.of_kind(kind):
            if event['party'] and event['party'][0] == party_kind:
                yield index, event, Ledger.from_list(event['data']['ledger'])

    def epoch_size(self, instance_tag):
        """ Size of the validator set of the instance with this tag. """
        if instance_tag.startswith('i0:'):
            return self.config.n
        return self.config.n_new

    def instance_members(self, instance_tag):
        if instance_tag.startswith('i0:'):
            return range(self.config.n)
        return [party.index for party in self.corruption.v_new()]


def _inapplicable(name, reason):
    return Verdict(name, True, details=f"inapplicable: {reason}",
                   applicable=False)


# ----------------------------------------------------------------------


def check_safety(trace):
    """ Any two confirmed ledgers, of any clients at any rounds, are
        consistent.
    """
    facts = TraceFacts(trace)
    confirms = sorted(facts.ledgers('confirm', 'c'),
                      key=lambda item: (len(item[2]), item[0]))
    for (i_a, e_a, a), (i_b, e_b, b) in zip(confirms, confirms[1:]):
        if not is_prefix(a, b):
            return Verdict('safety', False, {
                'events': [i_a, i_b],
                'parties': [e_a['party'], e_b['party']],
                'rounds': [e_a['round'], e_b['round']],
                'ledgers': [a.to_list(), b.to_list()],
            }, f"{e_a['party']} confirmed {a} at r={e_a['round']} and "
               f"{e_b['party']} confirmed {b} at r={e_b['round']}")
    return Verdict('safety', True, {'confirms': len(confirms)},
                   f"{len(confirms)} confirmations, all consistent")


def _eligible_rounds(facts):
    """ tx id -> first round t at which every validator alive and
        honest at t has received the transaction.
    """
    received = collections.defaultdict(dict)
    for _, event in facts.of_kind('tx_input'):
        received[event['data']['tx']].setdefault(event['party'],
                                                 event['round'])

    eligible = {}
    for tx_id, receipts in received.items():
        for round_index in range(min(receipts.values()), facts.horizon + 1):
            required = [name for name in facts.validators()
                        if facts.present(name, round_index) and
                        facts.honest(name, round_index)]
            if all(receipts.get(name, facts.horizon + 1) <= round_index
                   for name in required):
                eligible[tx_id] = round_index
                break
    return eligible


def check_liveness(trace, u=None, windows=None):
    """ A transaction received by every honest validator at round e is
        in the confirmed ledger of every honest client awake since
        before e by round e + u + 1, for rounds inside the liveness
        windows.

        Args:
            trace: the Trace.
            u: the latency bound (default: the header's u).
            windows: list of closed (lo, hi) round intervals (default:
                the header's liveness windows).
    """
    # pylint: disable=too-many-locals
    facts = TraceFacts(trace)
    u = facts.constants['u'] if u is None else u
    windows = [tuple(w) for w in (facts.constants['liveness_windows']
                                  if windows is None else windows)]
    eligible = _eligible_rounds(facts)

    first_confirm = {}
    for index, event, ledger in facts.ledgers('confirm', 'c'):
        for tx_id in ledger:
            first_confirm.setdefault((event['party'], tx_id),
                                     (event['round'], index))

    checked = 0
    worst = 0
    for name in facts.client_names():
        window = facts.clients.window(facts.party(name))
        sleep = facts.horizon + 1 if window.sleep_round is None \
            else window.sleep_round
        for tx_id, e_round in sorted(eligible.items()):
            confirmed = first_confirm.get((name, tx_id))
            if confirmed is not None:
                worst = max(worst, confirmed[0] - e_round)
            for w_lo, w_hi in windows:
                lo = max(w_lo, e_round + u + 1, window.wake_round + u + 1)
                hi = min(w_hi, sleep - 1, facts.horizon)
                if lo > hi:
                    continue
                checked += 1
                if confirmed is None or confirmed[0] > lo:
                    return Verdict('liveness', False, {
                        'client': name, 'tx': tx_id,
                        'eligible_round': e_round, 'deadline': lo,
                        'confirm_round': None if confirmed is None
                        else confirmed[0],
                        'event': None if confirmed is None
                        else confirmed[1],
                        'bound': u, 'windows': [list(w) for w in windows],
                    }, f"{name} lacks {tx_id} at r={lo} (received by "
                       f"honest validators at r={e_round}, bound {u})")
    return Verdict('liveness', True, {
        'checked': checked, 'bound': u, 'observed_max_latency': worst,
        'windows': [list(w) for w in windows],
    }, f"{checked} obligations met, bound {u}, worst latency {worst}")


def _state_timeline(facts, kind, party_kind):
    """ party -> list of (round, Ledger) state changes, in trace order. """
    timeline = collections.defaultdict(list)
    for _, event, ledger in facts.ledgers(kind, party_kind):
        timeline[event['party']].append((event['round'], ledger))
    return timeline


def _state_at(timeline, round_index, default):
    """ The last state recorded at or before round_index. """
    state = default
    for change_round, ledger in timeline:
        if change_round > round_index:
            break
        state = ledger
    return state


def check_follow_the_leader(trace):
    """ Before r_rec a client's confirmed ledger is a prefix of the
        bookmark of every honest validator at the end of the round.
    """
    facts = TraceFacts(trace)
    if facts.config.gadget != 'recovery':
        return _inapplicable('follow_the_leader',
                             'validators keep no bookmarks without recovery')
    end = facts.horizon + 1 if facts.r_rec is None else facts.r_rec
    bookmarks = _state_timeline(facts, 'bookmark', 'v')
    checked = 0
    for index, event, ledger in facts.ledgers('confirm', 'c'):
        round_index = event['round']
        if round_index >= end:
            continue
        for name in facts.validators():
            if not (facts.present(name, round_index) and
                    facts.honest(name, round_index)):
                continue
            checked += 1
            bookmark = _state_at(bookmarks[name], round_index,
                                 EMPTY_LEDGER)
            if not is_prefix(ledger, bookmark):
                return Verdict('follow_the_leader', False, {
                    'event': index, 'client': event['party'],
                    'round': round_index, 'ledger': ledger.to_list(),
                    'validator': name, 'bookmark': bookmark.to_list(),
                }, f"{event['party']} confirmed {ledger} at "
                   f"r={round_index} ahead of {name}'s bookmark {bookmark}")
    return Verdict('follow_the_leader', True, {'checked': checked},
                   f"{checked} confirm/bookmark pairs in order")


def check_recovery(trace):
    """ The new genesis is agreed on, extends everything confirmed before
        r_rec and the common prefix of the honest bookmarks; bookmarks
        before r_rec form a chain.
    """
    # pylint: disable=too-many-locals
    facts = TraceFacts(trace)
    if facts.config.gadget != 'recovery' or facts.r_rec is None:
        return _inapplicable('recovery', 'the scenario has no r_rec')
    r_rec = facts.r_rec

    genesis = None
    for index, event, ledger in facts.ledgers('new_genesis', 'v'):
        if not facts.honest(event['party'], event['round']):
            continue
        if genesis is None:
            genesis = (index, event, ledger)
        elif ledger != genesis[2] or \
                event['data']['instance'] != genesis[1]['data']['instance']:
            return Verdict('recovery', False, {
                'events': [genesis[0], index],
                'ledgers': [genesis[2].to_list(), ledger.to_list()],
            }, f"{genesis[1]['party']} and {event['party']} computed "
               f"different new genesis ledgers")
    if genesis is None:
        return Verdict('recovery', True, {},
                       'no new genesis computed before R')
    l_rec = genesis[2]

    for index, event, ledger in facts.ledgers('confirm', 'c'):
        if event['round'] < r_rec and not is_prefix(ledger, l_rec):
            return Verdict('recovery', False, {
                'event': index, 'client': event['party'],
                'ledger': ledger.to_list(), 'l_rec': l_rec.to_list(),
            }, f"{event['party']} confirmed {ledger} at r={event['round']} "
               f"but the new genesis is {l_rec}")

    honest_bookmarks = [
        (index, event, ledger)
        for index, event, ledger in facts.ledgers('bookmark', 'v')
        if event['round'] < r_rec and
        facts.honest(event['party'], event['round'])]
    chain = sorted(honest_bookmarks, key=lambda item: (len(item[2]), item[0]))
    for (i_a, _, a), (i_b, _, b) in zip(chain, chain[1:]):
        if not is_prefix(a, b):
            return Verdict('recovery', False, {
                'events': [i_a, i_b],
                'ledgers': [a.to_list(), b.to_list()],
            }, f"honest bookmarks {a} and {b} conflict")

    bookmarks = _state_timeline(facts, 'bookmark', 'v')
    last_round = r_rec - 1
    shared = None
    for name in facts.validators():
        if not facts.honest(name, last_round):
            continue
        state = _state_at(bookmarks[name], last_round, EMPTY_LEDGER)
        shared = state if shared is None else common_prefix(shared, state)
    shared = EMPTY_LEDGER if shared is None else shared
    if not is_prefix(shared, l_rec):
        return Verdict('recovery', False, {
            'common_prefix': shared.to_list(), 'l_rec': l_rec.to_list(),
        }, f"new genesis {l_rec} drops the honest common prefix {shared}")
    return Verdict('recovery', True, {
        'l_rec': l_rec.to_list(), 'common_prefix': shared.to_list(),
    }, f"new genesis {l_rec} extends every pre-recovery confirmation")


def check_broadcast(trace):
    """ The bookmark broadcast at r_rec: honest relays deliver the same
        map, deliver an honest sender's value, deliver once per sender
        and at r_rec + u_BC.
    """
    # pylint: disable=too-many-locals
    facts = TraceFacts(trace)
    if facts.config.gadget != 'recovery' or facts.r_rec is None:
        return _inapplicable('broadcast', 'the scenario has no r_rec')
    expected_round = facts.r_rec + facts.constants['u_bc']
    if expected_round > facts.horizon:
        return _inapplicable('broadcast', 'the broadcast ends after R')

    def steady(name):
        return facts.honest(name, expected_round)

    sent = {}
    for _, event in facts.of_kind('ds_broadcast'):
        if steady(event['party']):
            sent[event['party']] = event['data']['value']

    delivered = collections.defaultdict(dict)
    for index, event in facts.of_kind('ds_deliver'):
        relay = event['party']
        if not steady(relay):
            continue
        sender = event['data']['sender']
        if sender in delivered[relay]:
            return Verdict('broadcast', False, {
                'event': index, 'relay': relay, 'sender': sender,
            }, f"{relay} delivered twice for {sender}")
        if event['round'] != expected_round:
            return Verdict('broadcast', False, {
                'event': index, 'relay': relay, 'round': event['round'],
                'expected_round': expected_round,
            }, f"{relay} delivered at r={event['round']}, not "
               f"r={expected_round}")
        delivered[relay][sender] = event['data']['value']

    relays = [str(party) for party in facts.corruption.v_new()
              if steady(str(party))]
    reference = None
    for relay in relays:
        for sender, value in sorted(sent.items()):
            if delivered[relay].get(sender, None) != value:
                return Verdict('broadcast', False, {
                    'relay': relay, 'sender': sender, 'sent': value,
                    'delivered': delivered[relay].get(sender),
                }, f"{relay} did not deliver {sender}'s value")
        if reference is None:
            reference = relay
        elif delivered[relay] != delivered[reference]:
            return Verdict('broadcast', False, {
                'relays': [reference, relay],
                'maps': [delivered[reference], delivered[relay]],
            }, f"{reference} and {relay} delivered different maps")
    return Verdict('broadcast', True, {
        'relays': relays, 'round': expected_round,
    }, f"{len(relays)} honest relays agree at r={expected_round}")


def _adversary_quorum(facts, instance_tag, round_index):
    members = facts.instance_members(instance_tag)
    corrupted = sum(1 for index in members
                    if facts.corruption.is_corrupted(index, round_index))
    return corrupted >= facts.epoch_size(instance_tag) // 2 + 1


def check_certifiable_safety(trace):
    """ While the adversary holds less than a quorum of an instance's
        keys, every witness ledger honest parties accept for it is
        consistent with every ledger its honest validators finalized.
    """
    facts = TraceFacts(trace)
    finalized = collections.defaultdict(list)
    for index, event, ledger in facts.ledgers('finalize', 'v'):
        if facts.honest(event['party'], event['round']):
            finalized[event['data']['instance']].append((index, ledger))

    checked = 0
    for index, event in facts.of_kind('witness'):
        tag = event['data']['instance']
        if not facts.honest(event['party'], event['round']) or \
                _adversary_quorum(facts, tag, event['round']):
            continue
        ledger = Ledger.from_list(event['data']['ledger'])
        checked += 1
        for final_index, final in finalized[tag]:
            if not consistent(ledger, final):
                return Verdict('certifiable_safety', False, {
                    'events': [index, final_index], 'instance': tag,
                    'ledgers': [ledger.to_list(), final.to_list()],
                }, f"{event['party']} accepted a witness for {ledger} "
                   f"conflicting with finalized {final}")
    return Verdict('certifiable_safety', True, {'checked': checked},
                   f"{checked} witnesses consistent with finalization")


def check_monotonicity(trace):
    """ Confirmed ledgers only grow; so do bookmarks of one instance. """
    facts = TraceFacts(trace)
    last = {}
    for index, event, ledger in facts.ledgers('confirm', 'c'):
        key = event['party']
        if key in last and not is_prefix(last[key][1], ledger):
            return Verdict('monotonicity', False, {
                'events': [last[key][0], index], 'party': key,
                'ledgers': [last[key][1].to_list(), ledger.to_list()],
            }, f"{key} confirmed {ledger} after {last[key][1]}")
        last[key] = (index, ledger)

    last = {}
    for index, event, ledger in facts.ledgers('bookmark', 'v'):
        if facts.r_rec is not None and event['round'] >= facts.r_rec:
            continue
        key = (event['party'], event['data']['instance'])
        if key in last and not is_prefix(last[key][1], ledger):
            return Verdict('monotonicity', False, {
                'events': [last[key][0], index], 'party': key[0],
                'ledgers': [last[key][1].to_list(), ledger.to_list()],
            }, f"{key[0]} bookmarked {ledger} after {last[key][1]}")
        last[key] = (index, ledger)
    return Verdict('monotonicity', True, {}, 'ledgers never shrink')


def check_network_delivery(trace):
    """ A gossip payload first held by an honest relaying party at round
        t is held by every other honest party present by
        max(t, wake) + delta.
    """
    # pylint: disable=too-many-locals
    facts = TraceFacts(trace)
    delta = facts.config.delta
    holds = collections.defaultdict(dict)
    for index, event in facts.of_kind('send', 'deliver'):
        data = event['data']
        if not data.get('gossip'):
            continue
        holds[data['digest']].setdefault(event['party'],
                                         (event['round'], index))

    def relays(name, round_index):
        if not (facts.present(name, round_index) and
                facts.honest(name, round_index)):
            return False
        return facts.party(name).is_validator or facts.config.client_gossip

    everyone = facts.validators() + facts.client_names()
    checked = 0
    for payload_digest, holders in sorted(holds.items()):
        origins = [(round_index, name)
                   for name, (round_index, _) in holders.items()
                   if relays(name, round_index)]
        if not origins:
            continue
        origin_round, origin = min(origins)
        for name in everyone:
            if name == origin:
                continue
            party = facts.party(name)
            start = origin_round
            if party.is_client:
                start = max(start,
                            facts.clients.window(party).wake_round)
            deadline = start + delta
            if deadline > facts.horizon or \
                    not facts.present(name, deadline) or \
                    not facts.honest(name, deadline):
                continue
            checked += 1
            held = holders.get(name)
            if held is None or held[0] > deadline:
                return Verdict('network_delivery', False, {
                    'digest': payload_digest, 'origin': origin,
                    'origin_round': origin_round, 'party': name,
                    'deadline': deadline,
                    'held_round': None if held is None else held[0],
                }, f"{name} did not hold {payload_digest} by "
                   f"r={deadline} ({origin} held it at r={origin_round})")
    return Verdict('network_delivery', True, {'checked': checked},
                   f"{checked} deliveries within delta")


CHECKERS = {
    'safety': check_safety,
    'liveness': check_liveness,
    'follow_the_leader': check_follow_the_leader,
    'recovery': check_recovery,
    'broadcast': check_broadcast,
    'certifiable_safety': check_certifiable_safety,
    'monotonicity': check_monotonicity,
    'network_delivery': check_network_delivery,
}

MANIFEST = {
    'safety': 'confirmed ledgers of all clients are consistent in [0, R]',
    'liveness': 'a transaction held by every honest validator is '
                'confirmed by every awake client within u, in the '
                'liveness windows',
    'follow_the_leader': 'before r_rec a confirmed ledger is a prefix of '
                         'every honest bookmark',
    'recovery': 'the new genesis extends every ledger confirmed before '
                'r_rec',
    'broadcast': 'honest relays deliver identical bookmark maps, holding '
                 'each honest sender\'s value',
    'certifiable_safety': 'without an adversarial quorum, accepted '
                          'witnesses agree with honest finalization',
    'monotonicity': 'confirmed ledgers and bookmarks never shrink',
    'network_delivery': 'gossip held by an honest party reaches every '
                        'honest party within delta',
}


def unmapped_checkers():
    """ Names of checkers missing from the manifest, or vice versa. """
    return sorted(set(CHECKERS) ^ set(MANIFEST))


def run_checkers(trace, names=None):
    """ Runs the named checkers (all by default) in manifest order.

        Returns: list of Verdict

        Raises:
            RecoverysimHarnessError: unknown checker name, or a checker
                with no manifest entry.
    """
    missing = unmapped_checkers()
    if missing:
        raise RecoverysimHarnessError(
            f"checkers without a manifest entry: {', '.join(missing)}")
    names = list(CHECKERS) if not names else list(names)
    unknown = [name for name in names if name not in CHECKERS]
    if unknown:
        raise RecoverysimHarnessError(
            f"unknown checker(s): {', '.join(unknown)}")
    return [CHECKERS[name](trace) for name in names]


def summary_line(verdicts):
    passed = sum(1 for verdict in verdicts if verdict.passed)
    return f"{passed}/{len(verdicts)} checkers pass"
