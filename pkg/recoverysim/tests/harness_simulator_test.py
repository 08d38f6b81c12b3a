""" End to end runs of the simulator over the bundled scenarios

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import unittest

from recoverysim.adversary.demos import no_wait_scenario
from recoverysim.base import RecoverysimScenarioError
from recoverysim.harness.checkers import run_checkers
from recoverysim.harness.scenario import ScenarioConfig
from recoverysim.harness.simulator import Simulator, run
from recoverysim.harness.suite import run_scenario_file
from recoverysim.harness.trace import Trace
from recoverysim.tests.utils import SCENARIO_DIR, scenario

# pylint: disable=missing-docstring


class TestSimulator(unittest.TestCase):

    def test_deterministic(self):
        config = scenario(adversary={'strategy': 'none',
                                     'params': {'jitter': True}})
        self.assertEqual(run(config).to_jsonl(), run(config).to_jsonl())

    def test_seed_changes_jitter(self):
        config = scenario(adversary={'strategy': 'none',
                                     'params': {'jitter': True}})
        self.assertNotEqual(run(config.with_seed(1)).to_jsonl(),
                            run(config.with_seed(2)).to_jsonl())

    def test_seed_changes_the_attack(self):
        config = ScenarioConfig.from_dict(dict(
            no_wait_scenario(client_wait=2),
            adversary={'strategy': 'double_spend_equivocator'}))
        attacks = set()
        for seed in range(6):
            trace = run(config.with_seed(seed))
            attacks.add(tuple(
                (event['round'], tuple(event['data']['to']),
                 event['data']['at'])
                for _, event in trace.of_kind('inject')))
        self.assertGreater(len(attacks), 1)

    def test_header_first(self):
        trace = run(scenario())
        self.assertEqual('scenario', trace.events[0]['kind'])
        self.assertEqual('unit', trace.header['config']['name'])

    def test_clock_follows_rounds(self):
        simulator = Simulator(scenario(horizon=12))
        simulator.run()
        self.assertEqual(12, simulator.clock.seconds())

    def test_verdicts_from_loaded_trace(self):
        trace = run(scenario())
        loaded = Trace.from_jsonl(trace.to_jsonl())
        self.assertEqual([v.to_dict() for v in run_checkers(trace)],
                         [v.to_dict() for v in run_checkers(loaded)])

    def test_forgery_before_r_maj(self):
        config = scenario(protocol={
            'kind': 'scripted_oracle',
            'forged_votes': [{'round': 5, 'signers': [0, 1, 2],
                              'ledger': ['x']}]})
        self.assertRaises(RecoverysimScenarioError, run, config)


class TestCorpus(unittest.TestCase):

    def assert_as_expected(self, name, seeds=1):
        row = run_scenario_file(SCENARIO_DIR / f"{name}.json", seeds)
        self.assertTrue(row.matched,
                        f"{name}: expected {row.expected}, observed "
                        f"{row.observed_text} ({','.join(row.failing)})")
        return row

    def test_honest(self):
        row = self.assert_as_expected('honest_n4_oracle', seeds=2)
        self.assertEqual(['pass', 'pass'], row.observed)
        self.assert_as_expected('honest_n13_oracle')

    def test_sleepy_clients(self):
        self.assert_as_expected('sleepy_clients')
        self.assert_as_expected('sleepy_clients_recovery')

    def test_silent_minority(self):
        self.assert_as_expected('silent_minority')

    def test_attacks_on_freezing(self):
        self.assert_as_expected('double_spend_freezing')
        self.assert_as_expected('eve_freezing')
        self.assert_as_expected('double_spend_freezing_jitter')
        self.assert_as_expected('double_spend_freezing_n7')
        self.assert_as_expected('late_corruption_freezing')

    def test_attacks_on_recovery(self):
        self.assert_as_expected('double_spend_recovery')
        self.assert_as_expected('eve_recovery')
        self.assert_as_expected('bookmark_liar_recovery')
        self.assert_as_expected('double_spend_recovery_simple_sync')

    def test_attack_variants_on_recovery(self):
        for name in ('eve_recovery_deep_fork', 'eve_recovery_four_clients',
                     'double_spend_recovery_silent',
                     'silent_majority_recovery', 'bookmark_liar_n10'):
            self.assert_as_expected(name)

    def test_small_healed_sets(self):
        for size in (1, 2, 3):
            row = self.assert_as_expected(f"recovery_v_new_{size}")
            self.assertEqual(['pass'], row.observed)

    def test_validator_lag_with_standard_waits(self):
        self.assert_as_expected('validator_lag_recovery', seeds=3)
        self.assert_as_expected('validator_lag_all')

    def test_attack_seeds(self):
        self.assert_as_expected('double_spend_recovery', seeds=3)
        self.assert_as_expected('eve_recovery', seeds=3)

    def test_negative_controls(self):
        for name, checker in (('control_no_wait', 'safety'),
                              ('control_gossip_off', 'safety'),
                              ('control_client_wait_delta',
                               'follow_the_leader')):
            row = self.assert_as_expected(name)
            self.assertIn(checker, row.failing)

    def test_corpus_size(self):
        self.assertGreaterEqual(len(list(SCENARIO_DIR.glob('*.json'))), 30)


if __name__ == '__main__':
    unittest.main()
