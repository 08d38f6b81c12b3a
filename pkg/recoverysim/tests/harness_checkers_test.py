""" harness.checkers unit tests over hand-written traces

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import unittest

from recoverysim.base import RecoverysimHarnessError
from recoverysim.harness.checkers import CHECKERS, MANIFEST, Verdict, \
    check_broadcast, check_certifiable_safety, check_follow_the_leader, \
    check_liveness, check_monotonicity, check_network_delivery, \
    check_recovery, check_safety, run_checkers, summary_line, \
    unmapped_checkers
from recoverysim.tests.utils import scenario, synthetic_trace

# pylint: disable=missing-docstring

VALIDATORS = ['v0', 'v1', 'v2', 'v3']


def confirm(round_index, party, *txs, instance='i0:x'):
    return (round_index, party, 'confirm',
            {'instance': instance, 'ledger': list(txs)})


def bookmark(round_index, party, *txs, instance='i0:x'):
    return (round_index, party, 'bookmark',
            {'instance': instance, 'ledger': list(txs)})


class TestSafety(unittest.TestCase):

    def test_consistent(self):
        trace = synthetic_trace(events=[confirm(5, 'c0', 'a'),
                                        confirm(6, 'c1', 'a', 'b')])
        verdict = check_safety(trace)
        self.assertTrue(verdict.passed)
        self.assertEqual({'confirms': 2}, verdict.evidence)

    def test_conflict(self):
        trace = synthetic_trace(events=[confirm(5, 'c0', 'a'),
                                        confirm(6, 'c1', 'b')])
        verdict = check_safety(trace)
        self.assertFalse(verdict.passed)
        self.assertEqual([1, 2], verdict.evidence['events'])
        self.assertEqual([['a'], ['b']], verdict.evidence['ledgers'])


class TestLiveness(unittest.TestCase):

    def events(self, c1_round):
        inputs = [(1, name, 'tx_input', {'tx': 't1'}) for name in VALIDATORS]
        return inputs + [confirm(10, 'c0', 't1'),
                         confirm(c1_round, 'c1', 't1')]

    def test_within_bound(self):
        # eligible at 1, u = 14: confirmed by round 16
        verdict = check_liveness(synthetic_trace(events=self.events(16)))
        self.assertTrue(verdict.passed)
        self.assertEqual(14, verdict.evidence['bound'])
        self.assertEqual(15, verdict.evidence['observed_max_latency'])

    def test_late(self):
        verdict = check_liveness(synthetic_trace(events=self.events(17)))
        self.assertFalse(verdict.passed)
        self.assertEqual('c1', verdict.evidence['client'])
        self.assertEqual(16, verdict.evidence['deadline'])
        self.assertEqual(17, verdict.evidence['confirm_round'])

    def test_outside_windows(self):
        trace = synthetic_trace(events=self.events(30))
        self.assertTrue(check_liveness(trace, windows=[(0, 10)]).passed)
        self.assertFalse(check_liveness(trace, u=4).passed)

    def test_not_eligible_until_all_honest_validators_hold_it(self):
        events = [(1, name, 'tx_input', {'tx': 't1'})
                  for name in VALIDATORS[:3]]
        events.append((9, 'v3', 'tx_input', {'tx': 't1'}))
        events.append(confirm(24, 'c0', 't1'))
        events.append(confirm(24, 'c1', 't1'))
        self.assertTrue(check_liveness(synthetic_trace(events=events)).passed)


class TestFollowTheLeader(unittest.TestCase):

    def test_behind_bookmarks(self):
        events = [bookmark(4, name, 'a') for name in VALIDATORS]
        events.append(confirm(5, 'c0', 'a'))
        self.assertTrue(check_follow_the_leader(
            synthetic_trace(events=events)).passed)

    def test_ahead_of_a_bookmark(self):
        events = [bookmark(4, name, 'a') for name in VALIDATORS[:3]]
        events.append(confirm(5, 'c0', 'a'))
        events.append(bookmark(6, 'v3', 'a'))
        verdict = check_follow_the_leader(synthetic_trace(events=events))
        self.assertFalse(verdict.passed)
        self.assertEqual('v3', verdict.evidence['validator'])
        self.assertEqual([], verdict.evidence['bookmark'])

    def test_corrupted_validator_ignored(self):
        config = scenario(corruption={'corrupt': [{'validator': 3,
                                                   'round': 0}]})
        events = [bookmark(4, name, 'a') for name in VALIDATORS[:3]]
        events.append(confirm(5, 'c0', 'a'))
        self.assertTrue(check_follow_the_leader(
            synthetic_trace(config, events)).passed)

    def test_freezing_inapplicable(self):
        verdict = check_follow_the_leader(
            synthetic_trace(scenario(gadget='freezing')))
        self.assertTrue(verdict.passed)
        self.assertFalse(verdict.applicable)


RECOVERY = {'r_rec': 20}


def recovery_events(genesis=('a',), v3_genesis=('a',), confirmed=('a',)):
    events = [bookmark(5, name, 'a') for name in VALIDATORS]
    events.append(confirm(10, 'c0', *confirmed))
    for name in VALIDATORS:
        txs = v3_genesis if name == 'v3' else genesis
        events.append((26, name, 'new_genesis',
                       {'instance': 'i1:y', 'ledger': list(txs)}))
    return events


class TestRecovery(unittest.TestCase):

    def setUp(self):
        self.config = scenario(corruption=RECOVERY)

    def test_pass(self):
        verdict = check_recovery(
            synthetic_trace(self.config, recovery_events()))
        self.assertTrue(verdict.passed)
        self.assertEqual(['a'], verdict.evidence['l_rec'])

    def test_disagreement(self):
        verdict = check_recovery(synthetic_trace(
            self.config, recovery_events(v3_genesis=('b',))))
        self.assertFalse(verdict.passed)

    def test_confirmation_dropped(self):
        verdict = check_recovery(synthetic_trace(
            self.config, recovery_events(confirmed=('a', 'b'))))
        self.assertFalse(verdict.passed)
        self.assertEqual(['a'], verdict.evidence['l_rec'])

    def test_common_prefix_dropped(self):
        verdict = check_recovery(synthetic_trace(
            self.config, recovery_events(genesis=(), v3_genesis=(),
                                         confirmed=())))
        self.assertFalse(verdict.passed)
        self.assertEqual(['a'], verdict.evidence['common_prefix'])

    def test_without_r_rec(self):
        self.assertFalse(check_recovery(synthetic_trace()).applicable)


class TestBroadcast(unittest.TestCase):

    def setUp(self):
        self.config = scenario(corruption=RECOVERY)

    def events(self, late_relay=None):
        events = [(20, name, 'ds_broadcast',
                   {'value': ['a'], 'bookmark': ['a']})
                  for name in VALIDATORS]
        for relay in VALIDATORS:
            round_index = 27 if relay == late_relay else 26
            for sender in VALIDATORS:
                events.append((round_index, relay, 'ds_deliver',
                               {'sender': sender, 'value': ['a']}))
        return sorted(events, key=lambda event: event[0])

    def test_agreement(self):
        verdict = check_broadcast(synthetic_trace(self.config, self.events()))
        self.assertTrue(verdict.passed)
        self.assertEqual(26, verdict.evidence['round'])

    def test_late_delivery(self):
        verdict = check_broadcast(
            synthetic_trace(self.config, self.events(late_relay='v2')))
        self.assertFalse(verdict.passed)
        self.assertEqual(27, verdict.evidence['round'])

    def test_missing_value(self):
        events = self.events()
        events = [e for e in events
                  if not (e[1] == 'v1' and e[2] == 'ds_deliver' and
                          e[3]['sender'] == 'v0')]
        verdict = check_broadcast(synthetic_trace(self.config, events))
        self.assertFalse(verdict.passed)
        self.assertEqual('v1', verdict.evidence['relay'])

    def test_after_horizon(self):
        config = scenario(horizon=24, corruption=RECOVERY)
        self.assertFalse(check_broadcast(synthetic_trace(config)).applicable)


class TestCertifiableSafety(unittest.TestCase):

    EVENTS = [
        (3, 'v0', 'finalize', {'instance': 'i0:x', 'ledger': ['a']}),
        (5, 'c0', 'witness', {'instance': 'i0:x', 'ledger': ['b']}),
    ]

    def test_conflict(self):
        verdict = check_certifiable_safety(synthetic_trace(
            events=self.EVENTS))
        self.assertFalse(verdict.passed)
        self.assertEqual([2, 1], verdict.evidence['events'])

    def test_adversary_quorum(self):
        config = scenario(corruption={
            'corrupt': [{'validator': i, 'round': 4} for i in range(3)],
            'r_maj': 4})
        self.assertTrue(check_certifiable_safety(
            synthetic_trace(config, self.EVENTS)).passed)


class TestMonotonicity(unittest.TestCase):

    def test_growing(self):
        trace = synthetic_trace(events=[confirm(5, 'c0', 'a'),
                                        confirm(6, 'c0', 'a', 'b'),
                                        bookmark(6, 'v0', 'a'),
                                        bookmark(7, 'v0', 'a', 'b')])
        self.assertTrue(check_monotonicity(trace).passed)

    def test_confirm_shrinks(self):
        trace = synthetic_trace(events=[confirm(5, 'c0', 'a', 'b'),
                                        confirm(6, 'c0', 'a')])
        verdict = check_monotonicity(trace)
        self.assertFalse(verdict.passed)
        self.assertEqual('c0', verdict.evidence['party'])

    def test_bookmark_shrinks(self):
        trace = synthetic_trace(events=[bookmark(5, 'v1', 'a', 'b'),
                                        bookmark(6, 'v1', 'c')])
        self.assertFalse(check_monotonicity(trace).passed)

    def test_new_instance_restarts(self):
        trace = synthetic_trace(events=[
            bookmark(5, 'v1', 'a', 'b'),
            bookmark(6, 'v1', 'a', instance='i1:y')])
        self.assertTrue(check_monotonicity(trace).passed)


class TestNetworkDelivery(unittest.TestCase):

    def events(self, v3_round):
        events = [(2, 'v0', 'send', {'gossip': True, 'digest': 'd1'})]
        for name in ('v1', 'v2', 'c0', 'c1'):
            events.append((4, name, 'deliver',
                           {'gossip': True, 'digest': 'd1'}))
        events.append((v3_round, 'v3', 'deliver',
                       {'gossip': True, 'digest': 'd1'}))
        return sorted(events, key=lambda event: event[0])

    def test_within_delta(self):
        verdict = check_network_delivery(synthetic_trace(
            events=self.events(4)))
        self.assertTrue(verdict.passed)
        self.assertEqual(5, verdict.evidence['checked'])

    def test_late(self):
        verdict = check_network_delivery(synthetic_trace(
            events=self.events(5)))
        self.assertFalse(verdict.passed)
        self.assertEqual('v3', verdict.evidence['party'])
        self.assertEqual(4, verdict.evidence['deadline'])

    def test_non_gossip_ignored(self):
        trace = synthetic_trace(events=[
            (2, 'v0', 'send', {'gossip': False, 'digest': 'd2'})])
        self.assertEqual(0, check_network_delivery(trace).evidence['checked'])


class TestRunCheckers(unittest.TestCase):

    def test_manifest_complete(self):
        self.assertEqual([], unmapped_checkers())
        self.assertEqual(set(CHECKERS), set(MANIFEST))

    def test_all(self):
        verdicts = run_checkers(synthetic_trace())
        self.assertEqual(list(CHECKERS), [v.checker for v in verdicts])
        self.assertEqual('8/8 checkers pass', summary_line(verdicts))

    def test_selection(self):
        verdicts = run_checkers(synthetic_trace(), ['safety'])
        self.assertEqual(['safety'], [v.checker for v in verdicts])

    def test_unknown(self):
        self.assertRaises(RecoverysimHarnessError, run_checkers,
                          synthetic_trace(), ['safety', 'vibes'])

    def test_summary(self):
        verdicts = [Verdict('a', True), Verdict('b', False)]
        self.assertEqual('1/2 checkers pass', summary_line(verdicts))


if __name__ == '__main__':
    unittest.main()
