""" internal protocol unit tests: the scripted oracle

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import unittest

from recoverysim.base import RecoverysimScenarioError
from recoverysim.core.ledger import Transaction, is_prefix
from recoverysim.core.party import validator
from recoverysim.internal.messages import Witness
from recoverysim.internal.scripted_oracle import OracleLedger, \
    OracleScript, ScriptedOracle, scripted_oracle_step
from recoverysim.internal.witness import witness_consume
from recoverysim.netsim.schedule import CorruptionSchedule
from recoverysim.tests.utils import ledger, make_instance, make_pki

# pylint: disable=missing-docstring


class TestOracleLedger(unittest.TestCase):

    def setUp(self):
        self.instance = make_instance(4)
        self.oracle = OracleLedger(self.instance, latency=3)

    def test_latency(self):
        self.oracle.submit(Transaction('a'), 1)
        self.oracle.submit(Transaction('b'), 2)
        self.assertEqual(ledger(), self.oracle.ledger_at(3))
        self.assertEqual(ledger('a'), self.oracle.ledger_at(4))
        self.assertEqual(ledger('a', 'b'), self.oracle.ledger_at(5))

    def test_resubmission_ignored(self):
        self.oracle.submit(Transaction('a'), 1)
        self.oracle.submit(Transaction('a'), 0)
        self.assertEqual(ledger(), self.oracle.ledger_at(3))
        self.assertEqual(ledger('a'), self.oracle.ledger_at(4))

    def test_genesis_is_kept(self):
        instance = make_instance(4, genesis=ledger('g'), epoch_tag=1)
        oracle = OracleLedger(instance, latency=0)
        oracle.submit(Transaction('g'), 0)
        oracle.submit(Transaction('h'), 0)
        self.assertEqual(ledger('g', 'h'), oracle.ledger_at(0))


class TestScriptedOracle(unittest.TestCase):

    def test_votes_when_ledger_grows(self):
        pki = make_pki()
        instance = make_instance(4, start_round=2)
        oracle = OracleLedger(instance, latency=1)
        parties = [ScriptedOracle(instance, validator(i),
                                  pki.issue(validator(i)), pki, oracle)
                   for i in range(4)]
        parties[0].add_transactions([Transaction('a')], 0)
        self.assertEqual([], parties[0].step(1, []))
        votes = [party.step(2, [])[0] for party in parties]
        self.assertEqual(ledger('a'), parties[3].finalized)
        self.assertEqual([], parties[0].step(3, []))
        witness = Witness(instance, tuple(votes[:3]))
        self.assertEqual(ledger('a'), witness_consume(witness, pki))


class TestScript(unittest.TestCase):

    def setUp(self):
        self.pki = make_pki()
        self.instance = make_instance(4)
        self.oracle = OracleLedger(self.instance, latency=1)
        self.oracle.submit(Transaction('a'), 0)
        self.script = OracleScript.from_list(
            [{'round': 6, 'signers': [0, 1, 2], 'ledger': ['a', 'x']}])
        self.keys = {validator(i): self.pki.issue(validator(i))
                     for i in range(3)}

    def test_forgery_after_r_maj(self):
        corruption = CorruptionSchedule(
            n=4, corrupt_round={0: 5, 1: 5, 2: 5}, r_maj=5)
        honest, forged = scripted_oracle_step(
            self.oracle, self.script, 6, corruption, self.keys)
        self.assertEqual(ledger('a'), honest)
        self.assertEqual(['v0', 'v1', 'v2'],
                         [str(vote.signer) for vote in forged])
        self.assertTrue(all(vote.ledger == ledger('a', 'x')
                            for vote in forged))
        self.assertTrue(is_prefix(honest, forged[0].ledger))

    def test_nothing_due(self):
        corruption = CorruptionSchedule(n=4)
        _, forged = scripted_oracle_step(
            self.oracle, self.script, 5, corruption, self.keys)
        self.assertEqual([], forged)

    def test_forgery_before_r_maj(self):
        corruption = CorruptionSchedule(
            n=4, corrupt_round={0: 5, 1: 5, 2: 5}, r_maj=7)
        self.assertRaises(RecoverysimScenarioError, scripted_oracle_step,
                          self.oracle, self.script, 6, corruption, self.keys)

    def test_forgery_needs_corrupted_signers(self):
        corruption = CorruptionSchedule(
            n=4, corrupt_round={0: 5, 1: 5}, r_maj=5)
        keys = {p: k for p, k in self.keys.items() if p.index < 2}
        self.assertRaises(RecoverysimScenarioError, scripted_oracle_step,
                          self.oracle, self.script, 6, corruption, keys)


if __name__ == '__main__':
    unittest.main()
