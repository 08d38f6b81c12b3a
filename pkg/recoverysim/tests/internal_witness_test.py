""" internal.witness unit tests

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import itertools
import unittest

from recoverysim.core.crypto import Pki
from recoverysim.core.ledger import EMPTY_LEDGER, is_prefix
from recoverysim.internal.messages import FinalityVote, Witness
from recoverysim.internal.witness import BadSignature, BelowQuorum, \
    DuplicateSigner, GenesisMismatch, VotePool, WrongInstance, \
    witness_consume, witness_produce
from recoverysim.tests.utils import ledger, make_instance, make_vote

# pylint: disable=missing-docstring


class TestWitnessConsume(unittest.TestCase):

    def setUp(self):
        self.pki = Pki(seed=3)
        self.instance = make_instance(4)

    def vote(self, index, *txs):
        return make_vote(self.instance, self.pki, index, *txs)

    def test_majority_prefix_of_votes(self):
        witness = Witness(self.instance, (
            self.vote(0, 't1', 't2'), self.vote(1, 't1', 't2', 't3'),
            self.vote(2, 't1')))
        self.assertEqual(ledger('t1'),
                         witness_consume(witness, self.pki))

        witness = Witness(self.instance, (
            self.vote(0, 't1', 't2'), self.vote(1, 't1', 't2', 't3'),
            self.vote(2, 't1', 't2')))
        self.assertEqual(ledger('t1', 't2'),
                         witness_consume(witness, self.pki))

    def test_rejections(self):
        cases = [
            (BelowQuorum, (self.vote(0, 'a'), self.vote(1, 'a'))),
            (DuplicateSigner, (self.vote(0, 'a'), self.vote(0, 'b'),
                               self.vote(1, 'a'))),
            (BadSignature, (self.vote(0, 'a'), self.vote(1, 'a'),
                            make_vote(self.instance, Pki(seed=4), 2, 'a'))),
        ]
        for error, votes in cases:
            with self.assertRaises(error):
                witness_consume(Witness(self.instance, votes), self.pki)

    def test_signer_outside_valset(self):
        witness = Witness(self.instance, (
            self.vote(0, 'a'), self.vote(1, 'a'), self.vote(5, 'a')))
        with self.assertRaises(BadSignature) as context:
            witness_consume(witness, self.pki)
        self.assertEqual('bad_signature', context.exception.reason)

    def test_wrong_instance(self):
        other = make_instance(4, epoch_tag=1, start_round=30)
        witness = Witness(self.instance, (
            self.vote(0, 'a'), self.vote(1, 'a'), self.vote(2, 'a')))
        self.assertRaises(WrongInstance, witness_consume, witness, self.pki,
                          expected_instance=other)

    def test_genesis_mismatch(self):
        instance = make_instance(4, genesis=ledger('g'), epoch_tag=1)
        votes = tuple(FinalityVote.make(instance, ledger('x'),
                                        self.pki.issue(v))
                      for v in instance.valset.members[:3])
        self.assertRaises(GenesisMismatch, witness_consume,
                          Witness(instance, votes), self.pki)


def brute_force_best(votes, instance, pki):
    """ Longest C-value over every quorum-sized subset of votes with
        distinct signers.
    """
    best = None
    quorum = instance.valset.quorum
    for size in range(quorum, len(votes) + 1):
        for subset in itertools.combinations(votes, size):
            if len({v.signer for v in subset}) != size:
                continue
            value = witness_consume(Witness(instance, subset), pki)
            if best is None or len(value) > len(best):
                best = value
    return best


class TestWitnessProduce(unittest.TestCase):

    def setUp(self):
        self.pki = Pki(seed=3)

    def test_no_quorum(self):
        instance = make_instance(4)
        pool = VotePool(instance, self.pki)
        pool.add(make_vote(instance, self.pki, 0, 'a'))
        pool.add(make_vote(instance, self.pki, 1, 'a'))
        self.assertIsNone(witness_produce(pool))

    def test_pool_keeps_maximal_votes(self):
        instance = make_instance(4)
        pool = VotePool(instance, self.pki)
        self.assertTrue(pool.add(make_vote(instance, self.pki, 0, 'a')))
        self.assertTrue(pool.add(make_vote(instance, self.pki, 0, 'a', 'b')))
        self.assertFalse(pool.add(make_vote(instance, self.pki, 0, 'a')))
        self.assertTrue(pool.add(make_vote(instance, self.pki, 0, 'c')))
        self.assertEqual(2, len(pool))
        self.assertFalse(pool.add(
            make_vote(instance, Pki(seed=8), 1, 'a')))

    def test_against_brute_force(self):
        # every assignment of these ledgers to 4 signers, one or two
        # votes each
        instance = make_instance(4)
        choices = [(), ('a',), ('a', 'b'), ('a', 'c'), ('d',)]
        for assignment in itertools.product(range(len(choices)), repeat=4):
            pool = VotePool(instance, self.pki)
            votes = []
            for index, choice in enumerate(assignment):
                for extra in (choices[choice], choices[(choice + 2) % 5]):
                    vote = make_vote(instance, self.pki, index, *extra)
                    if pool.add(vote):
                        votes.append(vote)
            retained = pool.votes()
            witness = witness_produce(pool)
            expected = brute_force_best(retained, instance, self.pki)
            self.assertIsNotNone(witness)
            produced = witness_consume(witness, self.pki)
            self.assertEqual(len(expected), len(produced))
            self.assertTrue(any(is_prefix(produced, v.ledger)
                                for v in retained))

    def test_deterministic_choice(self):
        instance = make_instance(3)
        votes = [make_vote(instance, self.pki, i, 'a') for i in range(3)]
        first = VotePool(instance, self.pki)
        second = VotePool(instance, self.pki)
        for vote in votes:
            first.add(vote)
        for vote in reversed(votes):
            second.add(vote)
        self.assertEqual(witness_produce(first), witness_produce(second))
        self.assertEqual(['v0', 'v1'],
                         [str(s) for s in witness_produce(first).signers()])

    def test_empty_votes(self):
        instance = make_instance(1)
        pool = VotePool(instance, self.pki)
        pool.add(make_vote(instance, self.pki, 0))
        self.assertEqual(EMPTY_LEDGER,
                         witness_consume(witness_produce(pool), self.pki))


if __name__ == '__main__':
    unittest.main()
