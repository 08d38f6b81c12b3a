""" gadget.recovery unit tests

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import unittest

from hypothesis import given
from hypothesis import strategies as st

from recoverysim.core.ledger import EMPTY_LEDGER, Ledger, is_prefix
from recoverysim.core.party import ValidatorSet, validator
from recoverysim.gadget.recovery import GenesisVote, compute_new_genesis, \
    observed_transactions
from recoverysim.internal.messages import Block, InstanceId, Proposal, \
    Witness
from recoverysim.tests.utils import ledger, make_instance, make_pki, \
    make_vote

# pylint: disable=missing-docstring

HONEST_CHAIN = ('t1', 't2', 't3', 't4', 't5')


class TestNewGenesis(unittest.TestCase):

    def test_corrupted_minority_cannot_extend(self):
        delivered = {
            validator(3): ledger('t1'),
            validator(4): ledger('t1', 't2'),
            validator(5): ledger('t1', 't9', 't10'),
            validator(6): ledger('t1', 't9', 't11'),
        }
        self.assertEqual(ledger('t1'), compute_new_genesis(delivered, 4))

    def test_bottom_counts_against(self):
        delivered = {
            validator(0): ledger('t1'),
            validator(1): ledger('t1', 't2'),
            validator(2): None,
            validator(3): None,
        }
        self.assertEqual(EMPTY_LEDGER, compute_new_genesis(delivered, 4))
        delivered[validator(2)] = ledger('t1', 't2', 't3')
        self.assertEqual(ledger('t1'), compute_new_genesis(delivered, 4))

    def test_agreeing_bookmarks(self):
        delivered = {validator(i): ledger('t1', 't2') for i in range(3)}
        delivered[validator(3)] = None
        self.assertEqual(ledger('t1', 't2'), compute_new_genesis(delivered, 4))

    @given(st.integers(min_value=1, max_value=7), st.data())
    def test_between_honest_bookmarks(self, set_size, data):
        honest_count = set_size // 2 + 1
        delivered = {}
        for index in range(set_size):
            if index < honest_count:
                length = data.draw(st.integers(0, len(HONEST_CHAIN)))
                delivered[validator(index)] = Ledger(HONEST_CHAIN[:length])
            else:
                delivered[validator(index)] = data.draw(st.one_of(
                    st.none(),
                    st.lists(st.sampled_from(['t1', 't2', 'x', 'y']),
                             unique=True, max_size=4).map(
                                 lambda txs: Ledger(tuple(txs)))))
        honest = [delivered[validator(i)] for i in range(honest_count)]
        l_rec = compute_new_genesis(delivered, set_size)
        shortest = min(honest, key=len)
        self.assertTrue(is_prefix(shortest, l_rec))
        self.assertTrue(any(is_prefix(l_rec, bookmark)
                            for bookmark in honest))


class TestGenesisVote(unittest.TestCase):

    def test_signature(self):
        pki = make_pki()
        instance = InstanceId(1, ledger('t1'), ValidatorSet.of_size(3), 12)
        vote = GenesisVote.make(instance, pki.issue(validator(2)))
        self.assertEqual(validator(2), vote.signer)
        self.assertTrue(pki.verify(vote.signer,
                                   GenesisVote.signed_bytes(instance),
                                   vote.sig))
        other = InstanceId(1, ledger('t2'), ValidatorSet.of_size(3), 12)
        self.assertFalse(pki.verify(vote.signer,
                                    GenesisVote.signed_bytes(other),
                                    vote.sig))
        self.assertEqual({'instance': instance.tag, 'signer': 'v2', 'len': 1},
                         vote.describe())


class TestObservedTransactions(unittest.TestCase):

    def test_proposals_only(self):
        pki = make_pki()
        instance = make_instance(4)
        block = Block(instance.tag, 3, 1, None, ('t7', 't8'), validator(1))
        proposal = Proposal.make(instance, block, pki.issue(validator(1)))
        vote = make_vote(instance, pki, 0, 'x1')
        witness = Witness(instance, (make_vote(instance, pki, 2, 'x2'),))

        txs = observed_transactions([vote, proposal, witness], 9)
        self.assertEqual(['t7', 't8'], [tx.tx_id for tx in txs])
        self.assertEqual({9}, {tx.submit_round for tx in txs})
        self.assertEqual([], observed_transactions([vote, witness], 9))


if __name__ == '__main__':
    unittest.main()
