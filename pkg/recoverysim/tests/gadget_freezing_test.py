""" gadget.freezing unit tests

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import unittest

from twisted.internet import task

from recoverysim.core.ledger import EMPTY_LEDGER
from recoverysim.core.party import client
from recoverysim.harness.trace import Trace
from recoverysim.internal.messages import Witness
from recoverysim.gadget.freezing import FreezingClient, FreezingGadget
from recoverysim.netsim.network import Network
from recoverysim.netsim.schedule import ClientSchedule, ClientWindow, \
    CorruptionSchedule
from recoverysim.tests.utils import MockParty, ledger, make_instance, \
    make_pki, make_vote

# pylint: disable=missing-docstring


class TestFreezingGadget(unittest.TestCase):

    def setUp(self):
        self.pki = make_pki()
        self.instance = make_instance(4)
        self.party = MockParty(client(0))
        self.gadget = FreezingGadget(self.party, self.instance, self.pki,
                                     wait=2)

    def witness(self, *txs, signers=(0, 1, 2)):
        return Witness(self.instance, tuple(
            make_vote(self.instance, self.pki, i, *txs) for i in signers))

    def confirms(self):
        return [payload['ledger'] for _, kind, payload in self.party.records
                if kind == 'confirm']

    def test_confirm_after_wait(self):
        self.gadget.on_witness(self.witness('a'), 0)
        self.assertEqual(['witness'], self.party.kinds())
        self.assertEqual(1, len(self.party.gossiped))
        self.party.advance_to(1)
        self.assertEqual(EMPTY_LEDGER, self.gadget.confirmed)
        self.party.advance_to(2)
        self.assertEqual(ledger('a'), self.gadget.confirmed)
        self.assertEqual([['a']], self.confirms())

    def test_conflict_freezes(self):
        self.gadget.on_witness(self.witness('a'), 0)
        self.party.advance_to(1)
        self.gadget.on_witness(self.witness('b'), 1)
        self.assertTrue(self.gadget.frozen)
        self.assertIn('freeze', self.party.kinds())
        self.party.advance_to(5)
        self.assertEqual(EMPTY_LEDGER, self.gadget.confirmed)
        self.assertEqual([], self.confirms())
        # the conflicting witness is still passed on
        self.assertEqual(2, len(self.party.gossiped))

    def test_frozen_at_common_prefix(self):
        self.gadget.on_witness(self.witness('a'), 0)
        self.party.advance_to(2)
        self.gadget.on_witness(self.witness('a', 'b'), 2)
        self.gadget.on_witness(self.witness('a', 'c'), 3)
        self.party.advance_to(10)
        self.assertEqual(ledger('a'), self.gadget.confirmed)
        self.assertTrue(self.gadget.frozen)

    def test_extension_is_confirmed(self):
        self.gadget.on_witness(self.witness('a'), 0)
        self.gadget.on_witness(self.witness('a', 'b'), 1)
        self.party.advance_to(3)
        self.assertEqual([['a'], ['a', 'b']], self.confirms())
        self.assertFalse(self.gadget.frozen)

    def test_shorter_ledger_is_not_confirmed(self):
        self.gadget.on_witness(self.witness('a', 'b'), 0)
        self.gadget.on_witness(self.witness('a'), 1)
        self.party.advance_to(3)
        self.assertEqual([['a', 'b']], self.confirms())

    def test_rejected_witness(self):
        self.gadget.on_witness(self.witness('a', signers=(0, 1)), 0)
        self.assertEqual(['witness_reject'], self.party.kinds())
        self.assertEqual('below_quorum', self.party.records[0][2]['reason'])
        self.assertEqual([], self.party.gossiped)

    def test_other_instance_rejected(self):
        other = make_instance(4, epoch_tag=1, start_round=9)
        witness = Witness(other, tuple(
            make_vote(other, self.pki, i, 'a') for i in range(3)))
        self.gadget.on_witness(witness, 0)
        self.assertEqual('wrong_instance',
                         self.party.records[0][2]['reason'])

    def test_freeze_cancels_timers(self):
        self.gadget.on_witness(self.witness('a'), 0)
        self.gadget.freeze(1)
        self.assertEqual([], self.party.clock.getDelayedCalls())
        self.party.advance_to(5)
        self.assertEqual(EMPTY_LEDGER, self.gadget.confirmed)
        self.gadget.on_witness(self.witness('a', 'b'), 5)
        self.assertEqual(['witness', 'freeze'], self.party.kinds())

    def test_reset(self):
        self.gadget.on_witness(self.witness('a'), 0)
        self.party.advance_to(2)
        new_instance = make_instance(3, genesis=ledger('a'), epoch_tag=1,
                                     start_round=2)
        self.gadget.reset(new_instance, ledger('a'))
        self.assertFalse(self.gadget.stopped)
        witness = Witness(new_instance, tuple(
            make_vote(new_instance, self.pki, i, 'c') for i in range(2)))
        self.gadget.on_witness(witness, 2)
        self.party.advance_to(4)
        self.assertEqual(ledger('a', 'c'), self.gadget.confirmed)

    def test_bookmark_kind(self):
        gadget = FreezingGadget(self.party, self.instance, self.pki, wait=0,
                                confirm_kind='bookmark')
        gadget.on_witness(self.witness('a'), 0)
        self.party.advance_to(0)
        self.assertIn('bookmark', self.party.kinds())


class TestFrozenClient(unittest.TestCase):

    def setUp(self):
        self.pki = make_pki()
        self.instance = make_instance(4)
        self.trace = Trace()
        self.clock = task.Clock()
        self.network = Network(
            1, list(self.instance.valset),
            ClientSchedule({0: ClientWindow(), 1: ClientWindow()}),
            CorruptionSchedule(n=4), self.trace, pki=self.pki)
        self.client = FreezingClient(client(0), self.network, self.clock,
                                     self.trace, self.pki,
                                     instance=self.instance, wait=1)

    def witness(self, *txs):
        return Witness(self.instance, tuple(
            make_vote(self.instance, self.pki, i, *txs) for i in range(3)))

    def play(self, round_index, witness):
        self.network.open_round(round_index)
        self.network.inject([client(0)], witness, round_index, round_index)
        envelopes = [envelope for recipient, envelope
                     in self.network.step(round_index)
                     if recipient == client(0)]
        self.client.step(round_index, envelopes)
        self.clock.advance(round_index - self.clock.seconds())

    def events(self, kind):
        return [event for event in self.trace.events
                if event['kind'] == kind and event['party'] == 'c0']

    def test_keeps_gossiping_after_freeze(self):
        self.play(0, self.witness('a'))
        self.play(1, self.witness('b'))
        self.play(2, self.witness('a', 'c'))
        self.play(3, self.witness('b', 'd'))

        self.assertTrue(self.client.gadget.frozen)
        freezes = self.events('freeze')
        self.assertEqual([(1, 'conflict')],
                         [(e['round'], e['data']['reason']) for e in freezes])
        echoes = [event['round'] for event in self.events('send')
                  if event['data']['echo']]
        self.assertEqual([0, 1, 2, 3], echoes)
        self.assertEqual(EMPTY_LEDGER, self.client.confirmed)

    def test_echoes_reach_the_other_client(self):
        self.play(0, self.witness('a'))
        self.play(1, self.witness('b'))
        self.play(2, self.witness('a', 'c'))
        self.network.open_round(3)
        delivered = [(recipient, envelope.sender) for recipient, envelope
                     in self.network.step(3)]
        self.assertIn((client(1), client(0)), delivered)


if __name__ == '__main__':
    unittest.main()
