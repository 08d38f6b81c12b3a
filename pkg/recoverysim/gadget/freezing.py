""" The freezing gadget.

    A party running the gadget adds the C-value of every witness it
    sees to its set of seen ledgers, gossips the witness and waits.
    When the wait is over it confirms the ledger if it is longer than
    the confirmed one and consistent with everything seen so far.  Two
    conflicting witnesses therefore freeze the party at their common
    prefix, while it keeps gossiping.

    The same state machine bookmarks ledgers on validators of the
    recovery gadget; only the wait and the trace event differ.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import logging
from dataclasses import dataclass, field
from typing import List

from recoverysim.core.ledger import Ledger, consistent, is_prefix
from recoverysim.internal.witness import VotePool, WitnessError, \
    witness_consume, witness_produce
from recoverysim.netsim.party import Party


@dataclass
class FreezeClientState:
    """ Attributes:
            seen: the set M of ledgers extracted from witnesses.
            confirmed: LOG_final (LOG_ack on validators).
            timers: pending (due round, candidate) pairs, in due order.
            wait: rounds between seeing a ledger and confirming it.
    """
    seen: set = field(default_factory=set)
    confirmed: Ledger = Ledger()
    timers: List[tuple] = field(default_factory=list)
    wait: int = 0


class FreezingGadget:
    """ on_witness / on_timer over one internal protocol instance.

        Attributes:
            party: the Party owning the gadget.
            instance: the InstanceId whose witnesses are accepted.
            state: the FreezeClientState.
            confirm_kind: trace kind of a confirmation ('confirm' or
                'bookmark').
            frozen: True once seen holds two inconsistent ledgers.
            stopped: True after freeze(); no witness or timer is handled.
    """
    # pylint: disable=too-many-instance-attributes

    def __init__(self, party, instance, pki, wait, confirm_kind='confirm'):
        self.party = party
        self.instance = instance
        self.confirm_kind = confirm_kind
        self.state = FreezeClientState(seen={instance.genesis},
                                       confirmed=instance.genesis,
                                       wait=wait)
        self.frozen = False
        self.stopped = False
        self._pki = pki
        self._frontier = [instance.genesis]
        self._calls = []
        self._logger = logging.getLogger(__name__)

    @property
    def confirmed(self):
        return self.state.confirmed

    def has_seen(self, ledger):
        return ledger in self.state.seen

    def _add_seen(self, ledger, round_index):
        if ledger in self.state.seen:
            return
        self.state.seen.add(ledger)
        for maximal in self._frontier:
            if not consistent(maximal, ledger) and not self.frozen:
                self.frozen = True
                self.party.record(round_index, 'freeze', reason='conflict',
                                  instance=self.instance.tag,
                                  ledgers=[maximal.to_list(),
                                           ledger.to_list()])
                self.party.log(round_index,
                               f"conflicting ledgers {maximal} and {ledger}",
                               logging.INFO)
                break
        if any(is_prefix(ledger, maximal) for maximal in self._frontier):
            return
        self._frontier = [maximal for maximal in self._frontier
                          if not is_prefix(maximal, ledger)]
        self._frontier.append(ledger)

    def on_witness(self, witness, round_index):
        """ Handles a witness received or produced at round_index. """
        if self.stopped:
            return
        try:
            ledger = witness_consume(witness, self._pki,
                                     expected_instance=self.instance)
        except WitnessError as err:
            self.party.record(round_index, 'witness_reject',
                              reason=err.reason, instance=witness.instance.tag)
            self.party.log(round_index, f"witness rejected: {err}")
            return

        self.party.record(round_index, 'witness', instance=self.instance.tag,
                          ledger=ledger.to_list())
        self._add_seen(ledger, round_index)
        self.party.gossip(witness, round_index)

        due = round_index + self.state.wait
        self.state.timers.append((due, ledger))
        self._calls.append(
            self.party.call_at(due, self.on_timer, ledger, due))

    def on_timer(self, candidate, round_index):
        """ Confirms candidate if it is longer than the confirmed ledger
            and consistent with every seen ledger.

            Returns: the new confirmed Ledger, or None.
        """
        if (round_index, candidate) in self.state.timers:
            self.state.timers.remove((round_index, candidate))
        self._calls = [call for call in self._calls if call.active()]
        if self.stopped:
            return None
        if len(candidate) <= len(self.state.confirmed):
            return None
        if not all(consistent(candidate, seen) for seen in self._frontier):
            return None
        self.state.confirmed = candidate
        self.party.record(round_index, self.confirm_kind,
                          instance=self.instance.tag,
                          ledger=candidate.to_list())
        return candidate

    def freeze(self, round_index, reason='recover'):
        """ Stops the gadget and discards its timers. """
        if self.stopped:
            return
        self.stop()
        self.party.record(round_index, 'freeze', reason=reason,
                          instance=self.instance.tag,
                          ledger=self.state.confirmed.to_list())

    def stop(self):
        self.stopped = True
        for call in self._calls:
            if call.active():
                call.cancel()
        self._calls = []
        self.state.timers = []

    def reset(self, instance, ledger):
        """ Restarts the gadget on a new instance from ledger. """
        self.stop()
        self.instance = instance
        self.state = FreezeClientState(seen={ledger}, confirmed=ledger,
                                       wait=self.state.wait)
        self._frontier = [ledger]
        self.frozen = False
        self.stopped = False


class GadgetParty(Party):
    """ A party that pools FinalityVotes and feeds witnesses to a gadget.

        Votes are pooled per instance, so votes of an instance the party
        has not joined yet are kept until it does.  After each inbox the
        pool of the current instance runs W; a witness with a C-value
        the gadget has not seen goes through on_witness like a received
        one.
    """

    def __init__(self, party_id, network, clock, trace, pki):
        super().__init__(party_id, network, clock, trace)
        self.pki = pki
        self.gadget = None
        self._pools = {}
        self._dirty = set()

    def pool(self, instance):
        if instance not in self._pools:
            self._pools[instance] = VotePool(instance, self.pki)
        return self._pools[instance]

    def admit_vote(self, vote):
        if self.pool(vote.instance).add(vote):
            self._dirty.add(vote.instance)

    def route(self, payload, round_index, inbox):
        """ Dispatches one delivered payload. """
        if payload.kind == 'finality_vote':
            if self.gadget is not None:
                self.admit_vote(payload)
        elif payload.kind == 'witness':
            if self.gadget is None:
                return
            for vote in payload.votes:
                self.admit_vote(vote)
            if payload.instance == self.gadget.instance:
                self.gadget.on_witness(payload, round_index)
        else:
            inbox.append(payload)

    def produce_witness(self, round_index):
        """ Runs W over the current instance's pool if it changed. """
        gadget = self.gadget
        if gadget is None or gadget.stopped or \
                gadget.instance not in self._dirty:
            return None
        self._dirty.discard(gadget.instance)
        witness = witness_produce(self.pool(gadget.instance))
        if witness is None:
            return None
        ledger = witness_consume(witness, self.pki)
        if gadget.has_seen(ledger):
            return None
        gadget.on_witness(witness, round_index)
        return witness

    def halt(self, round_index):
        super().halt(round_index)
        if self.gadget is not None:
            self.gadget.stop()

    def receive(self, round_index, envelopes):
        """ Echoes and routes this round's deliveries.

            Returns: the payloads left for the party's own handling.
        """
        inbox = []
        for envelope in envelopes:
            self.echo(envelope, round_index)
            self.route(envelope.payload, round_index, inbox)
        return inbox


class ProtocolValidator(GadgetParty):
    """ A validator running the internal protocol. """

    def __init__(self, party_id, network, clock, trace, pki, **kwargs):
        """ Args:
                key: the validator's KeyHandle.
                protocol_factory: callable(instance, party_id, key)
                    returning a CertifiableProtocol.
                instance: the initial InstanceId.
        """
        super().__init__(party_id, network, clock, trace, pki)
        self.key = kwargs['key']
        self.protocol_factory = kwargs['protocol_factory']
        self.protocol = self.protocol_factory(kwargs['instance'], party_id,
                                              self.key)

    def on_transactions(self, txs, round_index):
        if self.protocol is not None:
            self.protocol.add_transactions(txs, round_index)

    def run_protocol(self, round_index, inbox):
        if self.protocol is None:
            return
        for payload in self.protocol.step(round_index, inbox):
            self.gossip(payload, round_index)
            if payload.kind == 'finality_vote':
                self.record(round_index, 'finalize',
                            instance=payload.instance.tag,
                            ledger=payload.ledger.to_list())
                if self.gadget is not None:
                    self.admit_vote(payload)

    def step(self, round_index, envelopes, txs):
        """ One validator round: inbox, transactions, protocol, W. """
        if self.halted:
            return
        inbox = self.receive(round_index, envelopes)
        if txs:
            self.on_transactions(txs, round_index)
        self.run_protocol(round_index, inbox)
        self.produce_witness(round_index)

    def halt(self, round_index):
        super().halt(round_index)
        self.protocol = None


class FreezingClient(GadgetParty):
    """ A client running the standalone freezing gadget. """

    def __init__(self, party_id, network, clock, trace, pki, **kwargs):
        """ Args:
                instance: the InstanceId.
                wait: the confirmation wait in rounds.
        """
        super().__init__(party_id, network, clock, trace, pki)
        self.gadget = FreezingGadget(self, kwargs['instance'], pki,
                                     kwargs['wait'])

    @property
    def confirmed(self):
        return self.gadget.confirmed

    def step(self, round_index, envelopes):
        if self.halted:
            return
        self.receive(round_index, envelopes)
        self.produce_witness(round_index)
