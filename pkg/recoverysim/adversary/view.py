""" What the adversary knows and what it may do.

    The view holds the keys of corrupted validators (issued when the
    corruption fires, never before), read access to every party's state
    object for corrupted parties, and all traffic on the network.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import logging
import random
from dataclasses import dataclass, field
from typing import List

from recoverysim.base.utils import log_text, round_header
from recoverysim.netsim.network import InjectionError


@dataclass(frozen=True)
class Injection:
    """ Deliver payload to recipients at delivery_round. """
    recipients: tuple
    payload: object
    delivery_round: int


@dataclass(frozen=True)
class DelayAssignment:
    """ Move the delivery of msg_id to recipient to delivery_round. """
    msg_id: int
    recipient: object
    delivery_round: int


@dataclass
class StrategyActions:
    """ The result of one strategy step. """
    injections: List[Injection] = field(default_factory=list)
    delays: List[DelayAssignment] = field(default_factory=list)

    def __bool__(self):
        return bool(self.injections or self.delays)


class AdversaryView:
    """ Attributes:
            network: the Network.
            corruption: the CorruptionSchedule.
            instance: the InstanceId of the original instance.
            keys: PartyId -> KeyHandle, corrupted validators only.
            rng: random.Random seeded by the scenario seed.
            round: the current round.
    """
    # pylint: disable=too-many-instance-attributes

    def __init__(self, network, parties, corruption, pki, **kwargs):
        """ Args:
                network: the Network.
                parties: PartyId -> Party for every party.
                corruption: the CorruptionSchedule.
                pki: the Pki (used only to issue corrupted keys).
                instance: the original InstanceId.
                seed: the scenario seed.
        """
        self.network = network
        self.corruption = corruption
        self.instance = kwargs['instance']
        self.keys = {}
        self.rng = random.Random(kwargs.get('seed', 0))
        self.round = -1
        self._parties = parties
        self._pki = pki
        self._vote_ledgers = {}
        self._corruption_listeners = []
        self._logger = logging.getLogger(__name__)

    @property
    def delta(self):
        return self.network.delta

    @property
    def r_maj(self):
        return self.corruption.r_maj

    @property
    def r_rec(self):
        return self.corruption.r_rec

    def v_new(self):
        return self.corruption.v_new()

    def add_corruption_listener(self, listener):
        """ listener(party_id, round) runs when a validator is corrupted. """
        self._corruption_listeners.append(listener)

    def on_environment(self, kind, party, round_index):
        if kind != 'corrupt' or party in self.keys:
            return
        self.keys[party] = self._pki.issue(party)
        log_text(self._logger.info, round_header(round_index),
                 f"adversary holds the key of {party}")
        for listener in self._corruption_listeners:
            listener(party, round_index)

    def observe(self, envelope):
        payload = envelope.payload
        if payload.kind != 'finality_vote':
            return
        ledgers = self._vote_ledgers.setdefault(payload.instance, [])
        if payload.ledger not in ledgers:
            ledgers.append(payload.ledger)

    # ------------------------------------------------------------------

    def clients(self):
        return sorted(p for p in self._parties if p.is_client)

    def validators(self):
        return sorted(p for p in self._parties if p.is_validator)

    def corrupted(self):
        return sorted(self.keys)

    def state_of(self, party_id):
        """ The state object of a corrupted party.

            Raises:
                KeyError: the party is not corrupted.
        """
        if party_id not in self.keys:
            raise KeyError(f"{party_id} is not corrupted")
        return self._parties[party_id]

    def signing_keys(self, instance=None):
        """ Keys of corrupted members of the instance's validator set. """
        valset = (instance or self.instance).valset
        return [self.keys[p] for p in sorted(self.keys) if p in valset]

    def holds_quorum(self, instance=None):
        valset = (instance or self.instance).valset
        return len(self.signing_keys(instance)) >= valset.quorum

    def vote_ledgers(self, instance=None):
        """ Distinct FinalityVote ledgers seen in traffic, oldest first. """
        return list(self._vote_ledgers.get(instance or self.instance, []))

    def longest_vote_ledger(self, instance=None):
        ledgers = self.vote_ledgers(instance)
        if not ledgers:
            return (instance or self.instance).genesis
        return max(ledgers, key=lambda ledger: (len(ledger), ledger.txs))

    def in_flight(self):
        return self.network.in_flight()

    # ------------------------------------------------------------------

    def apply(self, actions, round_index):
        """ Applies a strategy's actions; refused ones are logged and
            skipped.

            Returns: the number of actions applied.
        """
        applied = 0
        for injection in actions.injections:
            try:
                self.network.inject(injection.recipients, injection.payload,
                                    injection.delivery_round, round_index)
                applied += 1
            except InjectionError as err:
                log_text(self._logger.warning, round_header(round_index),
                         f"injection refused: {err}")
        for delay in actions.delays:
            try:
                self.network.set_delivery(delay.msg_id, delay.recipient,
                                          delay.delivery_round)
                applied += 1
            except InjectionError as err:
                log_text(self._logger.warning, round_header(round_index),
                         f"delay refused: {err}")
        return applied
