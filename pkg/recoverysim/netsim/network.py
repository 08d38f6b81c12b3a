""" Discrete-round synchronous network.

    Every message sent by a party is addressed to every other party
    that has not left the system.  The delivery round of each
    (message, recipient) pair is chosen by a delay policy (the
    adversary) between 1 and delta rounds after the sent round.  A
    client that is asleep when an honest party sends gets the message
    between 1 and delta rounds after it wakes, and injections arrive no
    earlier than its wake round.  Messages of corrupted senders are
    not kept for it.
    Parties that hold a gossip message for the first time echo it, so
    anything an honest awake party holds at round t reaches every
    honest party p by max(t, wake_p) + delta.

    Deliveries within a round are ordered by (msg_id, recipient).

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import collections
import functools
import logging
from dataclasses import dataclass

from recoverysim.base import RecoverysimHarnessError
from recoverysim.base.utils import canonical_bytes, digest, log_text, \
    round_header


class InjectionError(ValueError):
    """ Exception: the network refused an adversary action. """
    def __init__(self, message):
        super().__init__()
        self.message = message

    def __str__(self):
        return self.message


class Payload:
    """ Base class of everything carried by an Envelope.

        Subclasses are frozen dataclasses that provide canonical().
    """
    kind = 'payload'
    gossip = True

    def canonical(self):
        raise NotImplementedError()

    @functools.cached_property
    def digest(self):
        return digest(self.canonical())

    def signatures(self):
        """ Yields (signer, signed bytes, Signature) for every signature
            carried by the payload.
        """
        return iter(())

    def describe(self):
        """ A small JSON-ready summary used in trace records. """
        return {}


@dataclass(frozen=True)
class RecoverMessage(Payload):
    """ The environment's <recover, V_new> message. """
    kind = 'recover'
    gossip = False

    v_new: object
    round_sent: int

    def canonical(self):
        return canonical_bytes('recover', self.v_new, self.round_sent)

    def describe(self):
        return {'v_new': self.v_new.to_list()}


@dataclass(frozen=True)
class Envelope:
    """ Attributes:
            msg_id: unique per scenario.
            sender: PartyId, or None for the environment and the adversary.
            payload: a Payload.
            sent_round: the round it was handed to the network.
    """
    msg_id: int
    sender: object
    payload: object
    sent_round: int


def default_delay(delta):
    """ The delay policy used when no adversary chooses: always delta. """
    def _policy(envelope, recipient, round_index):
        # pylint: disable=unused-argument
        return delta
    return _policy


class Network:
    """ The network of one scenario.

        Attributes:
            delta: the synchrony bound in rounds.
            current_round: the last round passed to step() (-1 before).
    """
    # pylint: disable=too-many-instance-attributes

    def __init__(self, delta, validators, client_schedule,
                 corruption_schedule, trace, **kwargs):
        """ Network initialization

            Args:
                delta: synchrony bound (>= 1).
                validators: list of validator PartyIds.
                client_schedule: a ClientSchedule.
                corruption_schedule: a CorruptionSchedule.
                trace: the Trace receiving network events.
                delay_policy: callable(envelope, recipient, round) -> rounds.
                pki: the Pki used to gate adversary injections.
                echo_clients: False disables client gossip. (Default: True)
        """
        if delta < 1:
            raise ValueError(f"delta must be at least 1: {delta}")
        self.delta = delta
        self.current_round = -1

        self._validators = list(validators)
        self._clients = client_schedule
        self._corruption = corruption_schedule
        self._trace = trace
        self._pki = kwargs.get('pki')
        self._delay_policy = kwargs.get('delay_policy') or \
            default_delay(delta)
        self.echo_clients = kwargs.get('echo_clients', True)

        self._next_msg_id = 0
        self._envelopes = {}
        self._pending = collections.defaultdict(set)
        self._schedule = {}
        self._held = collections.defaultdict(set)
        self._sent = collections.defaultdict(set)
        self._observers = []
        self._environment_listeners = []
        self._recover_message = None
        self._environment_deliveries = []
        self._stepped = False

        self._logger = logging.getLogger(__name__)

    def add_observer(self, observer):
        """ observer(envelope) is called for every new envelope. """
        self._observers.append(observer)

    def add_environment_listener(self, listener):
        """ listener(kind, party, round) is called for corrupt, kill,
            wake and sleep events.
        """
        self._environment_listeners.append(listener)

    def set_delay_policy(self, policy):
        self._delay_policy = policy

    # ------------------------------------------------------------------
    # liveness of parties

    def is_killed(self, party):
        return party.is_validator and not self._corruption.is_alive(
            party.index, max(self.current_round, 0))

    def is_awake(self, party, round_index):
        """ Validators are awake until killed; clients follow their
            schedule.
        """
        if party.is_validator:
            return self._corruption.is_alive(party.index, round_index)
        return self._clients.awake(party, round_index)

    def is_corrupted(self, party, round_index):
        return party.is_validator and \
            self._corruption.is_corrupted(party.index, round_index)

    def parties(self):
        return self._validators + self._clients.clients()

    def _base_round(self, recipient, round_index, backlog=True):
        """ Earliest round from which recipient can hold a message sent
            at round_index, or None if it never will.

            A client that is still asleep gets a backlogged message from
            its wake round on.  For honest senders this is the same
            schedule as the sender handing its log to the client again
            at the wake round, within delta.  Without backlog the
            message is lost to the client unless it lands after the
            wake round.
        """
        if recipient.is_validator:
            if not self._corruption.is_alive(recipient.index, round_index):
                return None
            return round_index
        window = self._clients.window(recipient)
        if window.sleep_round is not None and \
                round_index >= window.sleep_round:
            return None
        if backlog:
            return max(round_index, window.wake_round)
        return round_index

    def _backlogged(self, envelope):
        """ Adversary injections and messages from senders honest at
            the send round are backlogged.
        """
        return envelope.sender is None or \
            not self.is_corrupted(envelope.sender, envelope.sent_round)

    # ------------------------------------------------------------------
    # sending

    def _new_envelope(self, sender, payload, round_index):
        envelope = Envelope(self._next_msg_id, sender, payload, round_index)
        self._next_msg_id += 1
        self._envelopes[envelope.msg_id] = envelope
        return envelope

    def _enqueue(self, msg_id, recipient, delivery_round):
        key = (msg_id, recipient)
        self._schedule[key] = delivery_round
        self._pending[delivery_round].add(key)

    def _first_open_round(self):
        """ The earliest round whose deliveries have not been handed out. """
        return self.current_round + 1 if self._stepped \
            else max(self.current_round, 0)

    def _clamp(self, delay):
        return min(max(int(delay), 1), self.delta)

    def broadcast(self, sender, payload, round_index, recipients=None):
        """ Sends payload from sender to every other party (or to the
            given recipients).

            A party never sends the same payload twice; the second
            attempt is a no-op.

            Returns: the msg_id, or None if nothing was sent.
        """
        if not self.is_awake(sender, round_index):
            log_text(self._logger.warning,
                     round_header(round_index, sender),
                     f"send rejected, party is not awake: {payload.kind}")
            return None
        if payload.digest in self._sent[sender]:
            return None

        first_hold = payload.digest not in self._held[sender]
        self._sent[sender].add(payload.digest)
        self._held[sender].add(payload.digest)

        envelope = self._new_envelope(sender, payload, round_index)
        backlog = self._backlogged(envelope)
        targets = recipients if recipients is not None else self.parties()
        for recipient in targets:
            if recipient == sender:
                continue
            base = self._base_round(recipient, round_index, backlog)
            if base is None:
                continue
            delay = self._clamp(
                self._delay_policy(envelope, recipient, round_index))
            if recipient.is_client and \
                    base + delay < self._clients.window(recipient).wake_round:
                continue
            self._enqueue(envelope.msg_id, recipient, base + delay)

        self._trace.record(round_index, sender, 'send', {
            'msg': envelope.msg_id,
            'digest': payload.digest[:16],
            'type': payload.kind,
            'gossip': payload.gossip,
            'echo': not first_hold,
            **payload.describe(),
        })
        for observer in self._observers:
            observer(envelope)
        return envelope.msg_id

    def echo_on_receipt(self, party, envelope, round_index):
        """ Re-broadcasts a gossip message the party just received.

            Duplicate receipts never reach this point (step() drops
            them), and a party never sends a payload twice.
        """
        if not envelope.payload.gossip:
            return None
        if party.is_client and not self.echo_clients:
            return None
        return self.broadcast(party, envelope.payload, round_index)

    def inject(self, recipients, payload, delivery_round, round_index=None):
        """ Adversary injection of payload to the chosen recipients.

            Raises:
                InjectionError: a signature does not verify, or the
                    delivery round is in the past.
        """
        round_index = self.current_round if round_index is None \
            else round_index
        if delivery_round < max(round_index, self._first_open_round()):
            raise InjectionError(
                f"delivery round {delivery_round} is before {round_index}")
        for signer, message, sig in payload.signatures():
            if self._pki is None or \
                    not self._pki.verify(signer, message, sig):
                raise InjectionError(
                    f"{payload.kind} carries a signature of {signer} "
                    f"the adversary cannot produce")

        envelope = self._new_envelope(None, payload, round_index)
        targets = []
        for recipient in sorted(recipients):
            base = self._base_round(recipient, delivery_round)
            if base is None:
                continue
            self._enqueue(envelope.msg_id, recipient, base)
            targets.append(str(recipient))
        self._trace.record(round_index, None, 'inject', {
            'msg': envelope.msg_id,
            'digest': payload.digest[:16],
            'type': payload.kind,
            'to': targets,
            'at': delivery_round,
            **payload.describe(),
        })
        for observer in self._observers:
            observer(envelope)
        return envelope.msg_id

    def set_delivery(self, msg_id, recipient, delivery_round):
        """ Moves one pending delivery, within the delta bound.

            Raises:
                InjectionError: unknown delivery or bound violated.
        """
        key = (msg_id, recipient)
        if key not in self._schedule:
            raise InjectionError(f"no pending delivery {msg_id}->{recipient}")
        envelope = self._envelopes[msg_id]
        base = self._base_round(recipient, envelope.sent_round,
                                self._backlogged(envelope))
        earliest = max(base + 1, self._first_open_round())
        latest = base + self.delta if envelope.sender is not None \
            else delivery_round
        if not earliest <= delivery_round <= latest:
            raise InjectionError(
                f"delivery of {msg_id} to {recipient} at {delivery_round} "
                f"is outside [{earliest}, {latest}]")
        old_round = self._schedule[key]
        self._pending[old_round].discard(key)
        self._enqueue(msg_id, recipient, delivery_round)

    def in_flight(self):
        """ Yields (envelope, recipient, delivery round) for every
            pending delivery.
        """
        for (msg_id, recipient), delivery_round in sorted(
                self._schedule.items(),
                key=lambda item: (item[1], item[0][0],
                                  item[0][1].sort_key())):
            yield self._envelopes[msg_id], recipient, delivery_round

    def holds(self, party, payload):
        return payload.digest in self._held[party]

    # ------------------------------------------------------------------
    # the round step

    def _notify(self, kind, party, round_index):
        self._trace.record(round_index, party, kind, {})
        for listener in self._environment_listeners:
            listener(kind, party, round_index)

    def _environment(self, round_index):
        """ Corruptions, kills, wake/sleep events and the recover message
            due this round.  Returns the recover deliveries.
        """
        schedule = self._corruption
        for index in sorted(schedule.corrupt_round):
            if schedule.corrupt_round[index] == round_index:
                self._notify('corrupt', self._validators[index], round_index)

        for party in self._clients.clients():
            window = self._clients.window(party)
            if window.wake_round == round_index:
                self._notify('wake', party, round_index)
            if window.sleep_round == round_index:
                self._notify('sleep', party, round_index)

        deliveries = []
        if schedule.r_rec is None or round_index < schedule.r_rec:
            return deliveries

        if round_index == schedule.r_rec:
            for index in sorted(schedule.kill_set):
                self._notify('kill', self._validators[index], round_index)
            self._recover_message = RecoverMessage(schedule.v_new(),
                                                   round_index)
            recipients = [p for p in self.parties()
                          if self.is_awake(p, round_index)]
        else:
            recipients = [p for p in self._clients.clients()
                          if self._clients.window(p).wake_round ==
                          round_index]

        if recipients:
            envelope = self._new_envelope(None, self._recover_message,
                                          round_index)
            for recipient in recipients:
                self._trace.record(round_index, recipient, 'recover', {
                    'msg': envelope.msg_id,
                    **self._recover_message.describe(),
                })
                deliveries.append((recipient, envelope))
        return deliveries

    def open_round(self, round_index):
        """ Fires this round's environment events (corruptions, wake and
            sleep, kills and the recover message).  The adversary acts
            between open_round() and step().

            Raises:
                RecoverysimHarnessError: rounds out of order.
        """
        if round_index != self.current_round + 1:
            raise RecoverysimHarnessError(
                f"network opened round {round_index} after "
                f"round {self.current_round}")
        self.current_round = round_index
        self._stepped = False
        self._environment_deliveries = self._environment(round_index)

    def step(self, round_index):
        """ Returns the deliveries due this round, ordered by
            (msg_id, recipient), followed by the recover deliveries.

            Opens the round first if open_round() was not called.

            Returns: a list of (recipient, Envelope).  Duplicates and
                deliveries to parties that are no longer awake are
                dropped.

            Raises:
                RecoverysimHarnessError: rounds out of order.
        """
        if round_index == self.current_round + 1:
            self.open_round(round_index)
        elif round_index != self.current_round or self._stepped:
            raise RecoverysimHarnessError(
                f"network stepped to round {round_index} after "
                f"round {self.current_round}")
        self._stepped = True

        environment, self._environment_deliveries = \
            self._environment_deliveries, []

        deliveries = []
        keys = self._pending.pop(round_index, set())
        for msg_id, recipient in sorted(
                keys, key=lambda key: (key[0], key[1].sort_key())):
            del self._schedule[(msg_id, recipient)]
            if not self.is_awake(recipient, round_index):
                continue
            envelope = self._envelopes[msg_id]
            payload = envelope.payload
            if payload.digest in self._held[recipient]:
                continue
            self._held[recipient].add(payload.digest)
            self._trace.record(round_index, recipient, 'deliver', {
                'msg': msg_id,
                'digest': payload.digest[:16],
                'type': payload.kind,
                'gossip': payload.gossip,
            })
            deliveries.append((recipient, envelope))

        return deliveries + environment
