""" The recovery gadget.

    Before r_rec validators bookmark ledgers exactly as freezing clients
    confirm them, with a wait of delta, while clients confirm with a
    wait of three delta.  Every client ledger is then a prefix of every
    honest bookmark.

    At r_rec the environment sends <recover, V_new>.  Members of V_new
    broadcast their bookmark with Dolev-Strong; at r_rec + u_BC each
    computes the longest ledger extended by more than half of the
    delivered bookmarks, gossips a genesis vote for the new instance
    and restarts the internal protocol on it with every transaction it
    has seen that the new genesis lacks.  Clients freeze at <recover>
    and restart once more than half of V_new voted for the same
    instance.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import enum
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

from recoverysim.base import RecoverysimScenarioError
from recoverysim.base.utils import canonical_bytes
from recoverysim.core.ledger import Transaction, majority_prefix
from recoverysim.gadget.broadcast import DolevStrongRelay
from recoverysim.gadget.freezing import FreezingClient, FreezingGadget, \
    ProtocolValidator
from recoverysim.internal.messages import InstanceId
from recoverysim.netsim.network import Payload

RECOVERED_EPOCH = 1


class Phase(enum.Enum):
    """ Validator phases around r_rec. """
    NORMAL = 'normal'
    BROADCASTING = 'broadcasting'
    RESTARTED = 'restarted'


@dataclass(frozen=True)
class GenesisVote(Payload):
    """ A V_new member's vote for the instance started after recovery. """
    kind = 'genesis_vote'

    new_instance: InstanceId
    sig: object

    @staticmethod
    def signed_bytes(instance):
        return canonical_bytes('genesis', instance)

    @classmethod
    def make(cls, instance, key):
        return cls(instance, key.sign(cls.signed_bytes(instance)))

    @property
    def signer(self):
        return self.sig.signer

    def canonical(self):
        return canonical_bytes('genesis_vote', self.new_instance, self.sig)

    def signatures(self):
        yield (self.signer, self.signed_bytes(self.new_instance), self.sig)

    def describe(self):
        return {'instance': self.new_instance.tag, 'signer': str(self.signer),
                'len': len(self.new_instance.genesis)}


def compute_new_genesis(delivered, set_size):
    """ L_rec from the broadcast outcome.

        Args:
            delivered: sender -> Ledger, or None where nothing was
                delivered.
            set_size: |V_new|.

        Returns: the longest Ledger extended by more than set_size / 2
            of the delivered bookmarks.
    """
    ledgers = [ledger for _, ledger in sorted(delivered.items())
               if ledger is not None]
    return majority_prefix(ledgers, set_size)


def observed_transactions(payloads, round_index):
    """ Transactions carried by the proposals among payloads.  Votes and
        witnesses are left out: their ledgers may be adversary forks.
    """
    txs = []
    for payload in payloads:
        if payload.kind == 'proposal':
            txs.extend(Transaction(tx_id, submit_round=round_index)
                       for tx_id in payload.block.txs)
    return txs


@dataclass
class RecoveryValidatorState:
    """ Attributes:
            phase: normal, then broadcasting at r_rec, then restarted.
            pending_txs: tx id -> Transaction received from the
                environment or seen in a proposal.
    """
    phase: Phase = Phase.NORMAL
    pending_txs: Dict[str, object] = field(default_factory=dict)


class RecoveryValidator(ProtocolValidator):
    """ A validator running the recovery gadget.

        Attributes:
            bookmark_override: set by the adversary on corrupted
                validators; callable(party_id, bookmark, round) returning
                the Ledger to broadcast instead, or None.
    """
    # pylint: disable=too-many-instance-attributes

    def __init__(self, party_id, network, clock, trace, pki, **kwargs):
        """ Args:
                key, protocol_factory, instance: as for ProtocolValidator.
                wait: the bookmark wait (delta).
                delta: the synchrony bound.
                r_rec: the configured recovery round, or None.
        """
        super().__init__(party_id, network, clock, trace, pki, **kwargs)
        self.delta = kwargs['delta']
        self.r_rec = kwargs.get('r_rec')
        self.gadget = FreezingGadget(self, kwargs['instance'], pki,
                                     kwargs['wait'], confirm_kind='bookmark')
        self.state = RecoveryValidatorState()
        self.relay = None
        self.bookmark_override = None
        self._logger = logging.getLogger(__name__)

    @property
    def bookmarked(self):
        """ LOG_ack. """
        return self.gadget.confirmed

    def on_transactions(self, txs, round_index):
        for tx in txs:
            self.state.pending_txs[tx.tx_id] = tx
        super().on_transactions(txs, round_index)

    def step(self, round_index, envelopes, txs):
        self.validator_part1_step(round_index, envelopes, txs)

    def validator_part1_step(self, round_index, envelopes, txs):
        """ Bookmarking, the internal protocol and the recovery messages
            of one round.
        """
        if self.halted:
            return
        inbox = []
        for payload in self.receive(round_index, envelopes):
            if payload.kind == 'recover':
                self.on_recover_validator(payload, round_index)
            elif payload.kind == 'signature_chain':
                if self.relay is not None:
                    self.relay.receive(payload)
            elif payload.kind != 'genesis_vote':
                inbox.append(payload)
        if self.halted:
            return
        for tx in observed_transactions(inbox, round_index):
            self.state.pending_txs.setdefault(tx.tx_id, tx)
        if txs:
            self.on_transactions(txs, round_index)
        self.run_protocol(round_index, inbox)
        self.produce_witness(round_index)

    def on_recover_validator(self, message, round_index):
        """ Starts the broadcast of LOG_ack at r_rec.

            Raises:
                RecoverysimScenarioError: <recover> outside r_rec.
        """
        if message.round_sent != round_index or \
                (self.r_rec is not None and round_index != self.r_rec):
            raise RecoverysimScenarioError(
                f"<recover> delivered to {self.party_id} at round "
                f"{round_index}, recovery is configured for {self.r_rec}")
        if self.party_id not in message.v_new:
            self.halt(round_index)
            return
        if self.state.phase is not Phase.NORMAL:
            return

        bookmark = self.gadget.confirmed
        value = bookmark
        if self.bookmark_override is not None:
            override = self.bookmark_override(self.party_id, bookmark,
                                              round_index)
            if override is not None:
                value = override

        self.state.phase = Phase.BROADCASTING
        self.gadget.stop()
        self.protocol = None
        self.relay = DolevStrongRelay(self.party_id, self.key, self.pki,
                                      message.v_new, self.delta, round_index)
        chain = self.relay.start(value)
        self.record(round_index, 'ds_broadcast', value=value.to_list(),
                    bookmark=bookmark.to_list())
        self.send(chain, self._other_relays(), round_index)
        for ds_round_k in range(1, self.relay.rounds + 1):
            self.call_at(self.relay.boundary(ds_round_k), self._ds_boundary,
                         ds_round_k)

    def _other_relays(self):
        return [member for member in self.relay.valset
                if member != self.party_id]

    def _ds_boundary(self, ds_round_k):
        if self.halted:
            return
        round_index = self.relay.boundary(ds_round_k)
        for chain in self.relay.ds_round(ds_round_k):
            self.send(chain, self._other_relays(), round_index)
        if ds_round_k == self.relay.rounds:
            self._finish_broadcast(round_index)

    def _finish_broadcast(self, round_index):
        delivered = self.relay.delivered()
        for sender in sorted(delivered):
            value = delivered[sender]
            self.record(round_index, 'ds_deliver', sender=str(sender),
                        value=None if value is None else value.to_list())
        v_new = self.relay.valset
        l_rec = compute_new_genesis(delivered, len(v_new))
        instance = InstanceId(RECOVERED_EPOCH, l_rec, v_new, round_index)
        self.record(round_index, 'new_genesis', instance=instance.tag,
                    ledger=l_rec.to_list())
        self.log(round_index, f"new genesis {l_rec} ({instance.tag})",
                 logging.INFO)

        vote = GenesisVote.make(instance, self.key)
        self.record(round_index, 'genesis_vote', instance=instance.tag)
        self.gossip(vote, round_index)
        self.restart_validator(instance, round_index)

    def restart_validator(self, instance, round_index):
        """ Runs the internal protocol on the new instance and resumes
            bookmarking from its genesis.
        """
        self.state.phase = Phase.RESTARTED
        self.gadget.reset(instance, instance.genesis)
        self.record(round_index, 'restart', instance=instance.tag,
                    ledger=instance.genesis.to_list())
        self.record(round_index, 'bookmark', instance=instance.tag,
                    ledger=instance.genesis.to_list())

        self.protocol = self.protocol_factory(instance, self.party_id,
                                              self.key)
        pending = sorted((tx for tx_id, tx in self.state.pending_txs.items()
                          if tx_id not in instance.genesis),
                         key=lambda tx: (tx.submit_round, tx.tx_id))
        if pending:
            self.protocol.add_transactions(pending, round_index)
        self.run_protocol(round_index, [])
        self._dirty.add(instance)
        self.produce_witness(round_index)


@dataclass
class RecoveryClientState:
    """ Attributes:
            frozen_at_rec: <recover> was received.
            v_new: the validator set named by <recover>.
            genesis_votes: InstanceId -> {signer: GenesisVote}.
            restart_round: the round the client adopted the new genesis.
    """
    frozen_at_rec: bool = False
    v_new: Optional[object] = None
    genesis_votes: Dict[object, dict] = field(default_factory=dict)
    restart_round: Optional[int] = None


class RecoveryClient(FreezingClient):
    """ A client running the recovery gadget. """

    def __init__(self, party_id, network, clock, trace, pki, **kwargs):
        super().__init__(party_id, network, clock, trace, pki, **kwargs)
        self.state = RecoveryClientState()

    def step(self, round_index, envelopes):
        if self.halted:
            return
        inbox = self.receive(round_index, envelopes)
        self.client_recover_step(round_index, inbox)
        self.produce_witness(round_index)

    def client_recover_step(self, round_index, inbox):
        """ Freezes at <recover>, tallies genesis votes and restarts on
            the first instance voted by more than half of V_new.

            Raises:
                RecoverysimScenarioError: two instances reached a
                    majority of V_new.
        """
        for payload in inbox:
            if payload.kind == 'recover':
                self._on_recover(payload, round_index)
            elif payload.kind == 'genesis_vote':
                self._on_genesis_vote(payload)
        if self.state.frozen_at_rec and self.state.restart_round is None:
            self._try_restart(round_index)

    def _on_recover(self, message, round_index):
        if self.state.frozen_at_rec:
            return
        self.state.frozen_at_rec = True
        self.state.v_new = message.v_new
        self.gadget.freeze(round_index, reason='recover')

    def _on_genesis_vote(self, vote):
        if self.state.restart_round is not None:
            return
        instance = vote.new_instance
        if vote.signer not in instance.valset or not self.pki.verify(
                vote.signer, GenesisVote.signed_bytes(instance), vote.sig):
            self._logger.debug('%s: genesis vote of %s dropped',
                               self.party_id, vote.signer)
            return
        self.state.genesis_votes.setdefault(instance, {})[vote.signer] = vote

    def _try_restart(self, round_index):
        v_new = self.state.v_new
        ready = sorted((instance for instance, votes
                        in self.state.genesis_votes.items()
                        if instance.valset == v_new and
                        len(votes) >= v_new.quorum),
                       key=lambda instance: instance.tag)
        if len(ready) > 1:
            raise RecoverysimScenarioError(
                f"{self.party_id} saw majorities of V_new vote for "
                f"{', '.join(instance.tag for instance in ready)}")
        if ready:
            self.adopt(ready[0], round_index)

    def adopt(self, instance, round_index):
        """ Sets LOG_final to the new genesis and follows the new
            instance from there.
        """
        previous = self.gadget.confirmed
        self.state.restart_round = round_index
        self.gadget.reset(instance, instance.genesis)
        self.record(round_index, 'restart', instance=instance.tag,
                    ledger=instance.genesis.to_list(),
                    previous=previous.to_list())
        if instance.genesis != previous:
            self.record(round_index, 'confirm', instance=instance.tag,
                        ledger=instance.genesis.to_list())
        self.log(round_index, f"restarted on {instance.tag}", logging.INFO)
        self._dirty.add(instance)
