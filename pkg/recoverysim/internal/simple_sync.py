""" SimpleSync, a leader-based certified chain.

    Time after the instance start is cut into epochs of 2*delta rounds
    and the leader of epoch e is valset[e mod n].  At the start of its
    epoch the leader proposes a block with every transaction it knows
    that is not yet on its longest certified chain, extending that
    chain.  Each validator votes once per epoch, for the first proposal
    of the epoch's leader that extends its own longest certified chain.
    A block with a quorum of votes is certified.  A validator finalizes
    a certified block, and its ancestors, 2*delta rounds after it first
    saw it certified unless by then it has seen a certified block off
    that chain.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict

from recoverysim.core.ledger import Ledger
from recoverysim.internal.messages import Block, BlockVote, Proposal
from recoverysim.internal.protocol import CertifiableProtocol


def default_latency(delta, n):
    """ The configured u_PI of SimpleSync: 8 * delta * (n + 2). """
    return 8 * delta * (n + 2)


@dataclass
class SimpleSyncState:
    """ Per-validator protocol state.

        Attributes:
            current_epoch: the epoch of the last step.
            certified: block id -> round it was first seen certified.
            pending_txs: tx id -> Transaction known to this validator.
            finalized: the finalized Ledger.
            vote_cast_epoch: the last epoch this validator voted in.
    """
    current_epoch: int = -1
    certified: Dict[str, int] = field(default_factory=dict)
    pending_txs: dict = field(default_factory=dict)
    finalized: Ledger = Ledger()
    vote_cast_epoch: int = -1


class SimpleSync(CertifiableProtocol):
    """ One validator running one SimpleSync instance. """
    # pylint: disable=too-many-instance-attributes
    message_kinds = ('proposal', 'block_vote')

    def __init__(self, instance, party_id, key, pki, delta):
        super().__init__(instance, party_id, key, pki)
        self.delta = delta
        self.epoch_length = 2 * delta

        root = Block(instance.tag, -1, 0, None, (), None)
        self._root_id = root.block_id
        self._blocks = {root.block_id: root}
        self._ledgers = {root.block_id: instance.genesis}
        self._ancestry = {root.block_id: frozenset()}
        self._votes = {}
        self._orphans = {}
        self._epoch_proposals = {}
        self._voted_epochs = set()
        self._proposed_epochs = set()
        self._finalize_queue = []
        self._lock = root.block_id
        self._finalized_id = root.block_id

        self.state = SimpleSyncState(finalized=instance.genesis)
        self.state.certified[root.block_id] = instance.start_round

        self._logger = logging.getLogger(__name__)

    # ------------------------------------------------------------------

    def epoch_of(self, round_index):
        return (round_index - self.start_round) // self.epoch_length

    def leader(self, epoch):
        valset = self.instance.valset
        return valset[epoch % len(valset)]

    def certified_chain_tips(self):
        """ Certified blocks that have no certified descendant. """
        certified = set(self.state.certified)
        parents = set()
        for block_id in certified:
            parents.update(self._ancestry[block_id])
        return sorted(certified - parents)

    def ledger_of(self, block_id):
        return self._ledgers[block_id]

    def _extends(self, block_id, ancestor_id):
        """ True if ancestor_id is block_id or one of its ancestors. """
        return block_id == ancestor_id or \
            ancestor_id in self._ancestry[block_id]

    # ------------------------------------------------------------------
    # transactions

    def add_transactions(self, txs, round_index):
        for tx in txs:
            if tx.tx_id not in self.instance.genesis:
                self.state.pending_txs.setdefault(tx.tx_id, tx)

    # ------------------------------------------------------------------
    # message handling

    def _on_proposal(self, proposal, round_index):
        block = proposal.block
        if block.block_id in self._blocks:
            return
        if block.instance_tag != self.instance.tag or block.epoch < 0:
            return
        if block.proposer != self.leader(block.epoch) or \
                proposal.sig.signer != block.proposer or \
                not self._pki.verify(
                    block.proposer,
                    Proposal.signed_bytes(proposal.instance, block),
                    proposal.sig):
            self._logger.debug('%s: dropped proposal from %s',
                               self.party_id, block.proposer)
            return
        if block.parent not in self._blocks:
            self._orphans.setdefault(block.parent, []).append(proposal)
            return

        parent = self._blocks[block.parent]
        parent_ledger = self._ledgers[block.parent]
        if block.height != parent.height + 1 or \
                len(set(block.txs)) != len(block.txs) or \
                any(tx_id in parent_ledger for tx_id in block.txs):
            return

        self._blocks[block.block_id] = block
        self._ledgers[block.block_id] = Ledger(parent_ledger.txs + block.txs)
        self._ancestry[block.block_id] = \
            self._ancestry[block.parent] | {block.parent}
        self._epoch_proposals.setdefault(block.epoch, []).append(
            block.block_id)
        self._check_certified(block.block_id, round_index)

        for orphan in self._orphans.pop(block.block_id, []):
            self._on_proposal(orphan, round_index)

    def _on_block_vote(self, vote, round_index):
        signer = vote.sig.signer
        if signer not in self.instance.valset or not self._pki.verify(
                signer,
                BlockVote.signed_bytes(vote.instance, vote.epoch,
                                       vote.block_id),
                vote.sig):
            return
        self._votes.setdefault(vote.block_id, {})[signer] = vote
        self._check_certified(vote.block_id, round_index)

    def _check_certified(self, block_id, round_index):
        if block_id not in self._blocks or block_id in self.state.certified:
            return
        if len(self._votes.get(block_id, {})) < self.instance.valset.quorum:
            return
        self.state.certified[block_id] = round_index
        block = self._blocks[block_id]
        if block.height > self._blocks[self._lock].height:
            self._lock = block_id
        heapq.heappush(self._finalize_queue,
                       (round_index + self.epoch_length, -block.height,
                        block_id))

    # ------------------------------------------------------------------
    # voting and proposing

    def _maybe_vote(self, epoch, round_index, outbox):
        if epoch in self._voted_epochs:
            return
        for block_id in self._epoch_proposals.get(epoch, []):
            if not self._extends(self._blocks[block_id].parent, self._lock):
                continue
            vote = BlockVote.make(self.instance, epoch, block_id, self._key)
            self._voted_epochs.add(epoch)
            self.state.vote_cast_epoch = epoch
            outbox.append(vote)
            self._on_block_vote(vote, round_index)
            return

    def _propose(self, epoch, round_index):
        tip_ledger = self._ledgers[self._lock]
        txs = sorted((tx for tx in self.state.pending_txs.values()
                      if tx.tx_id not in tip_ledger),
                     key=lambda tx: (tx.submit_round, tx.tx_id))
        if not txs:
            return None
        tip = self._blocks[self._lock]
        block = Block(self.instance.tag, epoch, tip.height + 1, self._lock,
                      tuple(tx.tx_id for tx in txs), self.party_id)
        proposal = Proposal.make(self.instance, block, self._key)
        self._on_proposal(proposal, round_index)
        return proposal

    # ------------------------------------------------------------------
    # finalization

    def _conflicting_certificate(self, block_id):
        for other in self.state.certified:
            if not (self._extends(block_id, other) or
                    self._extends(other, block_id)):
                return other
        return None

    def _finalize(self, round_index):
        due = []
        while self._finalize_queue and \
                self._finalize_queue[0][0] <= round_index:
            _, neg_height, block_id = heapq.heappop(self._finalize_queue)
            due.append((neg_height, block_id))
        due.sort()

        grew = False
        for neg_height, block_id in due:
            if -neg_height <= self._blocks[self._finalized_id].height:
                continue
            conflict = self._conflicting_certificate(block_id)
            if conflict is not None:
                self._logger.debug(
                    '%s: not finalizing %s, conflicting certificate %s',
                    self.party_id, block_id[:12], conflict[:12])
                continue
            self._finalized_id = block_id
            grew = True
        return grew

    # ------------------------------------------------------------------

    def step(self, round_index, inbox):
        outbox = []
        if round_index < self.start_round:
            return outbox

        for payload in inbox:
            if not self.accepts(payload):
                continue
            if payload.kind == 'proposal':
                self._on_proposal(payload, round_index)
            else:
                self._on_block_vote(payload, round_index)

        epoch = self.epoch_of(round_index)
        self.state.current_epoch = epoch
        self._maybe_vote(epoch, round_index, outbox)

        if (round_index - self.start_round) % self.epoch_length == 0 and \
                self.leader(epoch) == self.party_id and \
                epoch not in self._proposed_epochs:
            self._proposed_epochs.add(epoch)
            proposal = self._propose(epoch, round_index)
            if proposal is not None:
                outbox.append(proposal)
                self._maybe_vote(epoch, round_index, outbox)

        if self._finalize(round_index):
            ledger = self._ledgers[self._finalized_id]
            self.state.finalized = ledger
            outbox.append(self._finality_vote(ledger))
        return outbox
