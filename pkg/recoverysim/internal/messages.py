""" Messages of the internal protocol and its certificates.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import functools
from dataclasses import dataclass

from recoverysim.base.utils import canonical_bytes, digest
from recoverysim.core.ledger import Ledger
from recoverysim.netsim.network import Payload


@dataclass(frozen=True)
class InstanceId:
    """ Identifies one run of the internal protocol.

        Attributes:
            epoch_tag: 0 for the original instance, 1 after recovery.
            genesis: the Ledger the instance starts from.
            valset: the ValidatorSet running it.
            start_round: the round the instance starts.
    """
    epoch_tag: int
    genesis: Ledger
    valset: object
    start_round: int

    def canonical(self):
        return canonical_bytes('instance', self.epoch_tag, self.genesis,
                               self.valset, self.start_round)

    @functools.cached_property
    def tag(self):
        """ Short printable identifier: 'i1:3fa2c0d1'. """
        return f"i{self.epoch_tag}:{digest(self.canonical())[:8]}"


@dataclass(frozen=True)
class FinalityVote(Payload):
    """ A validator's signature on its finalized ledger. """
    kind = 'finality_vote'
    # votes travel onward inside witnesses
    gossip = False

    instance: InstanceId
    ledger: Ledger
    sig: object

    @staticmethod
    def signed_bytes(instance, ledger):
        return canonical_bytes('finality', instance, ledger)

    @classmethod
    def make(cls, instance, ledger, key):
        return cls(instance, ledger,
                   key.sign(cls.signed_bytes(instance, ledger)))

    @property
    def signer(self):
        return self.sig.signer

    def canonical(self):
        return canonical_bytes('finality_vote', self.instance, self.ledger,
                               self.sig)

    def signatures(self):
        yield (self.sig.signer, self.signed_bytes(self.instance, self.ledger),
               self.sig)

    def describe(self):
        return {'instance': self.instance.tag, 'signer': str(self.signer),
                'len': len(self.ledger)}


@dataclass(frozen=True)
class Witness(Payload):
    """ A set of FinalityVotes with pairwise distinct signers. """
    kind = 'witness'

    instance: InstanceId
    votes: tuple

    def __post_init__(self):
        votes = tuple(sorted(self.votes, key=lambda v: v.signer.sort_key()))
        object.__setattr__(self, 'votes', votes)

    def canonical(self):
        return canonical_bytes('witness', self.instance, *self.votes)

    def signers(self):
        return [vote.signer for vote in self.votes]

    def signatures(self):
        for vote in self.votes:
            yield from vote.signatures()

    def describe(self):
        return {'instance': self.instance.tag,
                'signers': [str(s) for s in self.signers()]}


@dataclass(frozen=True)
class Block:
    """ A block of the SimpleSync chain.

        Attributes:
            instance_tag: InstanceId.tag of the instance.
            epoch: the epoch it was proposed in.
            height: 1 + parent height (the genesis root has height 0).
            parent: parent block id, or None for the genesis root.
            txs: tuple of transaction ids added by this block.
            proposer: the leader PartyId.
    """
    instance_tag: str
    epoch: int
    height: int
    parent: object
    txs: tuple
    proposer: object

    def canonical(self):
        return canonical_bytes('block', self.instance_tag, self.epoch,
                               self.height, self.parent, self.txs,
                               str(self.proposer))

    @functools.cached_property
    def block_id(self):
        return digest(self.canonical())


@dataclass(frozen=True)
class Proposal(Payload):
    """ A leader's signed block proposal. """
    kind = 'proposal'

    instance: InstanceId
    block: Block
    sig: object

    @staticmethod
    def signed_bytes(instance, block):
        return canonical_bytes('proposal', instance, block)

    @classmethod
    def make(cls, instance, block, key):
        return cls(instance, block,
                   key.sign(cls.signed_bytes(instance, block)))

    def canonical(self):
        return canonical_bytes('proposal_msg', self.instance, self.block,
                               self.sig)

    def signatures(self):
        yield (self.sig.signer, self.signed_bytes(self.instance, self.block),
               self.sig)

    def describe(self):
        return {'instance': self.instance.tag, 'epoch': self.block.epoch,
                'height': self.block.height,
                'block': self.block.block_id[:12]}


@dataclass(frozen=True)
class BlockVote(Payload):
    """ A validator's vote for a proposed block in one epoch. """
    kind = 'block_vote'

    instance: InstanceId
    epoch: int
    block_id: str
    sig: object

    @staticmethod
    def signed_bytes(instance, epoch, block_id):
        return canonical_bytes('block_vote', instance, epoch, block_id)

    @classmethod
    def make(cls, instance, epoch, block_id, key):
        return cls(instance, epoch, block_id,
                   key.sign(cls.signed_bytes(instance, epoch, block_id)))

    @property
    def signer(self):
        return self.sig.signer

    def canonical(self):
        return canonical_bytes('block_vote_msg', self.instance, self.epoch,
                               self.block_id, self.sig)

    def signatures(self):
        yield (self.sig.signer,
               self.signed_bytes(self.instance, self.epoch, self.block_id),
               self.sig)

    def describe(self):
        return {'instance': self.instance.tag, 'epoch': self.epoch,
                'signer': str(self.signer), 'block': self.block_id[:12]}
