""" Dolev-Strong broadcast of bookmarks among V_new.

    Every member of V_new is the sender of one broadcast instance and a
    relay in all the others.  With t = floor(|V_new| / 2) the broadcast
    runs t + 1 rounds of delta simulator rounds each.  At the end of
    round k a relay accepts every value carried by a chain of at least
    k distinct valid signatures that starts with the sender's, and
    relays a value the first time it accepts it (while k <= t) with its
    own signature appended.  A relay delivers the value of a sender if
    it accepted exactly one, and nothing otherwise.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import logging
from dataclasses import dataclass, field

from recoverysim.base.utils import canonical_bytes
from recoverysim.core.ledger import Ledger
from recoverysim.netsim.network import Payload

BOOKMARK_TAG = 'bm'


def t_ds(set_size):
    """ Number of faulty senders tolerated: floor(n' / 2). """
    return set_size // 2


def u_bc(set_size, delta):
    """ Duration of the broadcast in simulator rounds. """
    return (t_ds(set_size) + 1) * delta


@dataclass(frozen=True)
class SignatureChain(Payload):
    """ A bookmark value with the signatures accumulated so far.

        Attributes:
            value: the Ledger being broadcast.
            sender: the PartyId of the broadcast's sender.
            chain: tuple of Signatures, the sender's first.
    """
    kind = 'signature_chain'
    gossip = False

    value: Ledger
    sender: object
    chain: tuple

    @staticmethod
    def signed_bytes(sender, value):
        return canonical_bytes(BOOKMARK_TAG, sender, value)

    @classmethod
    def start(cls, value, key):
        """ The sender's initial one-signature chain. """
        sig = key.sign(cls.signed_bytes(key.owner, value))
        return cls(value, key.owner, (sig,))

    def extend(self, key):
        sig = key.sign(self.signed_bytes(self.sender, self.value))
        return SignatureChain(self.value, self.sender, self.chain + (sig,))

    def signers(self):
        return [sig.signer for sig in self.chain]

    def canonical(self):
        return canonical_bytes('signature_chain', self.value, self.sender,
                               *self.chain)

    def signatures(self):
        message = self.signed_bytes(self.sender, self.value)
        for sig in self.chain:
            yield (sig.signer, message, sig)

    def describe(self):
        return {'sender': str(self.sender), 'len': len(self.value),
                'signers': [str(s) for s in self.signers()]}

    def valid(self, pki, valset, min_signatures):
        """ True if the chain has at least min_signatures distinct valid
            signatures of valset members, headed by the sender's.
        """
        if not self.chain or self.chain[0].signer != self.sender:
            return False
        signers = self.signers()
        if len(set(signers)) != len(signers) or \
                len(signers) < min_signatures:
            return False
        message = self.signed_bytes(self.sender, self.value)
        return all(signer in valset and pki.verify(signer, message, sig)
                   for signer, _, sig in self.signatures())


@dataclass
class DsState:
    """ A relay's view of one sender's broadcast.

        Attributes:
            extracted: values accepted for this sender.
            relayed: values this relay has already forwarded.
    """
    extracted: set = field(default_factory=set)
    relayed: set = field(default_factory=set)


class DolevStrongRelay:
    """ One V_new member's side of all n' broadcast instances.

        Attributes:
            party_id: the relay.
            valset: V_new.
            start_round: r_rec.
            rounds: t + 1, the number of broadcast rounds.
    """
    # pylint: disable=too-many-arguments

    def __init__(self, party_id, key, pki, valset, delta, start_round):
        self.party_id = party_id
        self.valset = valset
        self.delta = delta
        self.start_round = start_round
        self.tolerance = t_ds(len(valset))
        self.rounds = self.tolerance + 1
        self.states = {sender: DsState() for sender in valset}
        self._key = key
        self._pki = pki
        self._buffer = []
        self._logger = logging.getLogger(__name__)

    def boundary(self, ds_round_k):
        """ Simulator round at which broadcast round k ends. """
        return self.start_round + ds_round_k * self.delta

    @property
    def end_round(self):
        return self.boundary(self.rounds)

    def start(self, value):
        """ Starts this relay's own broadcast of value.

            Returns: the chain to send to the rest of V_new.
        """
        chain = SignatureChain.start(value, self._key)
        state = self.states[self.party_id]
        state.extracted.add(value)
        state.relayed.add(value)
        return chain

    def receive(self, chain):
        """ Buffers a chain until the next boundary. """
        self._buffer.append(chain)

    def ds_round(self, ds_round_k, inbox=None):
        """ Ends broadcast round k.

            Args:
                ds_round_k: 1 <= k <= t + 1.
                inbox: chains to process; defaults to those buffered
                    since the previous boundary.

            Returns: the chains to relay to V_new.
        """
        if not 1 <= ds_round_k <= self.rounds:
            raise ValueError(f"broadcast round {ds_round_k} outside "
                             f"[1, {self.rounds}]")
        if inbox is None:
            inbox, self._buffer = self._buffer, []
        outbox = []
        for chain in inbox:
            state = self.states.get(chain.sender)
            if state is None or \
                    not chain.valid(self._pki, self.valset, ds_round_k):
                self._logger.debug('%s: chain for %s dropped in round %d',
                                   self.party_id, chain.sender, ds_round_k)
                continue
            if chain.value in state.extracted:
                continue
            state.extracted.add(chain.value)
            if ds_round_k <= self.tolerance and \
                    chain.value not in state.relayed and \
                    self.party_id not in chain.signers():
                state.relayed.add(chain.value)
                outbox.append(chain.extend(self._key))
        return outbox

    def ds_deliver(self, sender):
        """ The delivered value of sender's broadcast, or None for bottom. """
        extracted = self.states[sender].extracted
        if len(extracted) == 1:
            return next(iter(extracted))
        return None

    def delivered(self):
        """ sender -> delivered Ledger or None, for every sender. """
        return {sender: self.ds_deliver(sender) for sender in self.valset}
