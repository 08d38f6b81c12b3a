""" The witness consumer C and the witness producer W.

    A witness is a set of FinalityVotes from distinct members of the
    instance's validator set.  C checks the witness and returns the
    longest ledger that is a prefix of the votes of more than half of
    the validator set.  W searches a pool of received votes for the
    witness with the longest C-value.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import logging

from recoverysim.core.ledger import is_prefix, majority_prefix
from recoverysim.internal.messages import FinalityVote, Witness


class WitnessError(ValueError):
    """ Exception: the witness was rejected by C. """
    reason = 'rejected'

    def __init__(self, message):
        super().__init__()
        self.message = message

    def __str__(self):
        return self.message


class BadSignature(WitnessError):
    """ A vote signature does not verify, or its signer is not in the
        validator set.
    """
    reason = 'bad_signature'


class DuplicateSigner(WitnessError):
    """ Two votes share a signer. """
    reason = 'duplicate_signer'


class BelowQuorum(WitnessError):
    """ Fewer votes than the quorum. """
    reason = 'below_quorum'


class WrongInstance(WitnessError):
    """ The witness (or one of its votes) belongs to another instance. """
    reason = 'wrong_instance'


class GenesisMismatch(WitnessError):
    """ A vote ledger does not extend the instance genesis. """
    reason = 'genesis_mismatch'


def _check_vote(vote, instance, pki):
    if vote.instance != instance:
        raise WrongInstance(f"vote of {vote.signer} is for another instance")
    if vote.signer not in instance.valset:
        raise BadSignature(f"{vote.signer} is not in the validator set")
    if not pki.verify(vote.signer,
                      FinalityVote.signed_bytes(vote.instance, vote.ledger),
                      vote.sig):
        raise BadSignature(f"bad signature from {vote.signer}")
    if not is_prefix(instance.genesis, vote.ledger):
        raise GenesisMismatch(
            f"vote of {vote.signer} does not extend the genesis")


def witness_consume(witness, pki, expected_instance=None):
    """ The function C.

        Args:
            witness: a Witness.
            pki: the Pki used to verify the votes.
            expected_instance: if given, the witness must belong to it.

        Returns: the certified Ledger.

        Raises:
            WrongInstance, BadSignature, DuplicateSigner, BelowQuorum,
            GenesisMismatch
    """
    instance = witness.instance
    if expected_instance is not None and instance != expected_instance:
        raise WrongInstance(f"witness for {instance.tag}, "
                            f"expected {expected_instance.tag}")
    signers = set()
    for vote in witness.votes:
        if vote.signer in signers:
            raise DuplicateSigner(f"{vote.signer} signed twice")
        signers.add(vote.signer)
        _check_vote(vote, instance, pki)
    if len(witness.votes) < instance.valset.quorum:
        raise BelowQuorum(f"{len(witness.votes)} votes, quorum is "
                          f"{instance.valset.quorum}")
    return majority_prefix([vote.ledger for vote in witness.votes],
                           len(instance.valset))


class VotePool:
    """ The FinalityVotes a party has received for one instance.

        Only each signer's maximal votes are retained: a vote whose
        ledger is a prefix of another vote by the same signer adds no
        support to any ledger.
    """

    def __init__(self, instance, pki):
        self.instance = instance
        self._pki = pki
        self._votes = {}
        self._logger = logging.getLogger(__name__)

    def add(self, vote):
        """ Adds a vote.

            Returns: True if the pool changed.
        """
        try:
            _check_vote(vote, self.instance, self._pki)
        except WitnessError as err:
            self._logger.debug('vote dropped: %s', err)
            return False
        current = self._votes.setdefault(vote.signer, [])
        for existing in current:
            if is_prefix(vote.ledger, existing.ledger):
                return False
        current[:] = [v for v in current
                      if not is_prefix(v.ledger, vote.ledger)]
        current.append(vote)
        current.sort(key=lambda v: (-len(v.ledger), v.ledger.txs))
        return True

    def votes(self):
        """ All retained votes, ordered by signer then ledger. """
        result = []
        for signer in sorted(self._votes):
            result.extend(self._votes[signer])
        return result

    def __len__(self):
        return sum(len(votes) for votes in self._votes.values())


def _supported_leaves(entries, set_size):
    """ Returns (prefix, supporters) for every maximal prefix supported
        by votes of more than set_size/2 distinct signers.

        entries: list of (signer, txs); the empty prefix must already
        be supported.
    """
    leaves = []
    stack = [((), entries)]
    while stack:
        prefix, current = stack.pop()
        depth = len(prefix)
        branches = {}
        for signer, txs in current:
            if len(txs) > depth:
                branches.setdefault(txs[depth], []).append((signer, txs))
        extended = False
        for tx_id in sorted(branches):
            branch = branches[tx_id]
            if 2 * len({signer for signer, _ in branch}) > set_size:
                extended = True
                stack.append((prefix + (tx_id,), branch))
        if not extended:
            supporters = sorted({signer for signer, _ in current},
                                key=lambda s: s.sort_key())
            leaves.append((prefix, supporters))
    return leaves


def witness_produce(pool):
    """ The functionality W.

        Finds the longest ledger supported (as a prefix) by votes of
        more than half the validator set and returns a witness made of
        the quorum of supporting signers that sorts first, each with its
        longest vote extending that ledger.  Ties between equally long
        ledgers are broken by that signer list, then by the ledger.

        Returns: a Witness whose C-value is that ledger, or None when no
            quorum of votes exists.
    """
    instance = pool.instance
    set_size = len(instance.valset)
    quorum = instance.valset.quorum
    votes = pool.votes()
    if len({vote.signer for vote in votes}) < quorum:
        return None

    leaves = _supported_leaves(
        [(vote.signer, vote.ledger.txs) for vote in votes], set_size)
    best = None
    for prefix, supporters in leaves:
        chosen = supporters[:quorum]
        key = (-len(prefix), [s.sort_key() for s in chosen], prefix)
        if best is None or key < best[0]:
            best = (key, prefix, chosen)
    _, prefix, chosen = best

    selected = []
    for signer in chosen:
        candidates = [vote for vote in votes if vote.signer == signer and
                      vote.ledger.txs[:len(prefix)] == prefix]
        candidates.sort(key=lambda v: (-len(v.ledger), v.ledger.txs))
        selected.append(candidates[0])
    return Witness(instance, tuple(selected))
