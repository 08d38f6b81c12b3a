""" Ledger algebra.

    A ledger is an ordered sequence of transaction ids.  Ledgers are
    value objects: two ledgers are equal when they hold the same ids
    in the same order.  Transaction identity is the id; two
    transactions with identical payloads but different ids are
    different transactions.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

from dataclasses import dataclass

from recoverysim.base.utils import canonical_bytes


class LedgerError(ValueError):
    """ Exception: the ledger would contain a duplicate transaction id. """
    def __init__(self, tx_id):
        super().__init__()
        self.tx_id = tx_id

    def __str__(self):
        return f"duplicate transaction id in ledger: {self.tx_id}"


@dataclass(frozen=True)
class Transaction:
    """ A client input.

        Attributes:
            tx_id: unique identifier within a scenario.
            payload: opaque bytes.
            submit_round: the round the environment hands it to validators.
    """
    tx_id: str
    payload: bytes = b''
    submit_round: int = 0

    def canonical(self):
        return canonical_bytes(self.tx_id, self.payload, self.submit_round)


@dataclass(frozen=True)
class Ledger:
    """ An ordered sequence of transaction ids.

        Attributes:
            txs: tuple of transaction ids.
    """
    txs: tuple = ()

    def __post_init__(self):
        if not isinstance(self.txs, tuple):
            object.__setattr__(self, 'txs', tuple(self.txs))
        if len(set(self.txs)) != len(self.txs):
            seen = set()
            for tx_id in self.txs:
                if tx_id in seen:
                    raise LedgerError(tx_id)
                seen.add(tx_id)

    def __len__(self):
        return len(self.txs)

    def __iter__(self):
        return iter(self.txs)

    def __contains__(self, tx_id):
        return tx_id in self.txs

    def __str__(self):
        return '[' + ','.join(self.txs) + ']'

    def prefix(self, length):
        """ Returns the ledger made of the first length transactions. """
        return Ledger(self.txs[:length])

    def extend(self, tx_ids):
        """ Returns a new ledger with tx_ids appended, skipping ids
            already present.
        """
        new_txs = list(self.txs)
        present = set(self.txs)
        for tx_id in tx_ids:
            if tx_id not in present:
                new_txs.append(tx_id)
                present.add(tx_id)
        return Ledger(tuple(new_txs))

    def canonical(self):
        return canonical_bytes(*self.txs)

    def to_list(self):
        """ JSON form used in traces. """
        return list(self.txs)

    @classmethod
    def from_list(cls, values):
        return cls(tuple(values))


EMPTY_LEDGER = Ledger()


def is_prefix(a, b):
    """ True iff a equals the first len(a) elements of b (non-strict). """
    return len(a.txs) <= len(b.txs) and b.txs[:len(a.txs)] == a.txs


def consistent(a, b):
    """ True iff one ledger is a prefix of the other. """
    return is_prefix(a, b) or is_prefix(b, a)


def common_prefix(a, b):
    """ Returns the longest ledger that is a prefix of both a and b. """
    length = 0
    for left, right in zip(a.txs, b.txs):
        if left != right:
            break
        length += 1
    return Ledger(a.txs[:length])


def majority_prefix(ledgers, set_size):
    """ Returns the longest ledger that is a prefix of more than
        set_size/2 of the given ledgers.

        Supporters of two incomparable candidates are disjoint, so the
        candidates above the threshold form a chain and the answer is
        unique.  The empty ledger is returned when no non-empty ledger
        meets the threshold, including for an empty input list.

        Args:
            ledgers: list of Ledger, one entry per distinct supporter.
            set_size: the size of the supporting set (>= 1).

        Returns: a Ledger

        Raises:
            ValueError: set_size < 1, or more ledgers than set_size.
    """
    if set_size < 1:
        raise ValueError(f"set_size must be at least 1: {set_size}")
    if len(ledgers) > set_size:
        raise ValueError(
            f"{len(ledgers)} ledgers given for a set of size {set_size}")

    result = []
    supporters = [ledger.txs for ledger in ledgers]
    depth = 0
    while True:
        counts = {}
        for txs in supporters:
            if len(txs) > depth:
                counts[txs[depth]] = counts.get(txs[depth], 0) + 1
        winner = None
        for tx_id, count in counts.items():
            if 2 * count > set_size:
                winner = tx_id
                break
        if winner is None:
            break
        result.append(winner)
        supporters = [txs for txs in supporters
                      if len(txs) > depth and txs[depth] == winner]
        depth += 1
    return Ledger(tuple(result))
