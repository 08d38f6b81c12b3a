""" Party identities and validator sets.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import enum
import functools
from dataclasses import dataclass

from recoverysim.base.utils import canonical_bytes


class PartyKind(enum.Enum):
    """ The two kinds of parties in the model. """
    VALIDATOR = 'v'
    CLIENT = 'c'


@functools.total_ordering
@dataclass(frozen=True)
class PartyId:
    """ Identifies a validator or a client.

        Ordering puts all validators before all clients, then by index.
    """
    kind: PartyKind
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"negative party index: {self.index}")

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (0 if self.kind is PartyKind.VALIDATOR else 1, self.index)

    @property
    def is_validator(self):
        return self.kind is PartyKind.VALIDATOR

    @property
    def is_client(self):
        return self.kind is PartyKind.CLIENT

    def __str__(self):
        return f"{self.kind.value}{self.index}"

    def canonical(self):
        return canonical_bytes(str(self))

    @classmethod
    def parse(cls, text):
        """ Parses the 'v3' / 'c0' form.

            Raises:
                ValueError: the text is not a party id.
        """
        if len(text) < 2 or text[0] not in ('v', 'c') \
                or not text[1:].isdigit():
            raise ValueError(f"not a party id: {text!r}")
        return cls(PartyKind(text[0]), int(text[1:]))


def validator(index):
    """ Shorthand for PartyId(PartyKind.VALIDATOR, index). """
    return PartyId(PartyKind.VALIDATOR, index)


def client(index):
    """ Shorthand for PartyId(PartyKind.CLIENT, index). """
    return PartyId(PartyKind.CLIENT, index)


@dataclass(frozen=True)
class ValidatorSet:
    """ An immutable ordered set of validators.

        Attributes:
            members: tuple of validator PartyIds, sorted by index.
    """
    members: tuple

    def __post_init__(self):
        members = tuple(sorted(set(self.members)))
        for member in members:
            if not member.is_validator:
                raise ValueError(f"not a validator: {member}")
        object.__setattr__(self, 'members', members)

    @classmethod
    def of_size(cls, count):
        return cls(tuple(validator(i) for i in range(count)))

    @property
    def quorum(self):
        """ The smallest integer strictly greater than half the members. """
        return len(self.members) // 2 + 1

    def __len__(self):
        return len(self.members)

    def __contains__(self, party):
        return party in self.members

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, position):
        return self.members[position]

    def canonical(self):
        return canonical_bytes(*[str(m) for m in self.members])

    def to_list(self):
        return [str(m) for m in self.members]
