""" Interface of a certifiable internal protocol.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

from abc import ABCMeta, abstractmethod

from recoverysim.internal.messages import FinalityVote


class CertifiableProtocol(metaclass=ABCMeta):
    """ One validator's view of one internal protocol instance.

        Implementations finalize a growing ledger that extends the
        instance genesis.  Each time the finalized ledger grows the
        validator signs it and the FinalityVote joins the outbox; any
        quorum of such votes is a witness for C.

        Attributes:
            instance: the InstanceId.
            party_id: the validator running this state machine.
            finalized: the finalized Ledger (starts at the genesis).
    """
    message_kinds = ()

    def __init__(self, instance, party_id, key, pki):
        self.instance = instance
        self.party_id = party_id
        self.finalized = instance.genesis
        self._key = key
        self._pki = pki

    @property
    def start_round(self):
        return self.instance.start_round

    def accepts(self, payload):
        """ True if payload is an internal message of this instance. """
        return payload.kind in self.message_kinds and \
            payload.instance == self.instance

    def _finality_vote(self, ledger):
        """ Moves finalized to ledger and returns the signed vote. """
        self.finalized = ledger
        return FinalityVote.make(self.instance, ledger, self._key)

    @abstractmethod
    def add_transactions(self, txs, round_index):
        """ Hands transactions (environment inputs) to the protocol. """

    @abstractmethod
    def step(self, round_index, inbox):
        """ Processes the inbox for this round.

            Args:
                round_index: the current round.
                inbox: list of internal payloads delivered this round.

            Returns: the list of payloads to gossip.
        """
