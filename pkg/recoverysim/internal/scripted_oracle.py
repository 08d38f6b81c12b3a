""" ScriptedOracle, an environment-driven internal protocol.

    All honest validators of an instance share one OracleLedger.  A
    transaction is appended to it latency rounds after the first
    validator receives it, so the ledger only grows and every honest
    view is a prefix of every later one.  The script may additionally
    make corrupted validators sign arbitrary ledgers.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

from dataclasses import dataclass
from typing import Tuple

from recoverysim.base import RecoverysimScenarioError
from recoverysim.core.ledger import Ledger
from recoverysim.internal.messages import FinalityVote
from recoverysim.internal.protocol import CertifiableProtocol


class OracleLedger:
    """ The single growing ledger of one instance.

        Attributes:
            latency: rounds between first receipt and finalization.
    """

    def __init__(self, instance, latency):
        self.instance = instance
        self.latency = latency
        self._entries = []
        self._known = set(instance.genesis.txs)

    def submit(self, tx, round_index):
        if tx.tx_id in self._known:
            return
        self._known.add(tx.tx_id)
        self._entries.append((round_index + self.latency, tx.tx_id))

    def ledger_at(self, round_index):
        txs = [tx_id for due, tx_id in self._entries if due <= round_index]
        return Ledger(self.instance.genesis.txs + tuple(txs))


class ScriptedOracle(CertifiableProtocol):
    """ A validator whose finalized ledger is read from the OracleLedger. """

    def __init__(self, instance, party_id, key, pki, oracle):
        super().__init__(instance, party_id, key, pki)
        self.oracle = oracle

    def add_transactions(self, txs, round_index):
        for tx in txs:
            self.oracle.submit(tx, round_index)

    def step(self, round_index, inbox):
        if round_index < self.start_round:
            return []
        ledger = self.oracle.ledger_at(round_index)
        if len(ledger) > len(self.finalized):
            return [self._finality_vote(ledger)]
        return []


@dataclass(frozen=True)
class ForgedVotes:
    """ One scripted step: signers sign ledger at round. """
    round_index: int
    signers: Tuple[int, ...]
    ledger: Ledger


class OracleScript:
    """ The forged-vote steps of a scenario's oracle script. """

    def __init__(self, steps=()):
        self.steps = sorted(steps, key=lambda s: (s.round_index, s.signers))

    @classmethod
    def from_list(cls, entries):
        return cls([ForgedVotes(entry['round'], tuple(entry['signers']),
                                Ledger.from_list(entry['ledger']))
                    for entry in entries or []])

    def due(self, round_index):
        return [step for step in self.steps if step.round_index == round_index]


def scripted_oracle_step(oracle, script, round_index, corruption,
                         adversary_keys):
    """ The environment side of the oracle for one round.

        Args:
            oracle: the OracleLedger of the running instance.
            script: an OracleScript.
            round_index: the current round.
            corruption: the CorruptionSchedule.
            adversary_keys: PartyId -> KeyHandle for corrupted validators.

        Returns: (the honest ledger at this round, list of forged votes).

        Raises:
            RecoverysimScenarioError: a step runs before r_maj or names
                a signer that is not corrupted.
    """
    forged = []
    for step in script.due(round_index):
        if corruption.r_maj is None or round_index < corruption.r_maj:
            raise RecoverysimScenarioError(
                f"scripted forgery at round {round_index} precedes r_maj: "
                f"the internal protocol is certifiably safe before r_maj")
        for index in step.signers:
            key = next((k for p, k in adversary_keys.items()
                        if p.index == index), None)
            if key is None:
                raise RecoverysimScenarioError(
                    f"scripted forgery at round {round_index} needs the key "
                    f"of validator {index}, which is not corrupted")
            ledger = Ledger(oracle.instance.genesis.txs + tuple(
                tx_id for tx_id in step.ledger.txs
                if tx_id not in oracle.instance.genesis))
            forged.append(FinalityVote.make(oracle.instance, ledger, key))
    return oracle.ledger_at(round_index), forged
