""" Client sleep/wake schedules and the corruption schedule.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional

from recoverysim.core.party import ValidatorSet, client, validator


@dataclass(frozen=True)
class ClientWindow:
    """ A client is awake in [wake_round, sleep_round); it never re-wakes. """
    wake_round: int = 0
    sleep_round: Optional[int] = None

    def awake(self, round_index):
        if round_index < self.wake_round:
            return False
        return self.sleep_round is None or round_index < self.sleep_round


class ClientSchedule:
    """ Wake/sleep rounds of every client, indexed by client index. """

    def __init__(self, windows):
        self._windows = dict(windows)

    def clients(self):
        return [client(index) for index in sorted(self._windows)]

    def window(self, party):
        return self._windows[party.index]

    def awake(self, party, round_index):
        window = self._windows.get(party.index)
        return window is not None and window.awake(round_index)

    def validate(self):
        """ Returns a list of problems (empty when valid). """
        problems = []
        for index, window in sorted(self._windows.items()):
            if window.wake_round < 0:
                problems.append(f"client {index}: negative wake round")
            if window.sleep_round is not None and \
                    window.sleep_round <= window.wake_round:
                problems.append(
                    f"client {index}: sleep round {window.sleep_round} "
                    f"is not after wake round {window.wake_round}")
        return problems


@dataclass
class CorruptionSchedule:
    """ Which validators are corrupted when, and the healing at r_rec.

        Attributes:
            n: number of validators.
            corrupt_round: validator index -> round it becomes corrupted.
            kill_set: validator indices removed at r_rec.
            r_maj: first round the adversary may hold a majority (None: never).
            r_rec: the recovery round (None: no recovery).
    """
    n: int
    corrupt_round: Dict[int, int] = field(default_factory=dict)
    kill_set: FrozenSet[int] = frozenset()
    r_maj: Optional[int] = None
    r_rec: Optional[int] = None

    def is_corrupted(self, index, round_index):
        corrupted_at = self.corrupt_round.get(index)
        return corrupted_at is not None and corrupted_at <= round_index

    def is_alive(self, index, round_index):
        if index not in self.kill_set or self.r_rec is None:
            return True
        return round_index < self.r_rec

    def alive(self, round_index):
        return [i for i in range(self.n) if self.is_alive(i, round_index)]

    def counts(self, round_index):
        """ Returns (corrupted alive validators, alive validators). """
        alive = self.alive(round_index)
        corrupted = [i for i in alive if self.is_corrupted(i, round_index)]
        return len(corrupted), len(alive)

    def honest_majority(self, round_index):
        """ True iff f(round) < 1/2. """
        corrupted, alive = self.counts(round_index)
        return 2 * corrupted < alive

    def v_new(self):
        """ The healed validator set (all validators outside kill_set). """
        return ValidatorSet(tuple(validator(i) for i in range(self.n)
                                  if i not in self.kill_set))

    def validate(self, horizon):
        """ Checks the model constraints on f(r) over rounds 0..horizon.

            Returns: a list of problems (empty when valid).
        """
        problems = []
        for index, round_index in sorted(self.corrupt_round.items()):
            if not 0 <= index < self.n:
                problems.append(f"corruption of unknown validator {index}")
            if round_index < 0:
                problems.append(f"validator {index}: negative corrupt round")
        for index in sorted(self.kill_set):
            if not 0 <= index < self.n:
                problems.append(f"kill of unknown validator {index}")
        if self.kill_set and self.r_rec is None:
            problems.append("kill_set given without r_rec: "
                            "validators can only be removed at r_rec")
        if self.r_maj is not None and self.r_rec is not None and \
                not self.r_maj < self.r_rec:
            problems.append(f"r_maj ({self.r_maj}) must precede "
                            f"r_rec ({self.r_rec})")
        if self.r_rec is not None and self.r_rec > horizon:
            problems.append(f"r_rec ({self.r_rec}) is beyond R ({horizon})")
        if self.r_rec is not None and len(self.kill_set) >= self.n:
            problems.append("V_new is empty")
        if problems:
            return problems

        for round_index in range(horizon + 1):
            before_maj = self.r_maj is None or round_index < self.r_maj
            after_rec = self.r_rec is not None and round_index >= self.r_rec
            if (before_maj or after_rec) and \
                    not self.honest_majority(round_index):
                corrupted, alive = self.counts(round_index)
                label = 'V_new' if after_rec else 'V'
                problems.append(
                    f"f({round_index}) = {corrupted}/{alive} over {label} "
                    f"violates the honest-majority bound")
                break
        return problems
