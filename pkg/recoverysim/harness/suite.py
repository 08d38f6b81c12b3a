""" The scenario corpus runner.

    Every scenario file of a directory is run for K seeds and its
    verdicts are compared with the file's EXPECT section.  A row
    matches when every seed produced the expected outcome.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import logging
import os
import pathlib
from dataclasses import dataclass, field
from typing import List, Tuple

from recoverysim.base import RecoverysimConfigError
from recoverysim.base.config import FileConfig
from recoverysim.base.utils import log_text
from recoverysim.harness.checkers import CHECKERS, run_checkers
from recoverysim.harness.scenario import load_scenario
from recoverysim.harness.simulator import run

SCENARIO_DIR_ENV = 'RECOVERYSIM_SCENARIO_DIR'
BUNDLED_SCENARIO_DIR = pathlib.Path(__file__).resolve().parent.parent / \
    'scenarios'


def scenario_dir(directory=None):
    """ The corpus directory: the argument, else $RECOVERYSIM_SCENARIO_DIR,
        else the bundled corpus.
    """
    if directory:
        return pathlib.Path(directory)
    return pathlib.Path(os.environ.get(SCENARIO_DIR_ENV) or
                        BUNDLED_SCENARIO_DIR)


def scenario_files(directory):
    """ Raises:
            FileNotFoundError: directory does not exist.
    """
    path = pathlib.Path(directory)
    if not path.is_dir():
        raise FileNotFoundError(str(directory))
    return sorted(path.glob('*.json'))


@dataclass(frozen=True)
class Expectation:
    """ outcome 'pass': every checker passes.  outcome 'fail': every
        checker named in failing fails (others may fail too).
    """
    outcome: str = 'pass'
    failing: Tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, data):
        """ Raises:
                RecoverysimConfigError: malformed EXPECT section.
        """
        data = data or {}
        outcome = data.get('outcome', 'pass')
        failing = tuple(data.get('failing', []))
        problems = []
        if outcome not in ('pass', 'fail'):
            problems.append(f"unknown outcome {outcome!r}")
        if outcome == 'pass' and failing:
            problems.append('a passing expectation lists failing checkers')
        problems.extend(f"unknown checker {name!r}" for name in failing
                        if name not in CHECKERS)
        if problems:
            raise RecoverysimConfigError('invalid EXPECT section', problems)
        return cls(outcome, failing)

    def matches(self, verdicts):
        failed = {verdict.checker for verdict in verdicts
                  if not verdict.passed}
        if self.outcome == 'pass':
            return not failed
        return bool(failed) and set(self.failing) <= failed

    def __str__(self):
        if self.outcome == 'pass':
            return 'pass'
        return 'fail(' + ','.join(self.failing) + ')'


@dataclass
class SuiteRow:
    """ The result of one scenario file over all its seeds. """
    name: str
    path: str
    expected: Expectation
    seeds: int = 0
    observed: List[str] = field(default_factory=list)
    failing: List[str] = field(default_factory=list)
    matched: bool = True

    @property
    def observed_text(self):
        outcomes = sorted(set(self.observed))
        return '/'.join(outcomes) if outcomes else '-'


def run_scenario_file(path, seeds=1):
    """ Runs one corpus file for seeds seeds.

        Raises:
            RecoverysimConfigError: the file is invalid.
            RecoverysimScenarioError: a run broke a model contract.
    """
    file_config = FileConfig(path)
    config = load_scenario(file_config)
    expected = Expectation.from_dict(
        file_config.get_section('EXPECT')
        if file_config.has_section('EXPECT') else None)

    row = SuiteRow(config.name, str(path), expected)
    failing = set()
    for offset in range(seeds):
        seeded = config.with_seed(config.seed + offset)
        verdicts = run_checkers(run(seeded))
        failed = [v.checker for v in verdicts if not v.passed]
        failing.update(failed)
        row.observed.append('fail' if failed else 'pass')
        row.matched = row.matched and expected.matches(verdicts)
        row.seeds += 1
    row.failing = sorted(failing)
    return row


def run_suite(directory=None, seeds=1):
    """ Runs every scenario file of the corpus directory.

        Returns: list of SuiteRow, in file name order.
    """
    logger = logging.getLogger(__name__)
    rows = []
    for path in scenario_files(scenario_dir(directory)):
        log_text(logger.info, None, f"suite: {path.name} x{seeds}")
        rows.append(run_scenario_file(path, seeds))
    return rows


def format_table(rows):
    """ The suite table, one line per scenario plus a total. """
    headers = ('scenario', 'seeds', 'expected', 'observed', 'failing', '')
    lines = [(row.name, str(row.seeds), str(row.expected), row.observed_text,
              ','.join(row.failing) or '-', 'ok' if row.matched else 'MISMATCH')
             for row in rows]
    widths = [max(len(line[i]) for line in [headers] + lines)
              for i in range(len(headers))]
    text = ['  '.join(cell.ljust(width) for cell, width
                      in zip(line, widths)).rstrip()
            for line in [headers] + lines]
    matched = sum(1 for row in rows if row.matched)
    text.append(f"{matched}/{len(rows)} scenarios as expected")
    return '\n'.join(text)
