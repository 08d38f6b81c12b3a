""" Controllers for the run, check, suite and demo commands.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

from recoverysim.adversary.demos import DEMOS, print_demo
from recoverysim.base import RecoverysimHarnessError, RecoverysimVerdictError
from recoverysim.base.config import FileConfig
from recoverysim.base.controller import Controller
from recoverysim.base.utils import log_text
from recoverysim.harness.checkers import run_checkers, summary_line
from recoverysim.harness.scenario import load_scenario
from recoverysim.harness.simulator import run
from recoverysim.harness.suite import format_table, run_suite, scenario_dir
from recoverysim.harness.trace import Trace


def _log_verdicts(logger, verdicts):
    for verdict in verdicts:
        mark = 'PASS' if verdict.passed else 'FAIL'
        log_text(logger.info, None,
                 f"{mark} {verdict.checker}: {verdict.details}")
        if not verdict.passed:
            log_text(logger.info, None, f"     evidence: {verdict.evidence}")


def _raise_on_failure(verdicts):
    failed = [v.checker for v in verdicts if not v.passed]
    if failed:
        raise RecoverysimVerdictError(
            f"{summary_line(verdicts)} ({', '.join(failed)} failed)",
            verdicts)


class ScenarioController(Controller):
    """ `run`: executes a scenario file and writes its trace.

        A checker failure does not fail the command; the trace is the
        product.  Use `check` to judge it.
    """
    def __init__(self, config_file, trace_out=None, seed=None, **kwargs):
        super().__init__(**kwargs)
        self.command = 'run'
        self.description = f"run {config_file}"
        self.config_file = config_file
        self.trace_out = trace_out
        self.seed = seed
        self.scenario = None
        self.trace = None

    def setup(self):
        self.scenario = load_scenario(FileConfig(self.config_file))
        if self.seed is not None:
            self.scenario = self.scenario.with_seed(self.seed)

    def run(self):
        self.trace = run(self.scenario)
        if self.trace_out:
            self.trace.write(self.trace_out)
        log_text(self._logger.info, None,
                 f"{self.scenario.name}: {len(self.trace)} events")


class CheckController(Controller):
    """ `check`: runs checkers over a persisted trace. """
    def __init__(self, trace_file, checkers=None, **kwargs):
        super().__init__(**kwargs)
        self.command = 'check'
        self.description = f"check {trace_file}"
        self.trace_file = trace_file
        self.checkers = checkers
        self.verdicts = []

    def run(self):
        trace = Trace.load(self.trace_file)
        self.verdicts = run_checkers(trace, self.checkers)
        _log_verdicts(self._logger, self.verdicts)
        log_text(self._logger.info, None, summary_line(self.verdicts))
        _raise_on_failure(self.verdicts)


class SuiteController(Controller):
    """ `suite`: runs the corpus and compares it with the expectations. """
    def __init__(self, directory=None, seeds=1, **kwargs):
        super().__init__(**kwargs)
        self.command = 'suite'
        self.directory = scenario_dir(directory)
        self.description = f"suite {self.directory}"
        self.seeds = seeds
        self.rows = []

    def pre_run(self):
        if self.seeds < 1:
            log_text(self._logger.error, None,
                     f"--seeds must be positive: {self.seeds}")
            return False
        return True

    def run(self):
        self.rows = run_suite(self.directory, self.seeds)
        for line in format_table(self.rows).splitlines():
            log_text(self._logger.info, None, line)
        mismatched = [row.name for row in self.rows if not row.matched]
        if mismatched:
            raise RecoverysimVerdictError(
                f"{len(mismatched)} scenario(s) not as expected: "
                f"{', '.join(mismatched)}")


class DemoController(Controller):
    """ `demo`: runs a narrative scenario and prints its timeline. """
    def __init__(self, name, **kwargs):
        super().__init__(**kwargs)
        self.command = 'demo'
        self.description = f"demo {name}"
        self.name = name
        self.verdicts = []

    def pre_run(self):
        if self.name not in DEMOS:
            raise RecoverysimHarnessError(
                f"unknown demo {self.name!r} (known: {', '.join(DEMOS)})")
        return True

    def run(self):
        trace, self.verdicts = DEMOS[self.name]()
        print_demo(self.name, trace, self.verdicts,
                   log=self._logger.info)
