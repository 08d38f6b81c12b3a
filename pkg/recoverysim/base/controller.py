""" The base class for the command controllers.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import logging

from recoverysim.base import RecoverysimConfigError, RecoverysimDemoError, \
    RecoverysimHarnessError, RecoverysimScenarioError, \
    RecoverysimVerdictError
from recoverysim.base.utils import log_text

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_ERROR = 2


class Controller:
    """ Runs one command and turns its outcome into a status line and an
        exit value.

        Attributes:
            command: the command name.
            description:
            status: 'ok', or 'fail: ...' / 'error: ...'.
            exit_value: 0 ok, 1 verdict failure, 2 configuration or
                input error.
    """
    def __init__(self, **kwargs):
        # pylint: disable=unused-argument
        self.command = 'Enter the command name'
        self.description = 'Enter the command description'
        self.status = 'not-started'
        self.exit_value = EXIT_VERDICT

        self._logger = logging.getLogger(__name__)

    def execute(self):
        """ Runs the command.  This is the entrypoint from the runner.

            Returns: the exit value.
        """
        # pylint: disable=broad-except
        try:
            if not self.pre_run():
                self.status = 'error: failed pre-run conditions'
                self.exit_value = EXIT_ERROR
                return self.exit_value
            self.status = 'in-progress'

            self.setup()
            self.run()
            self.teardown()

            self.status = 'ok'
            self.exit_value = EXIT_OK
        except RecoverysimVerdictError as err:
            self.status = 'fail: ' + str(err)
            self.exit_value = EXIT_VERDICT
        except RecoverysimDemoError as err:
            self.status = 'fail: demo : ' + str(err)
            self.exit_value = EXIT_VERDICT
        except RecoverysimConfigError as err:
            self.status = 'error: config : ' + str(err)
            self.exit_value = EXIT_ERROR
            for problem in err.problems:
                log_text(self._logger.error, None, f"  {problem}")
        except (RecoverysimScenarioError, RecoverysimHarnessError) as err:
            self.status = 'error: scenario : ' + str(err)
            self.exit_value = EXIT_ERROR
        except (OSError, ValueError) as err:
            self.status = 'error: input : ' + str(err)
            self.exit_value = EXIT_ERROR
        except Exception:
            self.status = 'fail: exception'
            self.exit_value = EXIT_VERDICT
            self._logger.exception('fail: exception')
        return self.exit_value

    def pre_run(self):
        """ Override for any pre-run checks.

            Returns: Return True if everything is ok.  Return
                False to stop the command.
        """
        return True

    def setup(self):
        """ Override this to implement any setup
        """

    def run(self):
        """ Override this to implement the command.

            This is the responsibility of the subclass.
        """
        raise NotImplementedError()

    def teardown(self):
        """ Override this to implement any cleanup

            Note that this only runs in the normal case.
        """
