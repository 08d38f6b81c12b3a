""" Root module for the basic modules of the recoverysim tool.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""


class RecoverysimConfigError(Exception):
    """ Exception: The scenario configuration is invalid.

        Attributes:
            problems: A list of strings, one per violated constraint.
    """
    def __init__(self, text, problems=None):
        super().__init__()
        self.text = text
        self.problems = list(problems or [])

    def __str__(self):
        if not self.problems:
            return self.text
        return self.text + ': ' + '; '.join(self.problems)


class RecoverysimScenarioError(Exception):
    """ Exception: A model contract was broken while the scenario ran. """
    def __init__(self, text):
        super().__init__()
        self.text = text

    def __str__(self):
        return self.text


class RecoverysimHarnessError(Exception):
    """ Exception: The harness was driven incorrectly. """
    def __init__(self, text):
        super().__init__()
        self.text = text

    def __str__(self):
        return self.text


class RecoverysimVerdictError(Exception):
    """ Exception: One or more checkers reported a violation. """
    def __init__(self, text, verdicts=None):
        super().__init__()
        self.text = text
        self.verdicts = list(verdicts or [])

    def __str__(self):
        return self.text


class RecoverysimDemoError(Exception):
    """ Exception: A demo did not reproduce its expected outcome. """
    def __init__(self, text):
        super().__init__()
        self.text = text

    def __str__(self):
        return self.text
