""" Configuration support

    A configuration is a set of named sections.  Scenario files use two
    of them: SCENARIO, the scenario itself (see harness.scenario for
    its schema), and the optional EXPECT, the outcome the suite
    expects, either {"outcome": "pass"} or
    {"outcome": "fail", "failing": [checker names]}.

    Sections can be sourced from a JSON file, a python file (its
    upper-case globals) or an in-memory dict.

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import copy
import json
import pathlib
import runpy

SECTIONS = ('SCENARIO', 'EXPECT')


class Config:
    """ Base class for all configuration objects.  Usually the
        derived classes will setup the self._config dict().
    """
    def __init__(self):
        self._config = {}

    def get_section(self, section_name):
        """ Returns a copy of the configuration section.

            Args:
                section_name: e.g. 'SCENARIO'

            Raises:
                KeyError: no such section.
        """
        return copy.deepcopy(self._config[section_name])

    def has_section(self, section_name):
        return self._config.get(section_name) is not None

    def update(self, new_entries):
        """ Update the configuration with new data.

            Arguments:
                new_entries: The new data to add/update.
        """
        self._config.update(new_entries)


class FileConfig(Config):
    """ Provide the configuration from a file.

        A '.json' file holds either the sections as top-level keys, or
        a bare scenario object (which becomes the SCENARIO section).
        Any other file is run as python and its SCENARIO and EXPECT
        globals are collected.
    """

    def __init__(self, file_name):
        """ Initialize from the given file_name

            Raises:
                FileNotFoundError: file_name is not a file.
                ValueError: the JSON cannot be parsed.
        """
        super().__init__()

        path = pathlib.Path(file_name)
        if not path.is_file():
            raise FileNotFoundError(file_name)
        self.path = path

        if path.suffix == '.json':
            data = json.loads(path.read_text(encoding='utf-8'))
            if isinstance(data, dict) and \
                    not any(section in data for section in SECTIONS):
                data = {'SCENARIO': data}
            for section in SECTIONS:
                self._config[section] = data.get(section)
        else:
            new_globals = runpy.run_path(str(path))
            for section in SECTIONS:
                self._config[section] = new_globals.get(section)


class DictConfig(Config):
    """ Provide the configuration from a pre-existing dictionary.
    """
    def __init__(self, initial_config):
        """ Dictionary-based configuration

            Args:
                initial_config: section name -> section.
        """
        super().__init__()
        self._config = initial_config
