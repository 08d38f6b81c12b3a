""" base.config unit tests

    Copyright (c) 2022 The recoverysim authors
    See LICENSE for details

"""

import json
import pathlib
import tempfile
import unittest

from recoverysim.base.config import DictConfig, FileConfig

# pylint: disable=missing-docstring


class TestDictConfig(unittest.TestCase):

    def setUp(self):
        self.config = DictConfig({
            'SCENARIO': {'n': 4, 'delta': 1, 'horizon': 10},
            'EXPECT': None,
        })

    def test_get_section(self):
        section = self.config.get_section('SCENARIO')
        self.assertEqual(4, section['n'])
        section['n'] = 7
        self.assertEqual(4, self.config.get_section('SCENARIO')['n'])
        self.assertRaises(KeyError, self.config.get_section, 'OTHER')

    def test_has_section(self):
        self.assertTrue(self.config.has_section('SCENARIO'))
        self.assertFalse(self.config.has_section('EXPECT'))
        self.assertFalse(self.config.has_section('OTHER'))

    def test_update(self):
        self.config.update({'EXPECT': {'outcome': 'pass'}})
        self.assertTrue(self.config.has_section('EXPECT'))


class TestFileConfig(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.path = pathlib.Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def write(self, name, text):
        path = self.path / name
        path.write_text(text, encoding='utf-8')
        return path

    def test_json_sections(self):
        path = self.write('a.json', json.dumps({
            'SCENARIO': {'n': 4}, 'EXPECT': {'outcome': 'fail',
                                             'failing': ['safety']}}))
        config = FileConfig(path)
        self.assertEqual({'n': 4}, config.get_section('SCENARIO'))
        self.assertEqual(['safety'], config.get_section('EXPECT')['failing'])

    def test_bare_json_scenario(self):
        config = FileConfig(self.write('b.json', '{"n": 7, "delta": 2}'))
        self.assertEqual(7, config.get_section('SCENARIO')['n'])
        self.assertFalse(config.has_section('EXPECT'))

    def test_python_file(self):
        config = FileConfig(self.write(
            'c.py', "SCENARIO = {'n': 3 + 1}\nIGNORED = 1\n"))
        self.assertEqual({'n': 4}, config.get_section('SCENARIO'))
        self.assertFalse(config.has_section('EXPECT'))

    def test_sample_scenario(self):
        sample = pathlib.Path(__file__).resolve().parent.parent / \
            'sample_scenario.py'
        config = FileConfig(sample)
        self.assertEqual('eve_confuser',
                         config.get_section('SCENARIO')['adversary']
                         ['strategy'])

    def test_missing_file(self):
        self.assertRaises(FileNotFoundError, FileConfig,
                          self.path / 'missing.json')

    def test_bad_json(self):
        self.assertRaises(ValueError, FileConfig,
                          self.write('d.json', '{"n": '))


if __name__ == '__main__':
    unittest.main()
