#!/usr/bin/env python3
# -*- coding: utf-8; mode: python; -*-
# Copyright © 2024 Pradyumna Paranjape
#
# This file is part of edsdescent.
#
# edsdescent is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# edsdescent is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with edsdescent. If not, see <https://www.gnu.org/licenses/>.
#
"""
Test the command line surface
"""

import csv
import io
import json
import os
import tempfile
from contextlib import redirect_stdout
from pathlib import Path
from unittest import TestCase, mock

from edsdescent.__main__ import main
from edsdescent.command_line import _cli, cli, overrides

SMALL_RC = '''
bounds:
  terms: 40
  prime_bound: 50
  height_window: [10, 40]
  table_budget: 10000
precision: 40
'''

SETS_RC = SMALL_RC + '''
sets:
  prime_bound: 200
  term_limit: 40
'''


class TestParser(TestCase):

    def test_globals(self):
        args = vars(_cli().parse_args(
            ['-vv', '--budget', '100', '-o', 'out', 'eds', '--max-n', '5']))
        self.assertEqual(args['verbose'], 2)
        self.assertEqual(args['command'], 'eds')
        self.assertEqual(args['max_n'], 5)
        self.assertEqual(overrides(args), {'budget': 100, 'output': 'out'})

    def test_sets_overrides(self):
        args = vars(_cli().parse_args(
            ['sets', 'build', '--mode', 'complementary', '--count', '2']))
        self.assertEqual(overrides(args),
                         {'sets': {
                             'mode': 'complementary',
                             'count': 2
                         }})

    def test_rational(self):
        args = vars(_cli().parse_args(['decompose', '--rational', '-4/9']))
        self.assertEqual(args['rational'].numerator, -4)
        self.assertEqual(args['rational'].denominator, 9)

    def test_rejects(self):
        with redirect_stdout(io.StringIO()), mock.patch('sys.stderr'):
            for argv in (['eds', '--max-n', '0'], ['sets'],
                         ['sets', 'decide', '--family', 'S']):
                with self.assertRaises(SystemExit, msg=str(argv)):
                    _cli().parse_args(argv)

    def test_model_arity(self):
        with mock.patch('sys.stderr'):
            for argv in (['model', 'add', '1', '2'], ['model', '1', '2']):
                with mock.patch('sys.argv', ['edsdescent', *argv]):
                    with self.assertRaises(SystemExit, msg=str(argv)):
                        cli()
        with mock.patch('sys.argv', ['edsdescent', 'model']):
            self.assertIsNone(cli()['operation'])


class TestMain(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.rc = self.root / 'rc.yml'
        self.rc.write_text(SMALL_RC)
        self.out = self.root / 'out'
        self.env = mock.patch.dict(os.environ,
                                   {'XDG_CONFIG_HOME': str(self.root)})
        self.env.start()
        for var in ('EDSDESCENTRC', 'EDSDESCENT_OUTPUT'):
            os.environ.pop(var, None)

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()

    def run_main(self, *argv: str, config=None) -> int:
        config = self.rc if config is None else config
        args = ['edsdescent', '-q', '-c', str(config), '-o', str(self.out)]
        with mock.patch('sys.argv', args + list(argv)):
            with redirect_stdout(io.StringIO()):
                return main()

    def test_eds(self):
        self.assertEqual(self.run_main('eds', '--max-n', '10'), 0)
        with open(self.out / 'eds_terms.csv', newline='') as table:
            rows = list(csv.reader(table))
        self.assertEqual(len(rows), 11)
        self.assertEqual(rows[3][:2], ['3', '1'])
        constants = json.loads((self.out / 'eds_constants.json').read_text())
        self.assertEqual(constants['b'], 4)
        self.assertEqual(constants['curve'], [0, 0, 0, 0, -4])
        self.assertEqual(constants['Q'], ['2/1', '2/1'])

    def test_deterministic(self):
        self.assertEqual(self.run_main('eds', '--max-n', '10'), 0)
        first = (self.out / 'eds_constants.json').read_bytes()
        self.assertEqual(self.run_main('eds', '--max-n', '10'), 0)
        self.assertEqual((self.out / 'eds_constants.json').read_bytes(),
                         first)

    def test_bad_config(self):
        bad = self.root / 'bad.yml'
        bad.write_text('bounds:\n  depth: 3\n')
        self.assertEqual(self.run_main('eds', config=bad), 1)
        self.assertFalse(self.out.exists())

    def test_decompose_needs_exact(self):
        rc = self.root / 'complementary.yml'
        rc.write_text(SMALL_RC + 'sets:\n  mode: complementary\n')
        self.assertEqual(
            self.run_main('decompose', '--rational', '5/7', config=rc), 1)

    def test_model(self):
        self.assertEqual(self.run_main('model', 'add', '1', '2', '3'), 0)
        record = json.loads((self.out / 'model_add.json').read_text())
        self.assertEqual(record['verdicts'], {
            'add(1,2,3)': True,
            'agrees-with-integers': True
        })

    def test_malformed_window(self):
        rc = self.root / 'window.yml'
        rc.write_text(SMALL_RC.replace('[10, 40]', '7'))
        self.assertEqual(self.run_main('eds', config=rc), 1)

    def test_prime_argument(self):
        with mock.patch('sys.stderr'), self.assertRaises(SystemExit):
            self.run_main('sets', 'decide', '--prime', '4')

    def test_search_exhausted(self):
        self.assertEqual(
            self.run_main('sets', 'build', '--search-bound', '30'), 3)


class TestStages(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.rc = self.root / 'rc.yml'
        self.rc.write_text(SETS_RC)
        self.out = self.root / 'out'
        self.env = mock.patch.dict(os.environ,
                                   {'XDG_CONFIG_HOME': str(self.root)})
        self.env.start()
        for var in ('EDSDESCENTRC', 'EDSDESCENT_OUTPUT'):
            os.environ.pop(var, None)

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()

    def run_main(self, *argv: str) -> int:
        args = ['edsdescent', '-q', '-c', str(self.rc), '-o', str(self.out)]
        with mock.patch('sys.argv', args + list(argv)):
            with redirect_stdout(io.StringIO()):
                return main()

    def load(self, name: str):
        return json.loads((self.out / name).read_text())

    def test_isogeny_check(self):
        self.assertEqual(self.run_main('isogeny-check'), 0)
        self.assertTrue((self.out / 'isogeny_check.json').is_file())
        self.assertTrue((self.out / 'two_primitive_divisors.json').is_file())

    def test_heights(self):
        self.assertIn(self.run_main('heights'), (0, 2))
        self.assertTrue((self.out / 'heights.json').is_file())

    def test_sets_build(self):
        self.assertEqual(self.run_main('sets', 'build'), 0)
        record = self.load('sets.json')
        self.assertEqual(record['integrality']['exceptions'], [1, 2])
        for name in ('S1', 'S2', 'T1', 'T2'):
            self.assertTrue((self.out / f'{name}.csv').is_file())

    def test_sets_decide(self):
        self.assertEqual(self.run_main('sets', 'decide', '--prime', '41'), 0)
        record = self.load('decide_S_41.json')
        self.assertEqual(record['membership']['verdict'], 'In')

    def test_decompose_budget(self):
        self.assertEqual(self.run_main('decompose', '--rational', '2501'), 0)
        row = self.load('decompose.json')['rows'][0]
        self.assertEqual(row['status'], 'ok')
        self.assertEqual((row['s'], row['t']), ('41/1', '61/1'))
        self.assertEqual(
            self.run_main('--budget', '5', 'decompose', '--rational',
                          '2501'), 0)
        row = self.load('decompose.json')['rows'][0]
        self.assertEqual(row['status'], 'Unknown')

    def test_report_all(self):
        first = self.run_main('report-all')
        self.assertIn(first, (0, 2))
        summary = (self.out / 'summary.json').read_bytes()
        self.assertEqual(self.run_main('report-all'), first)
        self.assertEqual((self.out / 'summary.json').read_bytes(), summary)
        anchors = json.loads(summary)['anchors']
        self.assertIn('recursive-prime-sets', anchors)
