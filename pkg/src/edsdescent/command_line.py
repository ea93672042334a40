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
"""Command line inputs."""
import sys
from argparse import (ArgumentParser, ArgumentTypeError,
                      RawDescriptionHelpFormatter)
from pathlib import Path
from typing import Any, Dict

from argcomplete import autocomplete

from edsdescent.__about__ import __version__
from edsdescent.arith import is_prime
from edsdescent.utils import parse_rational

DESCRIPTION = '''
Elliptic divisibility sequences, descent via a 3-isogeny and the recursive
prime sets built from them.

Artifacts are written to --out (or $EDSDESCENT_OUTPUT).
exit codes: 0 success, 1 configuration or input error, 2 violation found,
3 search for U exhausted
'''


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise ValueError(text)
    return value


def _prime(text: str) -> int:
    value = _positive(text)
    if not is_prime(value):
        raise ArgumentTypeError(f'{text} is not prime')
    return value


def _cli() -> ArgumentParser:
    """Parser for autodoc."""
    parser = ArgumentParser(prog='edsdescent',
                            description=DESCRIPTION,
                            formatter_class=RawDescriptionHelpFormatter)
    # python bash/zsh completion
    parser.add_argument('-c',
                        '--config',
                        type=Path,
                        help='custom configuration file')
    parser.add_argument('-o', '--out', type=Path, help='output directory')
    parser.add_argument('-v',
                        '--verbose',
                        action='count',
                        default=0,
                        help='more logs (repeatable)')
    parser.add_argument('-q',
                        '--quiet',
                        action='store_true',
                        help='errors only')
    parser.add_argument('--budget',
                        type=_positive,
                        help='factoring work units per number')
    parser.add_argument('--rho-seed',
                        type=int,
                        help='seed of pollard rho and random trials')
    parser.add_argument('--precision',
                        type=_positive,
                        help='decimal digits of real computations')
    parser.add_argument(
        '--version',
        action='version',
        version='%(prog)s ' + ' '.join(
            (__version__, 'form', str(Path(__file__).resolve().parent),
             f'(python {sys.version_info.major}.{sys.version_info.minor})')))
    sub = parser.add_subparsers(dest='command', required=True)

    eds = sub.add_parser('eds', help='term table and divisibility laws')
    eds.add_argument('--max-n', type=_positive, help='terms generated')
    eds.add_argument('--values',
                     action='store_true',
                     help='write B_n itself into the table')

    sub.add_parser('isogeny-check',
                   help='descent sign, valuation chain and addition')
    sub.add_parser('heights', help='height ratio and primitive growth')

    sets = sub.add_parser('sets', help='recursive prime sets')
    sets_sub = sets.add_subparsers(dest='action', required=True)
    build = sets_sub.add_parser('build', help='index sets and fragments')
    build.add_argument('--mode', choices=('exact', 'complementary'))
    build.add_argument('--count', type=_positive, help='entries of U')
    build.add_argument('--search-bound',
                       type=_positive,
                       help='largest prime tried for U')
    build.add_argument('--schedule', choices=('strict', 'relaxed', 'custom'))
    decide = sets_sub.add_parser('decide', help='membership of one prime')
    decide.add_argument('--prime', type=_prime, required=True)
    decide.add_argument('--family',
                        default='S',
                        choices=('S', 'T', 'S1', 'S2', 'T1', 'T2'))

    decompose = sub.add_parser('decompose',
                               help='x = s t over the sets (exact mode)')
    decompose.add_argument('--rational',
                           type=parse_rational,
                           help='N/D; default: seeded random rationals')

    model = sub.add_parser('model', help='arithmetic read off U')
    model.add_argument('operation', nargs='?', choices=('add', 'mul'))
    model.add_argument('indices', nargs='*', type=_positive, metavar='I')

    sub.add_parser('report-all', help='every check and one summary')
    autocomplete(parser)
    return parser


def overrides(cli_args: Dict[str, Any]) -> Dict[str, Any]:
    """Configuration values given on the command line."""
    master: Dict[str, Any] = {}
    for key in ('budget', 'rho_seed', 'precision'):
        if cli_args.get(key) is not None:
            master[key] = cli_args[key]
    if cli_args.get('out') is not None:
        master['output'] = str(cli_args['out'])
    sets = {
        key: cli_args[key]
        for key in ('mode', 'count', 'search_bound', 'schedule')
        if cli_args.get(key) is not None
    }
    if sets:
        master['sets'] = sets
    return master


def cli() -> dict:
    """
    Command line arguments.

    Returns
    -------
    dict
        Command line arguments in dict form.
    """
    parser = _cli()
    cli_args = vars(parser.parse_args())
    if cli_args['command'] == 'model':
        if (cli_args['operation'] is None) != (not cli_args['indices']):
            parser.error('model takes an operation with three indices')
        if cli_args['indices'] and len(cli_args['indices']) != 3:
            parser.error('model takes exactly three indices I J K')
    return cli_args
