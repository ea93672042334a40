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
"""Command-line Callable.

module executable script: python -m edsdescent
"""

import logging
import sys

from edsdescent import pipeline
from edsdescent.command_line import cli, overrides
from edsdescent.config import load_config
from edsdescent.errors import BadConf, EdsDescentError, SearchExhausted

logger = logging.getLogger('edsdescent')

LOG_FORMAT = '%(name)s [%(levelname)s] %(message)s'

EXIT_INPUT = 1
EXIT_VIOLATION = 2
EXIT_EXHAUSTED = 3


def _set_verbosity(verbose: int, quiet: bool):
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    if quiet:
        logger.setLevel(logging.ERROR)
    else:
        logger.setLevel(max(logging.DEBUG, logging.WARNING - 10 * verbose))


def _run(session: pipeline.Session, cli_args: dict) -> pipeline.StageReport:
    command = cli_args['command']
    if command == 'eds':
        return pipeline.run_eds(session, cli_args['max_n'],
                                cli_args['values'])
    if command == 'isogeny-check':
        return pipeline.run_isogeny_check(session)
    if command == 'heights':
        return pipeline.run_heights(session)
    if command == 'sets':
        if cli_args['action'] == 'build':
            return pipeline.run_sets_build(session)
        return pipeline.run_sets_decide(session, cli_args['prime'],
                                        cli_args['family'])
    if command == 'decompose':
        return pipeline.run_decompose(session, cli_args['rational'])
    if command == 'model':
        return pipeline.run_model(session, cli_args['operation'],
                                  tuple(cli_args['indices']))
    return pipeline.report_all(session)


def main() -> int:
    """
    Entry Point executable.

    Returns
    -------
    int
        0 on success, 1 on a configuration or input error, 2 when a check
        fails, 3 when the search for ``U`` runs out of primes
    """
    cli_args = cli()
    _set_verbosity(cli_args['verbose'], cli_args['quiet'])
    try:
        config = load_config(cli_args['config'], overrides(cli_args))
    except (BadConf, FileNotFoundError) as err:
        logger.error('%s', err)
        return EXIT_INPUT
    session = pipeline.Session(config)
    try:
        report = _run(session, cli_args)
    except SearchExhausted as err:
        logger.error('%s; raise sets.search_bound', err)
        return EXIT_EXHAUSTED
    except (EdsDescentError, ValueError) as err:
        logger.error('%s', err)
        return EXIT_INPUT
    for name in report.artifacts:
        print(session.out / name)
    if report.unknown:
        logger.info('%d verdicts left Unknown', report.unknown)
    if report.violations:
        logger.warning('%d violations', report.violations)
        return EXIT_VIOLATION
    return 0


if __name__ == '__main__':
    sys.exit(main())
