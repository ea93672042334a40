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
r"""
Run configuration.

Order
-----
Most to least- dominant order of configuration files.

- custom supplied (``--config``) [Optional]
- ``$EDSDESCENTRC`` [Optional]
- ``${XDG_CONFIG_HOME:-~/.config}/edsdescent/config.*``
- ``${XDG_CONFIG_DIRS}/edsdescent/config.*``
- ``/etc/xdg/edsdescent/config.*``
- shipped ``defaults.yml``

Files are superimposed least-dominant first; command line overrides
are applied last.
"""

import logging
import os
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

from edsdescent.config_io import parse_rc
from edsdescent.errors import BadConf
from edsdescent.utils import parse_point

logger = logging.getLogger(__name__)

PROJECT = 'edsdescent'

CONF_EXT = '.yml', '.yaml', '.json', '.toml'
"""Extensions that are supported (parsed) by this module."""

SHIPPED = Path(__file__).resolve().parent / 'defaults.yml'
"""Defaults shipped with the package."""

OUTPUT_VAR = 'EDSDESCENT_OUTPUT'
"""Environment variable overriding the output directory."""


class _Section():
    """Common ``update`` of configuration sections."""

    def update(self, master: Dict[str, Any]):
        """
        Update values.

        Parameters
        ----------
        master : Dict[str, Any]
            update with these values

        Raises
        ------
        KeyError
            unknown key
        """
        for key, val in master.items():
            if key not in self.__dict__:
                raise KeyError(f'{key} is not a recognised key')
            current = getattr(self, key)
            if is_dataclass(current) and isinstance(val, dict):
                current.update(val)
            else:
                setattr(self, key, val)


@dataclass
class CurveConf(_Section):
    """Curve and point; rationals as ``num/den`` strings."""

    a: List[int] = field(default_factory=lambda: [0, 0, 0, 0, -4])
    """[a1, a2, a3, a4, a6]"""

    Q: List[str] = field(default_factory=lambda: ['2/1', '2/1'])
    """distinguished non-torsion point"""

    trusted_generator: bool = True
    """``E(Q) = <Q>`` is asserted, not checked"""


@dataclass
class IsogenyConf(_Section):
    """``sigma: y^2 = x^3 + a  ->  y^2 = x^3 - 27a / u^6``"""

    a: int = 108
    u: int = 3
    q: int = 3
    Qprime: List[str] = field(default_factory=lambda: ['6/1', '18/1'])


@dataclass
class BoundsConf(_Section):
    """Scan bounds."""

    terms: int = 120
    """terms of B generated"""

    chain: int = 30
    """indices of the valuation chain (b is generated to q * chain)"""

    prime_bound: int = 200
    """primes scanned for L and the rank law"""

    classify: int = 40
    """indices classified for two primitive divisors"""

    height_window: List[int] = field(default_factory=lambda: [40, 100])
    growth_window: int = 40
    """primitive growth is asserted from this index on"""

    table_budget: int = 10**5
    """factoring budget per primitive part (term table and prime sets)"""

    integrality: int = 40
    """indices checked for S-integrality"""


@dataclass
class SetsConf(_Section):
    """Recursive prime set construction."""

    mode: str = 'exact'
    schedule: str = 'strict'
    scale: str = '1/10'
    """custom schedule: tolerance scale / i"""

    count: int = 3
    search_bound: int = 100000
    prime_bound: int = 10000
    """primes decided in bulk and scanned into S1 / T1"""

    term_limit: int = 120
    """terms may be extended up to this index by membership decisions"""


@dataclass
class RunConfig(_Section):
    """Everything a run depends on."""

    curve: CurveConf = field(default_factory=CurveConf)
    isogeny: IsogenyConf = field(default_factory=IsogenyConf)
    bounds: BoundsConf = field(default_factory=BoundsConf)
    sets: SetsConf = field(default_factory=SetsConf)
    budget: int = 10**7
    rho_seed: int = 0
    precision: int = 50
    output: str = 'edsdescent-out'

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _dir_cnames(parents: List[Path], cname: str = 'config') -> List[Path]:
    """Potential config file names in parent locations."""
    return [(loc / cname).with_suffix(ext)
            for loc in parents for ext in CONF_EXT]


def xdg_locations() -> List[Path]:
    """User then root configuration directories; first is most dominant."""
    home = os.environ.get('XDG_CONFIG_HOME')
    user = [Path(home) if home else Path.home() / '.config']
    dirs = os.environ.get('XDG_CONFIG_DIRS')
    if dirs:
        user.extend(Path(loc) for loc in dirs.split(os.pathsep) if loc)
    root = [Path('/etc/xdg')]
    return [loc / PROJECT for loc in (*user, *root)]


def discover_config(custom: Optional[Path] = None) -> List[Path]:
    """
    Readable configuration files, most dominant first.

    Parameters
    ----------
    custom : Optional[Path]
        custom configuration file (assumed to exist)

    Returns
    -------
    List[Path]
        configuration paths

    Raises
    ------
    FileNotFoundError
        ``$EDSDESCENTRC`` names a missing file
    """
    dom_order: List[Path] = []
    if custom is not None:
        # assume existence and proceed
        dom_order.append(Path(custom))
    rc_val = os.environ.get(PROJECT.upper() + 'RC')
    if rc_val is not None:
        if not Path(rc_val).is_file():
            raise FileNotFoundError(
                f'RC configuration file: {rc_val} not found')
        dom_order.append(Path(rc_val))
    candidates = _dir_cnames(xdg_locations()) + [SHIPPED]
    dom_order.extend(
        loc for loc in candidates
        if loc.is_file() and os.access(loc, os.R_OK))
    return dom_order


def _validate(config: RunConfig, source: Optional[Path] = None):
    bounds = config.bounds
    positive = {
        'bounds.terms': bounds.terms,
        'bounds.chain': bounds.chain,
        'bounds.prime_bound': bounds.prime_bound,
        'bounds.classify': bounds.classify,
        'bounds.growth_window': bounds.growth_window,
        'bounds.table_budget': bounds.table_budget,
        'bounds.integrality': bounds.integrality,
        'sets.count': config.sets.count,
        'sets.search_bound': config.sets.search_bound,
        'sets.prime_bound': config.sets.prime_bound,
        'sets.term_limit': config.sets.term_limit,
        'budget': config.budget,
        'precision': config.precision,
    }
    bad = [key for key, val in positive.items()
           if not isinstance(val, int) or val <= 0]
    if bad:
        raise BadConf(source, f'not positive integers: {bad}')
    if config.sets.schedule not in ('strict', 'relaxed', 'custom'):
        raise BadConf(source, f'unknown schedule {config.sets.schedule}')
    if config.sets.mode not in ('exact', 'complementary'):
        raise BadConf(source, f'unknown mode {config.sets.mode}')
    try:
        low, high = bounds.height_window
        window = 2 <= low < high <= bounds.terms
    except (TypeError, ValueError):
        window = False
    if not window:
        raise BadConf(source, f'height window {bounds.height_window}')
    if len(config.curve.a) not in (2, 5):
        raise BadConf(source, f'curve coefficients {config.curve.a}')
    try:
        parse_point(config.curve.Q)
        parse_point(config.isogeny.Qprime)
    except (TypeError, ValueError, ZeroDivisionError) as err:
        raise BadConf(source, str(err)) from err


def load_config(custom: Optional[Path] = None,
                overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Superimpose discovered configurations and overrides.

    Parameters
    ----------
    custom : Optional[Path]
        custom configuration file
    overrides : Optional[Dict[str, Any]]
        most dominant values (e.g. from the command line)

    Returns
    -------
    RunConfig
        validated configuration

    Raises
    ------
    BadConf
        unparsable file, unknown key or invalid value
    """
    config = RunConfig()
    for path in reversed(discover_config(custom)):
        try:
            data = parse_rc(path)
        except (FileNotFoundError, IsADirectoryError) as err:
            raise BadConf(path, str(err)) from err
        logger.debug('configuration from %s', path)
        try:
            config.update(data)
        except KeyError as err:
            raise BadConf(path, str(err)) from err
    if os.environ.get(OUTPUT_VAR):
        config.output = os.environ[OUTPUT_VAR]
    try:
        config.update(overrides or {})
    except KeyError as err:
        raise BadConf(None, str(err)) from err
    _validate(config)
    return config


def section_names() -> List[str]:
    """Top-level keys of the configuration."""
    return [fld.name for fld in fields(RunConfig)]
