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
"""Read configurations, write artifacts."""

import csv
import json
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, Sequence, TextIO

import pyjson5
import toml
import yaml

from edsdescent.errors import BadConf
from edsdescent.utils import json_safe


def parse_yaml(config: Path) -> Dict[str, Any]:
    """
    Read yaml configuration.

    Parameters
    ----------
    config : Path
        path to yaml config file

    Returns
    -------
    Dict[str, Any]
        parsed configuration

    Raises
    ------
    BadConf
        Configuration is not a yaml mapping
    """
    with open(config, 'r') as rcfile:
        conf = yaml.safe_load(rcfile)
    if not isinstance(conf, dict):
        raise BadConf(config_file=config)
    return conf


def parse_json(config: Path) -> Dict[str, Any]:
    """Read json (json5) configuration."""
    with open(config, 'r') as rcfile:
        conf = pyjson5.load(rcfile)
    if not isinstance(conf, dict):
        raise BadConf(config_file=config)
    return conf


def parse_toml(config: Path) -> Dict[str, Any]:
    """Read toml configuration."""
    with open(config, 'r') as rcfile:
        conf: Dict[str, Any] = toml.load(rcfile)
    return conf


def parse_rc(config: Path) -> Dict[str, Any]:
    """
    Parse rc file.

    The suffix picks the parser; unknown suffixes fall through
    yaml, json and toml in that order.

    Parameters
    ----------
    config : Path
        path to configuration file

    Returns
    -------
    Dict[str, Any]
        configuration sections

    Raises
    ------
    BadConf
        Bad configuration

    """
    parsers = {
        '.yml': parse_yaml,
        '.yaml': parse_yaml,
        '.json': parse_json,
        '.toml': parse_toml
    }
    if config.suffix in parsers:
        try:
            return parsers[config.suffix](config)
        except (yaml.YAMLError, pyjson5.Json5Exception,
                toml.TomlDecodeError) as err:
            raise BadConf(config, str(err)) from err
    try:
        # yaml configuration format
        return parse_yaml(config)
    except (BadConf, yaml.YAMLError):
        try:
            # JSON object
            return parse_json(config)
        except (BadConf, pyjson5.Json5Exception):
            try:
                # toml configuration format
                return parse_toml(config)
            except toml.TomlDecodeError:
                raise BadConf(config_file=config)


@contextmanager
def _atomic_open(path: Path) -> Iterator[TextIO]:
    """
    Stream to a sibling temporary file that replaces ``path`` on success.

    The temporary file is removed if writing fails.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, tmp = tempfile.mkstemp(dir=path.parent,
                                   prefix=f'.{path.name}.',
                                   suffix='.tmp')
    try:
        with os.fdopen(handle, 'w', newline='') as stream:
            yield stream
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_json(data: Any, path: Path) -> Path:
    """
    Serialize ``data`` atomically.

    Keys are sorted and indented so that equal data gives equal bytes.

    Parameters
    ----------
    data : Any
        artifact (anything :func:`edsdescent.utils.json_safe` resolves)
    path : Path
        destination

    Returns
    -------
    Path
        destination
    """
    with _atomic_open(path) as stream:
        json.dump(json_safe(data), stream, sort_keys=True, indent=2)
        stream.write('\n')
    return path


def write_csv(rows: Iterable[Sequence], header: Sequence[str],
              path: Path) -> Path:
    """Write a table atomically."""
    with _atomic_open(path) as stream:
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow(json_safe(list(row)))
    return path


def write_yaml(data: Dict[str, Any], path: Path) -> Path:
    """Dump a configuration (e.g. the effective one) as yaml."""
    with _atomic_open(path) as stream:
        yaml.safe_dump(json_safe(data), stream, sort_keys=True)
    return path
