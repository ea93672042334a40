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
"""Rationals as text, certificates and JSON-safe conversion."""

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
from gmpy2 import mpq

SAFE_TYPE = Optional[Union[bool, int, str, List['SAFE_TYPE'],
                           Dict[str, 'SAFE_TYPE']]]

REAL_DIGITS = 15
"""Significant digits of reals in serialized artifacts."""

ANCHORS: Dict[str, str] = {
    'divisibility-and-rank-of-apparition':
    'n | m gives B_n | B_m, and a good p divides B_m iff n_p | m',
    'descent-via-isogeny':
    'b_n | B_n | b_qn along the isogeny, with valuations that add up',
    'heights-and-growth':
    'log B_n grows like h n^2 and primitive parts keep most of it',
    'recursive-prime-sets':
    'fragment relations, partition of the primes and S-integrality',
    'membership':
    'p is decided from n_p and its rank among primitive primes of B_n_p',
    'unit-decomposition':
    'every non-zero rational is s t with s an S-unit and t a T-unit',
    'model-arithmetic':
    'addition and multiplication read off the y-coordinates of U',
    'summary':
    'every stage in one report',
    'valuation-chain':
    'ord_p(b_n) <= ord_p(B_n) <= ord_p(b_qn) at one good prime',
    'valuation-chain-all-good-primes':
    'b_n | B_n | b_qn away from the bad primes',
    'valuation-addition':
    'ord_l(b_qn) = ord_l(b_n) + ord_l(q) for a primitive prime l of b_n',
    'valuation-addition-all-primes':
    'valuation addition at every primitive prime of b_n',
    'fragments-good-reduction':
    'S1, S2, T1 and T2 hold only primes of good reduction',
    'S1-S2-disjoint':
    'S1 and S2 share no prime',
    'S2-T2-disjoint':
    'S2 and T2 share no prime',
    'T1-S1-disjoint':
    'T1 over U\' and S1 over U share no prime',
    'T2-disjoint-from-T1-S2':
    'T2 over U\' misses T1 and S2',
    'T2-meets-S1':
    'T2 over U\' and S1 may share primes',
    'model-addition':
    '|y_i + y_j - y_k| <= 3/10 exactly when i + j = k',
}
"""Descriptive anchor of every reported claim and what it asserts."""


def parse_rational(text: Union[str, int]) -> mpq:
    """
    Read ``num/den`` (or an integer) exactly.

    Raises
    ------
    ValueError
        ``text`` is not a rational
    """
    if isinstance(text, int):
        return mpq(text)
    num, _, den = str(text).strip().partition('/')
    return mpq(int(num), int(den) if den else 1)


def format_rational(value) -> str:
    """``num/den`` in lowest terms (denominator always written)."""
    value = mpq(value)
    return f'{value.numerator}/{value.denominator}'


@dataclass
class Certificate():
    """Machine-checkable record of one claim."""

    check: str
    """descriptive anchor of the claim"""

    params: Dict[str, Any] = field(default_factory=dict)
    valuations: Dict[str, Any] = field(default_factory=dict)
    verdict: Union[bool, str] = True

    def __post_init__(self):
        if self.check not in ANCHORS:
            raise ValueError(f'{self.check} is not a registered anchor')


def json_safe(unsafe: Any) -> SAFE_TYPE:
    """
    Resolve nested data into JSON-safe values.

    Integers stay integers however large, rationals become ``num/den``,
    reals become fixed-digit strings; anything else is stringified.
    """
    if unsafe is None or isinstance(unsafe, (bool, str, int)):
        return unsafe
    if isinstance(unsafe, Enum):
        return json_safe(unsafe.value)
    if type(unsafe).__name__ == 'mpz':
        return int(unsafe)
    if type(unsafe).__name__ == 'mpq':
        return format_rational(unsafe)
    if isinstance(unsafe, (float, mpmath.mpf)):
        return mpmath.nstr(mpmath.mpf(unsafe), REAL_DIGITS)
    if dataclasses.is_dataclass(unsafe) and not isinstance(unsafe, type):
        return serial_secure_map({
            fld.name: getattr(unsafe, fld.name)
            for fld in dataclasses.fields(unsafe)
        })
    if isinstance(unsafe, Mapping):
        return serial_secure_map(unsafe)
    if isinstance(unsafe, (set, frozenset)):
        return serial_secure_seq(sorted(unsafe))
    if isinstance(unsafe, Sequence):
        return serial_secure_seq(unsafe)
    return str(unsafe)


def serial_secure_seq(unsafe_seq: Sequence) -> List[SAFE_TYPE]:
    """Resolve Sequence for safe dumping."""
    return [json_safe(item) for item in unsafe_seq]


def serial_secure_map(unsafe_map: Mapping) -> Dict[str, SAFE_TYPE]:
    """Resolve Mapping for safe dumping; keys are stringified."""
    safe_map: Dict[str, SAFE_TYPE] = {}
    for key, value in unsafe_map.items():
        safe_key = json_safe(key)
        if not isinstance(safe_key, str):
            safe_key = str(safe_key)
        safe_map[safe_key] = json_safe(value)
    return safe_map


def format_point(point) -> Optional[Tuple[str, str]]:
    """``None`` for the identity, else both coordinates as ``num/den``."""
    if point is None:
        return None
    return format_rational(point[0]), format_rational(point[1])


def parse_point(coords: Optional[Sequence]) -> Optional[Tuple[mpq, mpq]]:
    if coords is None:
        return None
    if len(coords) != 2:
        raise ValueError(f'a point has two coordinates, got {coords}')
    return parse_rational(coords[0]), parse_rational(coords[1])
