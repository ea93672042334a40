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
unit tests

Shared builders for the pinned example: ``y^2 = x^3 - 4`` with
``Q = (2, 2)`` and its 3-isogenous partner ``y^2 = x^3 + 108`` with
``Q' = (6, 18)``.
"""

from functools import lru_cache

from gmpy2 import mpq

from edsdescent.curve import CurveSpec
from edsdescent.descent import DescentPair, companion_eds
from edsdescent.eds import EdsTable, curve_constants, eds_terms

EXAMPLE_COEFFS = (0, 0, 0, 0, -4)
EXAMPLE_POINT = (mpq(2), mpq(2))
EXAMPLE_PRIME_POINT = (mpq(6), mpq(18))


def example_curve() -> CurveSpec:
    return CurveSpec.from_coefficients(EXAMPLE_COEFFS)


@lru_cache(maxsize=4)
def example_terms(count: int = 60) -> EdsTable:
    return eds_terms(example_curve(), EXAMPLE_POINT, count)


@lru_cache(maxsize=1)
def example_pair() -> DescentPair:
    return DescentPair.from_config(108, 3, EXAMPLE_PRIME_POINT,
                                   point=EXAMPLE_POINT)


@lru_cache(maxsize=2)
def example_small_terms(count: int = 90) -> EdsTable:
    return companion_eds(example_pair(), count)


def example_constants(count: int = 60):
    return curve_constants(example_terms(count))
