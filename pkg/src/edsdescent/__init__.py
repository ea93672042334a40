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
Elliptic divisibility sequences and descent.

Exact group law, EDS terms and their primitive divisors, descent through a
3-isogeny and the recursive prime sets built from the sequence.
"""

from edsdescent import utils
from edsdescent.config import RunConfig, load_config
from edsdescent.curve import CurveSpec
from edsdescent.descent import DescentPair
from edsdescent.eds import EdsTable, eds_terms
from edsdescent.pipeline import Session
from edsdescent.sets import PrimeSetFamily, assemble

__all__ = [
    'CurveSpec', 'DescentPair', 'EdsTable', 'PrimeSetFamily', 'RunConfig',
    'Session', 'assemble', 'eds_terms', 'load_config', 'utils'
]
