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
"""edsdescent's defined errors."""

from pathlib import Path
from typing import Optional


class EdsDescentError(Exception):
    """Base error for EdsDescent(Exception)."""


class BadConf(EdsDescentError):
    """Bad configuration format or value."""

    def __init__(self, config_file: Optional[Path] = None, *args):
        if config_file is None:
            super().__init__('Bad configuration\n', *args)
        else:
            super().__init__(f'Bad configuration in {config_file}\n', *args)


class NotOnCurveError(EdsDescentError):
    """Point does not satisfy the Weierstrass equation."""

    def __init__(self, point, *args):
        super().__init__(f'{point} is not on the curve', *args)


class BadReductionError(EdsDescentError):
    """Prime divides the discriminant."""

    def __init__(self, prime: int, *args):
        super().__init__(f'{prime} is a prime of bad reduction', *args)
        self.prime = prime


class TorsionPointError(EdsDescentError):
    """Some multiple of the point is the identity."""

    def __init__(self, order: int, *args):
        super().__init__(f'point is torsion: {order} * P = O', *args)
        self.order = order


class PreconditionError(EdsDescentError):
    """Operation called outside its domain."""


class OutOfScopeError(EdsDescentError):
    """Input lies outside the supported family."""


class NoDescentError(EdsDescentError):
    """The isogeny image of Q' is neither Q nor -Q."""


class SearchExhausted(EdsDescentError):
    """
    No admissible prime below the search bound.

    Raised `from` the search of the index that could not be filled.
    """

    def __init__(self, index: int, bound: int, *args):
        super().__init__(f'no prime <= {bound} qualifies for index {index}',
                         *args)
        self.index = index
        self.bound = bound


class ScheduleTooLooseError(EdsDescentError):
    """Combined tolerance does not separate distinct integers."""


class DecompositionError(EdsDescentError):
    """A constituent prime could not be assigned to S or T."""

    def __init__(self, prime: int, *args):
        super().__init__(f'membership of {prime} is undecided', *args)
        self.prime = prime
