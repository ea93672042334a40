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
Elliptic curves over the rationals and over prime fields.

Points are plain tuples; the identity is ``None``.

.. code-block:: text

    y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6

Rational coordinates are :class:`gmpy2.mpq` (always in lowest terms with a
positive denominator), residues are :class:`int` in ``[0, p)``.
"""

import logging
import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import lcm
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import gmpy2
import mpmath
from gmpy2 import mpq, mpz
from sympy.ntheory.residue_ntheory import sqrt_mod

from edsdescent.arith import factor, prime_factors
from edsdescent.errors import (BadReductionError, NotOnCurveError,
                               TorsionPointError)

logger = logging.getLogger(__name__)

RatPoint = Optional[Tuple[mpq, mpq]]
"""Rational point; ``None`` is the identity"""

ModPoint = Optional[Tuple[int, int]]
"""Point on the reduced curve; ``None`` is the identity"""

EXHAUSTIVE_COUNT_BOUND = 2**16
"""Below this, ``|E(F_p)|`` is counted point by point."""

MAZUR_BOUND = 12
"""No rational torsion point has order above this."""


@dataclass(frozen=True)
class CurveSpec():
    """Integral Weierstrass model."""

    a1: int = 0
    a2: int = 0
    a3: int = 0
    a4: int = 0
    a6: int = 0

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError(f'singular curve {self.coefficients}')

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[int]) -> 'CurveSpec':
        """
        Build from ``[a1, a2, a3, a4, a6]``.

        A two-element sequence is read as ``[a4, a6]`` of a short model.
        """
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) == 2:
            return cls(a4=coeffs[0], a6=coeffs[1])
        if len(coeffs) != 5:
            raise ValueError(f'expected 5 coefficients, got {coeffs}')
        return cls(*coeffs)

    @property
    def coefficients(self) -> Tuple[int, int, int, int, int]:
        return self.a1, self.a2, self.a3, self.a4, self.a6

    @property
    def b2(self) -> int:
        return self.a1**2 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3**2 + 4 * self.a6

    @property
    def b8(self) -> int:
        return (self.a1**2 * self.a6 + 4 * self.a2 * self.a6 -
                self.a1 * self.a3 * self.a4 + self.a2 * self.a3**2 -
                self.a4**2)

    @property
    def c4(self) -> int:
        return self.b2**2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @cached_property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2**2 * b8 - 8 * b4**3 - 27 * b6**2 + 9 * b2 * b4 * b6

    @cached_property
    def bad_primes(self) -> Tuple[int, ...]:
        """Prime divisors of the discriminant."""
        report = factor(abs(self.discriminant))
        if not report.complete:  # pragma: no cover
            raise ValueError('discriminant resisted factorization')
        return tuple(report.primes)

    @property
    def is_short_form(self) -> bool:
        return self.a1 == self.a2 == self.a3 == 0

    def is_good(self, prime: int) -> bool:
        """``prime`` does not divide the discriminant."""
        return self.discriminant % prime != 0

    def __str__(self) -> str:
        return f'E{list(self.coefficients)}'


def on_curve(curve: CurveSpec, point: RatPoint) -> bool:
    """``point`` is the identity or satisfies the equation exactly."""
    if point is None:
        return True
    x, y = mpq(point[0]), mpq(point[1])
    a1, a2, a3, a4, a6 = curve.coefficients
    return (y * y + a1 * x * y + a3 * y == x**3 + a2 * x * x + a4 * x + a6)


def neg(curve: CurveSpec, point: RatPoint) -> RatPoint:
    if point is None:
        return None
    x, y = point
    return x, -y - curve.a1 * x - curve.a3


def add(curve: CurveSpec, first: RatPoint, second: RatPoint) -> RatPoint:
    """
    Chord-tangent sum.

    Parameters
    ----------
    curve : CurveSpec
        curve
    first : RatPoint
        summand on ``curve``
    second : RatPoint
        summand on ``curve``

    Returns
    -------
    RatPoint
        ``first + second``
    """
    if first is None:
        return second
    if second is None:
        return first
    a1, a2, a3, a4, a6 = curve.coefficients
    x1, y1 = first
    x2, y2 = second
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return None
        denom = 2 * y1 + a1 * x1 + a3
        slope = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / denom
        icept = (-x1**3 + a4 * x1 + 2 * a6 - a3 * y1) / denom
    else:
        slope = (y2 - y1) / (x2 - x1)
        icept = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = slope * slope + a1 * slope - a2 - x1 - x2
    y3 = -(slope + a1) * x3 - icept - a3
    return mpq(x3), mpq(y3)


def scalar_mul(curve: CurveSpec, point: RatPoint, n: int) -> RatPoint:
    """``n * point`` by double-and-add."""
    if n < 0:
        return scalar_mul(curve, neg(curve, point), -n)
    result: RatPoint = None
    addend = point
    while n:
        if n & 1:
            result = add(curve, result, addend)
        addend = add(curve, addend, addend)
        n >>= 1
    return result


def multiples(curve: CurveSpec, point: RatPoint, count: int) -> List[RatPoint]:
    """
    ``[1P, 2P, ..., count P]`` by repeated addition.

    Raises
    ------
    TorsionPointError
        some multiple is the identity
    """
    out: List[RatPoint] = []
    current: RatPoint = None
    for index in range(1, count + 1):
        current = add(curve, current, point)
        if current is None:
            raise TorsionPointError(index)
        out.append(current)
        if index % 50 == 0:
            logger.debug('multiple %d: %d-digit x denominator', index,
                         len(str(current[0].denominator)))
    return out


def x_denominator_root(point: RatPoint) -> int:
    """``B`` with ``x(P) = A / B**2``; ``0`` for the identity."""
    if point is None:
        return 0
    root, exact = gmpy2.iroot(mpz(point[0].denominator), 2)
    if not exact:
        raise ValueError('x denominator is not a square')
    return int(root)


def _check_good(curve: CurveSpec, prime: int):
    if not curve.is_good(prime):
        raise BadReductionError(prime)


def reduce_point(curve: CurveSpec, point: RatPoint, prime: int) -> ModPoint:
    """
    Reduce a rational point modulo a good prime.

    Raises
    ------
    BadReductionError
        ``prime`` divides the discriminant
    """
    _check_good(curve, prime)
    if point is None or point[0].denominator % prime == 0:
        return None
    x, y = point
    return (int(x.numerator * pow(int(x.denominator), -1, prime) % prime),
            int(y.numerator * pow(int(y.denominator), -1, prime) % prime))


def add_mod(curve: CurveSpec, first: ModPoint, second: ModPoint,
            prime: int) -> ModPoint:
    """Group law on the reduced curve."""
    if first is None:
        return second
    if second is None:
        return first
    a1, a2, a3, a4, a6 = (c % prime for c in curve.coefficients)
    x1, y1 = first
    x2, y2 = second
    if x1 == x2:
        if (y1 + y2 + a1 * x2 + a3) % prime == 0:
            return None
        inv = pow(2 * y1 + a1 * x1 + a3, -1, prime)
        slope = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * inv
        icept = (-x1**3 + a4 * x1 + 2 * a6 - a3 * y1) * inv
    else:
        inv = pow(x2 - x1, -1, prime)
        slope = (y2 - y1) * inv
        icept = (y1 * x2 - y2 * x1) * inv
    slope %= prime
    x3 = (slope * slope + a1 * slope - a2 - x1 - x2) % prime
    y3 = (-(slope + a1) * x3 - icept - a3) % prime
    return x3, y3


def neg_mod(curve: CurveSpec, point: ModPoint, prime: int) -> ModPoint:
    if point is None:
        return None
    x, y = point
    return x, (-y - curve.a1 * x - curve.a3) % prime


def scalar_mul_mod(curve: CurveSpec, point: ModPoint, n: int,
                   prime: int) -> ModPoint:
    if n < 0:
        return scalar_mul_mod(curve, neg_mod(curve, point, prime), -n, prime)
    result: ModPoint = None
    addend = point
    while n:
        if n & 1:
            result = add_mod(curve, result, addend, prime)
        addend = add_mod(curve, addend, addend, prime)
        n >>= 1
    return result


def points_mod_p(curve: CurveSpec, prime: int) -> Iterator[ModPoint]:
    """All affine points of the reduced curve (brute force, small p)."""
    a1, a2, a3, a4, a6 = curve.coefficients
    for x in range(prime):
        rhs = (x**3 + a2 * x * x + a4 * x + a6) % prime
        for y in range(prime):
            if (y * y + a1 * x * y + a3 * y - rhs) % prime == 0:
                yield x, y


@lru_cache(maxsize=4096)
def _count_points(curve: CurveSpec, prime: int) -> int:
    if prime == 2:
        return 1 + sum(1 for _ in points_mod_p(curve, prime))
    squares = [0] * prime
    for y in range(prime):
        squares[y * y % prime] += 1
    a1, a2, a3, a4, a6 = curve.coefficients
    total = 1
    for x in range(prime):
        lin = a1 * x + a3
        total += squares[(4 * (x**3 + a2 * x * x + a4 * x + a6) + lin * lin) %
                         prime]
    return total


def _hasse_interval(prime: int) -> Tuple[int, int]:
    width = int(gmpy2.isqrt(4 * prime))
    return max(1, prime + 1 - width), prime + 1 + width


def _random_point(curve: CurveSpec, prime: int,
                  rng: random.Random) -> ModPoint:
    a1, a2, a3, a4, a6 = curve.coefficients
    while True:
        x = rng.randrange(prime)
        lin = (a1 * x + a3) % prime
        disc = (4 * (x**3 + a2 * x * x + a4 * x + a6) + lin * lin) % prime
        root = sqrt_mod(disc, prime)
        if root is not None:
            return x, (root - lin) * pow(2, -1, prime) % prime


def _multiple_in_interval(curve: CurveSpec, point: ModPoint, prime: int,
                          low: int, high: int) -> int:
    """Baby-step giant-step: some ``m`` in ``[low, high]`` with mP = O."""
    step = int(gmpy2.isqrt(high - low)) + 1
    baby: Dict[ModPoint, int] = {}
    current: ModPoint = None
    for j in range(step + 1):
        baby.setdefault(current, j)
        current = add_mod(curve, current, point, prime)
    giant = scalar_mul_mod(curve, point, step, prime)
    current = scalar_mul_mod(curve, point, low, prime)
    for i in range(step + 2):
        j = baby.get(neg_mod(curve, current, prime))
        if j is not None:
            return low + i * step + j
        current = add_mod(curve, current, giant, prime)
    raise ArithmeticError(  # pragma: no cover
        f'no multiple of the point vanishes in [{low}, {high}]')


def _order_from_multiple(curve: CurveSpec, point: ModPoint, multiple: int,
                         prime: int) -> int:
    order = multiple
    for fac in prime_factors(multiple):
        while (order % fac == 0 and scalar_mul_mod(
                curve, point, order // fac, prime) is None):
            order //= fac
    return order


def group_order_mod_p(curve: CurveSpec,
                      prime: int,
                      exhaustive_bound: int = EXHAUSTIVE_COUNT_BOUND,
                      seed: int = 0) -> int:
    """
    ``E_p = |E(F_p)|``.

    Exhaustive count below ``exhaustive_bound``; above it, the unique
    multiple of the lcm of random point orders in the Hasse interval.

    Raises
    ------
    BadReductionError
        ``prime`` divides the discriminant
    """
    _check_good(curve, prime)
    if prime < exhaustive_bound:
        return _count_points(curve, prime)
    low, high = _hasse_interval(prime)
    rng = random.Random(seed)
    exponent = 1
    for _ in range(64):
        point = _random_point(curve, prime, rng)
        multiple = _multiple_in_interval(curve, point, prime, low, high)
        exponent = lcm(exponent,
                       _order_from_multiple(curve, point, multiple, prime))
        candidates = [
            m for m in range((low + exponent - 1) // exponent * exponent,
                             high + 1, exponent)
        ]
        if len(candidates) == 1:
            return candidates[0]
    raise ArithmeticError(  # pragma: no cover
        f'group order mod {prime} not isolated')


def point_order_mod_p(curve: CurveSpec,
                      point: RatPoint,
                      prime: int,
                      exhaustive_bound: int = EXHAUSTIVE_COUNT_BOUND) -> int:
    """
    Order ``n_p`` of the reduction of ``point`` modulo ``prime``.

    Raises
    ------
    BadReductionError
        ``prime`` divides the discriminant
    """
    reduced = reduce_point(curve, point, prime)
    if reduced is None:
        return 1
    if prime < exhaustive_bound:
        multiple = group_order_mod_p(curve, prime, exhaustive_bound)
    else:
        multiple = _multiple_in_interval(curve, reduced, prime,
                                         *_hasse_interval(prime))
    return _order_from_multiple(curve, reduced, multiple, prime)


def _square_divisor_roots(number: int) -> List[int]:
    """All ``y > 0`` with ``y**2 | number``."""
    roots = [1]
    for prime, exp in factor(number).factors:
        roots = [r * prime**k for r in roots for k in range(exp // 2 + 1)]
    return sorted(roots)


def _integer_roots(coeffs: Sequence[int]) -> List[int]:
    """Integer roots of a monic cubic ``x^3 + c2 x^2 + c1 x + c0``."""
    found = set()
    with mpmath.workdps(60):
        for root in mpmath.polyroots(list(coeffs), maxsteps=200,
                                     extraprec=200):
            if abs(mpmath.im(root)) > 1e-20:
                continue
            for cand in (int(mpmath.floor(mpmath.re(root))),
                         int(mpmath.ceil(mpmath.re(root)))):
                value = sum(c * cand**(3 - k) for k, c in enumerate(coeffs))
                if value == 0:
                    found.add(cand)
    return sorted(found)


def torsion_trivial(curve: CurveSpec) -> bool:
    """
    Lutz-Nagell scan for rational torsion.

    Works on the integral short model ``y^2 = x^3 - 27 c4 x - 54 c6``.
    Every torsion point there is integral with ``y = 0`` or
    ``y^2 | 4A^3 + 27B^2``; each candidate is tested against Mazur's bound.

    Returns
    -------
    bool
        no non-trivial rational torsion point exists
    """
    if curve.is_short_form:
        short = curve
    else:
        short = CurveSpec(a4=-27 * curve.c4, a6=-54 * curve.c6)
    big_a, big_b = short.a4, short.a6
    disc = abs(4 * big_a**3 + 27 * big_b**2)
    for y in [0] + _square_divisor_roots(disc):
        for x in _integer_roots([1, 0, big_a, big_b - y * y]):
            point = (mpq(x), mpq(y))
            current: RatPoint = point
            for order in range(1, MAZUR_BOUND + 1):
                if current is None:
                    logger.info('torsion point %s of order %d', point, order)
                    return False
                if current[0].denominator != 1:
                    break
                current = add(short, current, point)
    return True


def real_components(curve: CurveSpec) -> int:
    """Connected components of the real locus."""
    return 1 if curve.discriminant < 0 else 2


def assert_on_curve(curve: CurveSpec, point: RatPoint):
    """
    Raises
    ------
    NotOnCurveError
        ``point`` does not satisfy the equation
    """
    if not on_curve(curve, point):
        raise NotOnCurveError(point)
