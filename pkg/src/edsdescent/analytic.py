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
Real-analytic layer.

A curve with one real component is parametrized by ``theta`` in
``[0, 1)``: ``theta = 0`` is the identity and ``theta -> nQ`` is
``theta -> frac(n theta)``.  Periods come from the AGM, elliptic
logarithms from Carlson's symmetric integral ``R_F``.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import mpmath
from mpmath import mpf

from edsdescent.arith import primes_up_to
from edsdescent.curve import (CurveSpec, RatPoint, add, multiples,
                              real_components)
from edsdescent.eds import EdsTable, primitive_part
from edsdescent.errors import OutOfScopeError

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 50
"""Working precision (decimal digits)."""

GUARD_DIGITS = 10
"""Extra digits carried inside each routine."""

REFINE_DIGITS = 20
"""Extra digits of the second evaluation that bounds the error."""

PRIMITIVE_GROWTH_BOUND = mpf('0.547')
"""Asymptotic lower bound of ``log B_n* / (h n^2)``."""

ZETA2_BOUND = mpf('0.453')
"""Upper bound of the sum of ``1 / p^2`` over all primes."""


def _frac(value: mpf) -> mpf:
    return value - mpmath.floor(value)


def _to_mpf(value) -> mpf:
    if hasattr(value, 'denominator'):
        return mpf(int(value.numerator)) / int(value.denominator)
    return mpf(value)


def _circle_distance(first: mpf, second: mpf) -> mpf:
    gap = _frac(first - second)
    return min(gap, 1 - gap)


class RealEmbedding():
    """
    ``E(R) = R / Z`` for a curve with one real component.

    Parameters
    ----------
    curve : CurveSpec
        curve with negative discriminant
    point : RatPoint
        point whose multiples are tracked
    precision : int
        decimal digits

    Raises
    ------
    OutOfScopeError
        two real components
    """

    def __init__(self,
                 curve: CurveSpec,
                 point: RatPoint,
                 precision: int = DEFAULT_PRECISION):
        if real_components(curve) != 1:
            raise OutOfScopeError(f'{curve} has two real components')
        self.curve = curve
        self.point = point
        self.precision = precision
        self.self_test_error: Optional[mpf] = None
        self._refined: Optional['RealEmbedding'] = None
        with mpmath.workdps(precision + GUARD_DIGITS):
            roots = mpmath.polyroots(self.cubic,
                                     maxsteps=400,
                                     extraprec=4 * precision)
            e1 = mpmath.re(min(roots, key=lambda r: abs(mpmath.im(r))))
            alpha = 3 * e1 + mpf(curve.b2) / 4
            beta = mpmath.sqrt(3 * e1**2 + curve.b2 * e1 / 2 +
                               mpf(curve.b4) / 2)
            spread = mpmath.sqrt(4 * beta**2 - alpha**2)
            self.real_root = e1
            self.roots = (e1, e1 + mpmath.mpc(-alpha, spread) / 2,
                          e1 + mpmath.mpc(-alpha, -spread) / 2)
            self.period = 2 * mpmath.pi / mpmath.agm(
                2 * mpmath.sqrt(beta), mpmath.sqrt(alpha + 2 * beta))
            self.unbounded_tol = mpf(10)**(-(precision // 3))
        self.theta = elliptic_log(self, point)

    def __repr__(self) -> str:
        return (f'RealEmbedding({self.curve}, theta='
                f'{mpmath.nstr(self.theta, 12)}, dps={self.precision})')

    @property
    def cubic(self) -> List[int]:
        """``4x^3 + b2 x^2 + 2 b4 x + b6 = (2y + a1 x + a3)^2``"""
        return [4, self.curve.b2, 2 * self.curve.b4, self.curve.b6]

    def refined(self) -> 'RealEmbedding':
        """Same embedding at higher precision (cached)."""
        if self._refined is None:
            self._refined = RealEmbedding(self.curve, self.point,
                                          self.precision + REFINE_DIGITS)
        return self._refined

    def period_carlson(self) -> mpf:
        """Period as ``2 R_F(0, e1 - e2, e1 - e3)``."""
        e1, e2, e3 = self.roots
        with mpmath.workdps(self.precision + GUARD_DIGITS):
            return 2 * mpmath.re(mpmath.elliprf(0, e1 - e2, e1 - e3))

    def point_at(self, theta) -> Optional[Tuple[mpf, mpf]]:
        """Inverse parametrization; ``None`` at the identity."""
        return point_at(self, theta)


def real_embedding(curve: CurveSpec,
                   point: RatPoint,
                   precision: int = DEFAULT_PRECISION,
                   self_test_count: int = 10) -> RealEmbedding:
    """
    Period and ``theta(Q)``, self-tested on the first multiples of ``Q``.
    """
    emb = RealEmbedding(curve, point, precision)
    if self_test_count:
        emb.self_test_error = self_test(emb, self_test_count)
        if emb.self_test_error > mpf('1e-6'):
            logger.warning('theta self-test error %s',
                           mpmath.nstr(emb.self_test_error, 5))
    return emb


def _tail_integral(emb: RealEmbedding, x: mpf) -> mpf:
    """``int_x^oo dx / sqrt(f)``"""
    e1, e2, e3 = emb.roots
    return mpmath.re(mpmath.elliprf(max(x - e1, 0), x - e2, x - e3))


def elliptic_log(emb: RealEmbedding, point) -> mpf:
    """
    Normalized elliptic logarithm ``theta`` in ``[0, 1)``.

    Accepts exact or real coordinates of a point on the real locus.
    """
    if point is None:
        return mpf(0)
    a1, a3 = emb.curve.a1, emb.curve.a3
    sign_y = 2 * point[1] + a1 * point[0] + a3
    with mpmath.workdps(emb.precision + GUARD_DIGITS):
        if sign_y == 0:
            return mpf(1) / 2
        x = _to_mpf(point[0])
        ratio = _tail_integral(emb, x) / emb.period
        return +ratio if sign_y < 0 else 1 - ratio


def point_at(emb: RealEmbedding, theta) -> Optional[Tuple[mpf, mpf]]:
    """
    Real point at position ``theta``.

    ``x`` solves ``tail_integral(x) = period * min(theta, 1 - theta)``;
    the sign of ``2y + a1 x + a3`` is negative below one half.
    """
    a1, a3 = emb.curve.a1, emb.curve.a3
    with mpmath.workdps(emb.precision + GUARD_DIGITS):
        theta = _frac(mpf(theta))
        if theta == 0:
            return None
        target = emb.period * min(theta, 1 - theta)
        e1 = emb.real_root
        if target >= emb.period / 2:
            x = e1
        else:
            width = mpf(1)
            while _tail_integral(emb, e1 + width) > target:
                width *= 4
            x = mpmath.findroot(lambda s: _tail_integral(emb, s) - target,
                                (e1, e1 + width),
                                solver='illinois',
                                maxsteps=400)
        big_y = mpmath.sqrt(max(mpmath.polyval(emb.cubic, x), 0))
        if theta < mpf(1) / 2:
            big_y = -big_y
        return +x, (big_y - a1 * x - a3) / 2


def self_test(emb: RealEmbedding, count: int = 50) -> mpf:
    """Largest circle distance between ``frac(n theta)`` and ``theta(nQ)``."""
    worst = mpf(0)
    with mpmath.workdps(emb.precision + GUARD_DIGITS):
        for n, exact in enumerate(multiples(emb.curve, emb.point, count),
                                  start=1):
            worst = max(
                worst,
                _circle_distance(n * emb.theta, elliptic_log(emb, exact)))
    return worst


@dataclass(frozen=True)
class ApproxReal():
    """Real value with an error bound; ``unbounded`` near the identity."""

    value: Optional[mpf] = None
    error: Optional[mpf] = None
    unbounded: bool = False

    def contains(self, exact) -> bool:
        if self.unbounded:
            return False
        return abs(self.value - exact) <= self.error


def _y_at(emb: RealEmbedding, n: int) -> Optional[mpf]:
    with mpmath.workdps(emb.precision + GUARD_DIGITS):
        phi = _frac(n * emb.theta)
        if min(phi, 1 - phi) < emb.unbounded_tol:
            return None
        return emb.point_at(phi)[1]


def approx_y_of_multiple(emb: RealEmbedding, n: int) -> ApproxReal:
    """
    ``y(nQ)`` from ``frac(n theta)``.

    The error bound is the disagreement with a second evaluation at
    higher precision plus one unit of the working precision.
    """
    if n < 1:
        raise ValueError(f'multiple {n} < 1')
    coarse = _y_at(emb, n)
    fine = _y_at(emb.refined(), n)
    if coarse is None or fine is None:
        return ApproxReal(unbounded=True)
    with mpmath.workdps(emb.precision + GUARD_DIGITS):
        unit = mpf(10)**(-emb.precision) * max(1, abs(fine))
        return ApproxReal(value=fine, error=abs(coarse - fine) + unit)


def y_monotone(curve: CurveSpec) -> bool:
    """``y`` increases with ``theta`` (short model with ``a4 >= 0``)."""
    return curve.is_short_form and curve.a4 >= 0


def theta_of_y(emb: RealEmbedding, y) -> mpf:
    """
    Position of the real point with ordinate ``y``.

    Raises
    ------
    OutOfScopeError
        ``y`` does not determine the point
    """
    if not y_monotone(emb.curve):
        raise OutOfScopeError('y is not monotone along the real locus')
    with mpmath.workdps(emb.precision + GUARD_DIGITS):
        y = mpf(y)
        roots = mpmath.polyroots([1, 0, emb.curve.a4, emb.curve.a6 - y * y],
                                 maxsteps=400,
                                 extraprec=4 * emb.precision)
        x = mpmath.re(min(roots, key=lambda r: abs(mpmath.im(r))))
        return elliptic_log(emb, (x, y))


class HeightMethod(Enum):
    REGRESSION = 'LogBRegression'
    DOUBLING = 'NaiveDoubling'


@dataclass(frozen=True)
class HeightEstimate():
    """Canonical height normalized so that ``log B_n ~ h n^2``."""

    value: mpf
    method: HeightMethod
    sample_range: Tuple[int, int]
    residual: mpf = mpf(0)
    """relative residual of the fit"""


def estimate_height(terms: EdsTable,
                    start: Optional[int] = None,
                    stop: Optional[int] = None,
                    precision: int = 30) -> HeightEstimate:
    """
    Least-squares fit ``log B_n = h n^2 + c`` over ``start..stop``.

    Parameters
    ----------
    terms : EdsTable
        generated terms
    start : Optional[int]
        first index (default: a third of the range)
    stop : Optional[int]
        last index (default: every generated term)
    precision : int
        decimal digits of the fit

    Returns
    -------
    HeightEstimate
        slope and relative residual
    """
    stop = len(terms) if stop is None else min(stop, len(terms))
    start = max(2, stop // 3) if start is None else start
    if stop - start < 2:
        raise ValueError(f'window {start}..{stop} is too short')
    indices = range(start, stop + 1)
    with mpmath.workdps(precision):
        design = mpmath.matrix([[n * n, 1] for n in indices])
        logs = mpmath.matrix(
            [mpmath.log(int(terms.denom(n))) for n in indices])
        coeffs, residual = mpmath.qr_solve(design, logs)
        relative = residual / mpmath.norm(logs)
    logger.debug('height fit on %d..%d: %s (residual %s)', start, stop,
                 mpmath.nstr(coeffs[0], 10), mpmath.nstr(relative, 3))
    return HeightEstimate(value=coeffs[0],
                          method=HeightMethod.REGRESSION,
                          sample_range=(start, stop),
                          residual=relative)


def naive_height_estimate(curve: CurveSpec,
                          point: RatPoint,
                          doublings: int = 6,
                          precision: int = 30) -> HeightEstimate:
    """``log max(|A_m|, B_m^2) / (2 m^2)`` at ``m = 2**doublings``."""
    current = point
    for _ in range(doublings):
        current = add(curve, current, current)
    x = current[0]
    with mpmath.workdps(precision):
        naive = mpmath.log(max(abs(int(x.numerator)), int(x.denominator)))
        m = 2**doublings
        value = naive / (2 * m * m)
    return HeightEstimate(value=value,
                          method=HeightMethod.DOUBLING,
                          sample_range=(m, m))


@dataclass(frozen=True)
class HeightRatio():
    ratio: mpf
    expected: int
    tolerance: mpf
    heights: Tuple[mpf, mpf]

    @property
    def verdict(self) -> bool:
        return abs(self.ratio - self.expected) <= self.tolerance


def check_height_isogeny_ratio(height: HeightEstimate,
                               height_prime: HeightEstimate,
                               degree: int = 3,
                               tolerance=mpf('0.1')) -> HeightRatio:
    """``h(Q) / h(Q')`` against the isogeny degree."""
    if height.sample_range != height_prime.sample_range:
        logger.info('height ratio over different windows %s and %s',
                    height.sample_range, height_prime.sample_range)
    return HeightRatio(ratio=height.value / height_prime.value,
                       expected=degree,
                       tolerance=mpf(tolerance),
                       heights=(height.value, height_prime.value))


@dataclass
class PrimitiveGrowth():
    """``(n, log B_n, log B_n*, log B_n* / (h n^2))`` rows."""

    rows: List[Tuple[int, mpf, mpf, mpf]] = field(default_factory=list)
    window: Tuple[int, int] = (0, 0)
    minimum: Optional[mpf] = None
    """least ratio inside ``window``"""

    bound: mpf = PRIMITIVE_GROWTH_BOUND

    @property
    def verdict(self) -> bool:
        return self.minimum is not None and self.minimum >= self.bound


def check_primitive_growth(terms: EdsTable,
                           height: HeightEstimate,
                           start: int = 2,
                           stop: Optional[int] = None,
                           window_start: int = 40) -> PrimitiveGrowth:
    """
    Ratio table of primitive growth.

    Indices with ``B_n = 1`` are degenerate and skipped; the verdict is
    taken over ``window_start..stop`` only.
    """
    stop = len(terms) if stop is None else min(stop, len(terms))
    growth = PrimitiveGrowth(window=(window_start, stop))
    with mpmath.workdps(30):
        for n in range(start, stop + 1):
            if terms.denom(n) == 1:
                continue
            log_b = mpmath.log(int(terms.denom(n)))
            log_star = mpmath.log(int(primitive_part(terms, n)))
            ratio = log_star / (height.value * n * n)
            growth.rows.append((n, log_b, log_star, ratio))
            if n >= window_start:
                growth.minimum = (ratio if growth.minimum is None else min(
                    growth.minimum, ratio))
    return growth


def prime_zeta2_partial(bound: int) -> mpf:
    """Sum of ``1 / p^2`` over primes ``p <= bound``."""
    if bound < 2:
        raise ValueError(f'bound {bound} < 2')
    return mpmath.fsum(mpf(1) / (p * p) for p in primes_up_to(bound))
