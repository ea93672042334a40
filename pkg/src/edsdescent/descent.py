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
Descent through the 3-isogeny of the ``j = 0`` family.

.. code-block:: text

    sigma: E': y^2 = x^3 + a  -->  E: y^2 = x^3 - 27 a / u^6

    sigma(x, y) = ((x^3 + 4a) / (u^2 x^2), y (x^3 - 8a) / (u^3 x^3))

``b = (b_n)`` is the divisibility sequence of ``Q'`` on ``E'`` and
``B = (B_n)`` that of ``Q`` on ``E``.
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpq, mpz

from edsdescent.arith import (DEFAULT_BUDGET, DEFAULT_TRIAL_BOUND,
                              FactorStatus, prime_factors, primes_up_to,
                              valuation)
from edsdescent.curve import (CurveSpec, RatPoint, add, assert_on_curve, neg,
                              scalar_mul)
from edsdescent.eds import (EdsTable, PrimitiveKind, classify_primitive,
                            eds_terms, good_part, primitive_part,
                            primitive_primes, rank_of_apparition)
from edsdescent.errors import (NoDescentError, OutOfScopeError,
                               PreconditionError)
from edsdescent.utils import Certificate, format_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DescentPair():
    """``sigma: E' -> E`` with ``sigma(Q') = sign_match * Q``."""

    eprime: CurveSpec
    curve: CurveSpec
    a: int
    u: int
    q: int
    qprime: RatPoint
    point: RatPoint
    sign_match: int = 1

    @classmethod
    def from_config(cls,
                    a: int,
                    u: int,
                    qprime: RatPoint,
                    point: Optional[RatPoint] = None,
                    q: int = 3) -> 'DescentPair':
        """
        Build both curves and fix the sign of the descent.

        Parameters
        ----------
        a : int
            ``E': y^2 = x^3 + a``
        u : int
            scaling, ``u**6 | 27 a``
        qprime : RatPoint
            point on ``E'``
        point : Optional[RatPoint]
            ``Q`` on ``E``; defaults to ``sigma(Q')``
        q : int
            isogeny degree; only 3 is supported

        Raises
        ------
        OutOfScopeError
            ``q != 3``
        PreconditionError
            ``u**6`` does not divide ``27 a`` or bad primes differ
        NotOnCurveError
            a point is off its curve
        NoDescentError
            ``sigma(Q') != +-Q``
        """
        if q != 3:
            raise OutOfScopeError(f'isogeny degree {q} is not supported')
        if u == 0 or (27 * a) % u**6:
            raise PreconditionError(f'u^6 = {u**6} does not divide 27a')
        eprime = CurveSpec(a6=a)
        curve = CurveSpec(a6=-27 * a // u**6)
        if set(eprime.bad_primes) != set(curve.bad_primes):
            raise PreconditionError(
                f'bad primes differ: {eprime.bad_primes} vs '
                f'{curve.bad_primes}')
        assert_on_curve(eprime, qprime)
        draft = cls(eprime, curve, a, u, q, qprime, qprime)
        if point is None:
            point = sigma(draft, qprime)
        assert_on_curve(curve, point)
        pair = replace(draft, point=point)
        return replace(pair, sign_match=verify_descent(pair))


def sigma(pair: DescentPair, point: RatPoint) -> RatPoint:
    """
    Image of a point of ``E'`` on ``E``.

    Raises
    ------
    OutOfScopeError
        ``x = 0`` (kernel of the isogeny)
    """
    if point is None:
        return None
    x, y = mpq(point[0]), mpq(point[1])
    if x == 0:
        raise OutOfScopeError(f'{point} lies in the kernel')
    a, u = pair.a, pair.u
    return ((x**3 + 4 * a) / (u**2 * x**2),
            y * (x**3 - 8 * a) / (u**3 * x**3))


def verify_descent(pair: DescentPair) -> int:
    """
    Sign with ``sigma(Q') = sign * Q``.

    Raises
    ------
    NoDescentError
        the image is neither ``Q`` nor ``-Q``
    """
    assert_on_curve(pair.eprime, pair.qprime)
    image = sigma(pair, pair.qprime)
    if image == pair.point:
        return 1
    if image == neg(pair.curve, pair.point):
        return -1
    raise NoDescentError(f'sigma{format_point(pair.qprime)} = '
                         f'{format_point(image)}')


def companion_eds(pair: DescentPair, count: int) -> EdsTable:
    """``b_1 .. b_count`` from ``Q'`` on ``E'``."""
    return eds_terms(pair.eprime, pair.qprime, count)


def _chain_range(pair: DescentPair, big: EdsTable, small: EdsTable,
                 bound: Optional[int]) -> int:
    top = min(len(big), len(small) // pair.q)
    return top if bound is None else min(bound, top)


def check_divdiv(pair: DescentPair,
                 big: EdsTable,
                 small: EdsTable,
                 bound: Optional[int] = None,
                 primes: Sequence[int] = (),
                 trial_bound: int = DEFAULT_TRIAL_BOUND,
                 record: Optional[List[Certificate]] = None
                 ) -> List[Tuple[int, int]]:
    """
    ``ord_p(b_n) <= ord_p(B_n) <= ord_p(b_{qn})`` prime by prime.

    Checked for the good primes ``<= trial_bound`` dividing one of the
    three terms, and for every listed prime.

    Returns
    -------
    List[Tuple[int, int]]
        violating ``(n, p)``
    """
    violations = []
    small_primes = [
        p for p in primes_up_to(trial_bound) if pair.curve.is_good(p)
    ]
    for n in range(1, _chain_range(pair, big, small, bound) + 1):
        triple = (small.denom(n), big.denom(n), small.denom(pair.q * n))
        product = triple[0] * triple[1] * triple[2]
        candidates = {p for p in small_primes if product % p == 0}
        candidates.update(p for p in primes if pair.curve.is_good(p))
        for prime in sorted(candidates):
            vals = [valuation(t, prime) for t in triple]
            holds = vals[0] <= vals[1] <= vals[2]
            if record is not None:
                record.append(
                    Certificate('valuation-chain', {'n': n, 'p': prime},
                                dict(zip(('b_n', 'B_n', 'b_qn'), vals)),
                                holds))
            if not holds:
                violations.append((n, prime))
    if violations:
        logger.warning('valuation chain fails at %s', violations[:5])
    return violations


def check_divdiv_all(pair: DescentPair,
                     big: EdsTable,
                     small: EdsTable,
                     bound: Optional[int] = None) -> List[Certificate]:
    """
    Valuation chain for all good primes at once.

    ``good(b_n) | good(B_n) | good(b_{qn})`` is the chain at every good
    prime simultaneously.
    """
    certs = []
    for n in range(1, _chain_range(pair, big, small, bound) + 1):
        low, mid, high = (good_part(pair.curve, small.denom(n)),
                          good_part(pair.curve, big.denom(n)),
                          good_part(pair.curve, small.denom(pair.q * n)))
        holds = mid % low == 0 and high % mid == 0
        certs.append(
            Certificate('valuation-chain-all-good-primes', {'n': n}, {
                'digits_b_n': len(str(low)),
                'digits_B_n': len(str(mid)),
                'digits_b_qn': len(str(high))
            }, holds))
        if not holds:
            logger.warning('good-part chain fails at n = %d', n)
    return certs


def _q_valuations(q: int, prime: int) -> int:
    return valuation(q, prime) if q % prime == 0 else 0


def check_ordord(pair: DescentPair,
                 small: EdsTable,
                 prime: int,
                 n: int,
                 record: Optional[List[Certificate]] = None) -> bool:
    """
    ``ord_l(b_{qn}) == ord_l(b_n) + ord_l(q)`` for ``l > 2``, ``l | b_n``.

    Raises
    ------
    PreconditionError
        ``l <= 2``, ``l`` bad, or ``l`` does not divide ``b_n``
    """
    if prime <= 2:
        raise PreconditionError(f'{prime} <= 2')
    if not pair.eprime.is_good(prime):
        raise PreconditionError(f'{prime} is a bad prime')
    b_n = small.denom(n)
    if b_n % prime:
        raise PreconditionError(f'{prime} does not divide b_{n}')
    low = valuation(b_n, prime)
    high = valuation(small.denom(pair.q * n), prime)
    shift = _q_valuations(pair.q, prime)
    holds = high == low + shift
    if record is not None:
        record.append(
            Certificate('valuation-addition', {
                'l': prime,
                'n': n,
                'q': pair.q
            }, {
                'b_n': low,
                'b_qn': high,
                'q': shift
            }, holds))
    return holds


def _supported_part(value: int, support: int) -> int:
    """Part of ``value`` made of primes dividing ``support``."""
    value, part = mpz(value), mpz(1)
    common = gmpy2.gcd(value, support)
    while common > 1:
        value //= common
        part *= common
        common = gmpy2.gcd(value, common)
    return int(part)


def check_ordord_all(pair: DescentPair, small: EdsTable,
                     n: int) -> Certificate:
    """
    Valuation addition for every good ``l > 2`` dividing ``b_n`` at once.

    The part of ``good(b_{qn})`` supported on the primes of
    ``g = good(b_n)`` (odd part) must equal ``g`` times the ``q``-part
    of those primes.
    """
    support = good_part(pair.curve, small.denom(n))
    support = int(gmpy2.remove(mpz(support), 2)[0])
    high = good_part(pair.curve, small.denom(pair.q * n))
    expected = support
    for prime in prime_factors(pair.q):
        if support % prime == 0:
            expected *= prime**valuation(pair.q, prime)
    found = _supported_part(high, support)
    return Certificate('valuation-addition-all-primes', {
        'n': n,
        'q': pair.q
    }, {
        'digits_support': len(str(support)),
        'digits_found': len(str(found))
    }, found == expected)


@dataclass
class LiftRecord():
    """Primitive primes of ``b_n`` and whether they stay primitive in ``B``."""

    n: int
    primes: List[int] = field(default_factory=list)
    lifted: Dict[int, bool] = field(default_factory=dict)
    divides_primitive: bool = True
    """``good(b_n*) | B_n*``: every good primitive prime lifts"""

    status: FactorStatus = FactorStatus.COMPLETE

    @property
    def verdict(self) -> bool:
        return self.divides_primitive and all(self.lifted.values())


def primitive_lift_check(pair: DescentPair,
                         big: EdsTable,
                         small: EdsTable,
                         bound: Optional[int] = None,
                         budget: int = DEFAULT_BUDGET,
                         seed: int = 0) -> List[LiftRecord]:
    """
    Good primitive primes of ``b_n`` are primitive primes of ``B_n``.

    Only ``n`` coprime to ``q`` are inspected.
    """
    top = min(len(big), len(small))
    bound = top if bound is None else min(bound, top)
    records = []
    for n in range(1, bound + 1):
        if gcd(n, pair.q) != 1:
            continue
        found = primitive_primes(small, n, budget, seed)
        rec = LiftRecord(n=n, primes=list(found.primes), status=found.status)
        small_star = good_part(pair.eprime, primitive_part(small, n))
        rec.divides_primitive = primitive_part(big, n) % small_star == 0
        for prime in found.primes:
            rec.lifted[prime] = (big.denom(n) % prime == 0
                                 and rank_of_apparition(big, prime) == n)
        if not rec.verdict:
            logger.warning('primitive prime of b_%d does not lift', n)
        records.append(rec)
    return records


@dataclass
class PrimitiveDivisorReport():
    """Per-index classification of ``B_n*`` with and without bad primes."""

    rows: Dict[int, Tuple[str, str]] = field(default_factory=dict)
    """n -> (all primes, good primes only)"""

    summary: Dict[str, int] = field(default_factory=dict)
    """counts over the good-only classification"""


def two_primitive_divisors_report(pair: DescentPair,
                                  big: EdsTable,
                                  indices: Sequence[int],
                                  budget: int = DEFAULT_BUDGET
                                  ) -> PrimitiveDivisorReport:
    """
    Classify ``B_n*`` for ``n`` coprime to ``q``.

    Raises
    ------
    PreconditionError
        some index shares a factor with ``q``
    """
    shared = [n for n in indices if gcd(n, pair.q) != 1]
    if shared:
        raise PreconditionError(f'indices {shared} are not coprime to q')
    report = PrimitiveDivisorReport()
    counts: Counter = Counter({kind.value: 0 for kind in PrimitiveKind})
    for n in indices:
        raw = classify_primitive(big, n, budget)
        good = classify_primitive(big, n, budget, good_only=True)
        report.rows[n] = (str(raw), str(good))
        counts[good.kind.value] += 1
    report.summary = dict(counts)
    return report


def check_homomorphism(pair: DescentPair,
                       trials: int = 50,
                       seed: int = 0,
                       spread: int = 6) -> List[Tuple[int, int]]:
    """
    ``sigma(P1 + P2) == sigma(P1) + sigma(P2)`` on random multiples of Q'.

    Returns
    -------
    List[Tuple[int, int]]
        multipliers ``(m1, m2)`` where it fails
    """
    rng = random.Random(seed)
    cache: Dict[int, RatPoint] = {}

    def multiple(m: int) -> RatPoint:
        if m not in cache:
            cache[m] = scalar_mul(pair.eprime, pair.qprime, m)
        return cache[m]

    failures = []
    choices = [m for m in range(-spread, spread + 1) if m]
    for _ in range(trials):
        m1, m2 = rng.choice(choices), rng.choice(choices)
        lhs = sigma(pair, multiple(m1 + m2))
        rhs = add(pair.curve, sigma(pair, multiple(m1)),
                  sigma(pair, multiple(m2)))
        if lhs != rhs:
            failures.append((m1, m2))
    if failures:
        logger.warning('sigma is not additive at %s', failures[:5])
    return failures
