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
Elliptic divisibility sequences.

For a non-torsion point ``Q`` write ``nQ = (A_n / B_n**2, C_n / B_n**3)``
in lowest terms; ``(B_n)`` is the divisibility sequence of ``Q``.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import gmpy2
from gmpy2 import mpq, mpz

from edsdescent.arith import (DEFAULT_BUDGET, DEFAULT_TRIAL_BOUND,
                              FactorReport, FactorStatus, factor,
                              perfect_prime_power, primality_cost,
                              prime_factors, primes_up_to, remove_primes,
                              strip_below, valuation)
from edsdescent.curve import (CurveSpec, RatPoint, add, assert_on_curve,
                              x_denominator_root)
from edsdescent.errors import BadReductionError, TorsionPointError

logger = logging.getLogger(__name__)

DEFAULT_TERMS = 120
"""Default index bound for full-term generation."""

AT_LEAST_TWO = 2
"""Saturated count returned by :func:`primitive_primes_above`."""


class PrimitiveKind(Enum):
    """How many distinct primes divide a primitive part."""

    ZERO = 'Zero'
    ONE = 'ExactlyOnePrime'
    MANY = 'AtLeastTwoPrimes'
    UNKNOWN = 'Unknown'


@dataclass(frozen=True)
class PrimitiveClass():
    """Classification of ``B_n*``; ``prime ** exponent`` when ``ONE``."""

    kind: PrimitiveKind
    prime: Optional[int] = None
    exponent: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is PrimitiveKind.ONE:
            return f'{self.kind.value}({self.prime},{self.exponent})'
        return self.kind.value


@dataclass
class EdsTerm():
    """``nQ = (A_n / B_n**2, C_n / B_n**3)``."""

    n: int
    """index"""

    a: int
    """A_n"""

    b: int
    """B_n > 0"""

    c: int
    """C_n"""

    primitive_part: Optional[int] = None
    """B_n*, filled on demand"""

    factor_report: Optional[FactorReport] = None
    """budgeted factorization of the good part of B_n*"""

    def point(self) -> RatPoint:
        return mpq(self.a, self.b**2), mpq(self.c, self.b**3)

    @property
    def digits(self) -> int:
        return len(str(self.b))


class EdsTable():
    """
    Terms ``1..N`` of the divisibility sequence of ``point`` on ``curve``.

    Indexing is by ``n`` (1-based) through :meth:`term`.
    """

    def __init__(self, curve: CurveSpec, point: RatPoint):
        assert_on_curve(curve, point)
        self.curve = curve
        self.point = point
        self._terms: List[EdsTerm] = []
        self._last: RatPoint = None

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[EdsTerm]:
        return iter(self._terms)

    def __repr__(self) -> str:
        return f'EdsTable({self.curve}, N={len(self)})'

    def term(self, n: int) -> EdsTerm:
        if not 1 <= n <= len(self._terms):
            raise IndexError(f'term {n} outside 1..{len(self._terms)}')
        return self._terms[n - 1]

    def denom(self, n: int) -> int:
        """``B_n``"""
        return self.term(n).b

    def extend(self, count: int) -> 'EdsTable':
        """
        Generate terms until ``count`` are available.

        Raises
        ------
        TorsionPointError
            some multiple of the point is the identity
        """
        while len(self._terms) < count:
            index = len(self._terms) + 1
            self._last = add(self.curve, self._last, self.point)
            if self._last is None:
                raise TorsionPointError(index)
            x, y = self._last
            root = x_denominator_root(self._last)
            if y.denominator != root**3:
                raise ArithmeticError(f'denominators of {index}Q disagree')
            self._terms.append(
                EdsTerm(n=index, a=x.numerator, b=root, c=y.numerator))
            if index % 20 == 0:
                logger.debug('term %d: B_n has %d digits', index,
                             self._terms[-1].digits)
        return self


def eds_terms(curve: CurveSpec, point: RatPoint,
              count: int = DEFAULT_TERMS) -> EdsTable:
    """
    Terms ``B_1 .. B_count`` by repeated addition.

    Raises
    ------
    NotOnCurveError
        ``point`` is not on ``curve``
    TorsionPointError
        ``point`` is torsion
    """
    return EdsTable(curve, point).extend(count)


def _upto(terms: EdsTable, bound: Optional[int]) -> int:
    return len(terms) if bound is None else min(bound, len(terms))


def check_divisibility(terms: EdsTable,
                       bound: Optional[int] = None) -> List[Tuple[int, int]]:
    """
    Pairs ``(n, m)``, ``n | m <= bound``, with ``B_n`` not dividing ``B_m``.
    """
    bound = _upto(terms, bound)
    violations = []
    for n in range(1, bound + 1):
        b_n = terms.denom(n)
        for m in range(2 * n, bound + 1, n):
            if terms.denom(m) % b_n:
                violations.append((n, m))
    if violations:
        logger.warning('divisibility fails at %s', violations[:5])
    return violations


def strip_common(value: int, against: int) -> int:
    """Largest divisor of ``value`` coprime to ``against``."""
    value = mpz(value)
    common = gmpy2.gcd(value, against)
    while common > 1:
        value //= common
        common = gmpy2.gcd(value, common)
    return int(value)


def primitive_part(terms: EdsTable, n: int) -> int:
    """
    ``B_n*``: the largest divisor of ``B_n`` coprime to every earlier term.

    A prime dividing ``B_n`` and some earlier ``B_m`` already divides
    ``B_{n/p}`` for a prime ``p | n``, so stripping against those suffices.
    """
    term = terms.term(n)
    if term.primitive_part is None:
        earlier = mpz(1)
        for prime in (prime_factors(n) if n > 1 else []):
            earlier *= terms.denom(n // prime)
        term.primitive_part = strip_common(term.b, earlier)
    return term.primitive_part


def good_part(curve: CurveSpec, value: int) -> int:
    """``value`` with every bad prime removed."""
    return remove_primes(value, curve.bad_primes)[0]


def _first_divisible(terms: EdsTable, prime: int) -> Optional[int]:
    for term in terms:
        if term.b % prime == 0:
            return term.n
    return None


def rank_of_apparition(terms: EdsTable, prime: int) -> Optional[int]:
    """
    Least ``n`` with ``prime | B_n`` within the generated range.

    Raises
    ------
    BadReductionError
        ``prime`` is a bad prime of the curve
    """
    if not terms.curve.is_good(prime):
        raise BadReductionError(prime)
    return _first_divisible(terms, prime)


def check_rank_law(terms: EdsTable, prime: int) -> List[int]:
    """
    Indices ``m`` violating ``prime | B_m  <=>  n_prime | m``.

    Bad primes are checked against their own first index ``b_p``.
    """
    rank = _first_divisible(terms, prime)
    if rank is None:
        return []
    violations = [
        term.n for term in terms
        if (term.b % prime == 0) != (term.n % rank == 0)
    ]
    if violations:
        logger.warning('rank law for %d fails at %s', prime, violations[:5])
    return violations


def classify_value(value: int, budget: int = DEFAULT_BUDGET) -> PrimitiveClass:
    """Count distinct prime divisors as zero, one or at least two."""
    if value == 1:
        return PrimitiveClass(PrimitiveKind.ZERO)
    if primality_cost(value) > budget:
        return PrimitiveClass(PrimitiveKind.UNKNOWN)
    power = perfect_prime_power(value)
    if power is not None:
        return PrimitiveClass(PrimitiveKind.ONE, *power)
    return PrimitiveClass(PrimitiveKind.MANY)


def classify_primitive(terms: EdsTable,
                       n: int,
                       budget: int = DEFAULT_BUDGET,
                       good_only: bool = False) -> PrimitiveClass:
    """
    Classify ``B_n*`` without factoring it.

    Parameters
    ----------
    terms : EdsTable
        generated terms
    n : int
        index
    budget : int
        work units allowed for the primality test
    good_only : bool
        discard bad primes first

    Returns
    -------
    PrimitiveClass
        ``Zero``, ``ExactlyOnePrime(l, k)``, ``AtLeastTwoPrimes`` or
        ``Unknown``
    """
    value = primitive_part(terms, n)
    if good_only:
        value = good_part(terms.curve, value)
    return classify_value(value, budget)


def _factor_primitive(terms: EdsTable, n: int, budget: int, seed: int,
                      trial_bound: int) -> FactorReport:
    term = terms.term(n)
    report = term.factor_report
    if report is None or (not report.complete and report.spent < budget):
        report = factor(good_part(terms.curve, primitive_part(terms, n)),
                        budget=budget,
                        seed=seed,
                        trial_bound=trial_bound)
        term.factor_report = report
        if not report.complete:
            logger.info('B_%d* not factored within %d units', n, budget)
    return report


@dataclass(frozen=True)
class PrimitivePrimes():
    """Good primitive primes of ``B_n`` found by budgeted factoring."""

    n: int
    primes: Tuple[int, ...] = ()
    """known good primitive primes, increasing"""

    status: FactorStatus = FactorStatus.COMPLETE

    raw_largest: Optional[int] = None
    """largest primitive prime including bad primes"""

    @property
    def largest(self) -> Optional[int]:
        """``p_n``"""
        if self.status is not FactorStatus.COMPLETE or not self.primes:
            return None
        return self.primes[-1]

    @property
    def second_largest(self) -> Optional[int]:
        """``p_n'``"""
        if self.status is not FactorStatus.COMPLETE or len(self.primes) < 2:
            return None
        return self.primes[-2]


def primitive_primes(terms: EdsTable,
                     n: int,
                     budget: int = DEFAULT_BUDGET,
                     seed: int = 0,
                     trial_bound: int = DEFAULT_TRIAL_BOUND
                     ) -> PrimitivePrimes:
    """Factor the good part of ``B_n*`` within ``budget``."""
    report = _factor_primitive(terms, n, budget, seed, trial_bound)
    raw = primitive_part(terms, n)
    bad = [p for p in terms.curve.bad_primes if raw % p == 0]
    raw_largest = None
    if report.complete:
        raw_largest = max(report.primes + bad, default=None)
    return PrimitivePrimes(n=n,
                           primes=tuple(report.primes),
                           status=report.status,
                           raw_largest=raw_largest)


def largest_primitive_prime(
        terms: EdsTable,
        n: int,
        budget: int = DEFAULT_BUDGET,
        seed: int = 0) -> Tuple[Optional[int], FactorStatus]:
    """``p_n`` and the status of the factorization it came from."""
    found = primitive_primes(terms, n, budget, seed)
    return found.largest, found.status


def second_largest_primitive_prime(
        terms: EdsTable,
        n: int,
        budget: int = DEFAULT_BUDGET,
        seed: int = 0) -> Tuple[Optional[int], FactorStatus]:
    """``p_n'`` and the status of the factorization it came from."""
    found = primitive_primes(terms, n, budget, seed)
    return found.second_largest, found.status


def primitive_primes_above(terms: EdsTable, n: int, prime: int) -> int:
    """
    Number of good primitive primes of ``B_n`` above ``prime``.

    Strips every prime ``<= prime`` and classifies the rest, so no
    factorization is needed.

    Returns
    -------
    int
        0, 1 or :data:`AT_LEAST_TWO`
    """
    rest, _ = strip_below(good_part(terms.curve, primitive_part(terms, n)),
                          prime)
    if rest == 1:
        return 0
    if perfect_prime_power(rest) is not None:
        return 1
    return AT_LEAST_TWO


def is_largest_primitive(terms: EdsTable, n: int, prime: int) -> bool:
    """``prime == p_n``"""
    return (terms.curve.is_good(prime)
            and primitive_part(terms, n) % prime == 0
            and primitive_primes_above(terms, n, prime) == 0)


def is_second_largest_primitive(terms: EdsTable, n: int, prime: int) -> bool:
    """``prime == p_n'``"""
    return (terms.curve.is_good(prime)
            and primitive_part(terms, n) % prime == 0
            and primitive_primes_above(terms, n, prime) == 1)


@dataclass
class CurveConstants():
    """Scanned constants ``L``, ``a_l``, ``b_p`` and ``b``."""

    small_primes: List[int] = field(default_factory=list)
    """``L``: primes ``l`` with ``B_l == 1``"""

    exponents: Dict[int, Optional[int]] = field(default_factory=dict)
    """``a_l``: least ``k`` with ``B_{l**k} > 1`` (``None``: beyond scan)"""

    bad_ranks: Dict[int, Optional[int]] = field(default_factory=dict)
    """``b_p``: least ``n`` with ``p | B_n`` for bad ``p``"""

    scan_bound: int = 0
    """index bound of the scan"""

    prime_bound: int = 0
    """prime bound of the scan"""

    @property
    def b(self) -> Optional[int]:
        """Largest ``b_p``; ``None`` when some ``b_p`` is beyond the scan."""
        ranks = list(self.bad_ranks.values())
        if not ranks or None in ranks:
            return None
        return max(ranks)


def curve_constants(terms: EdsTable,
                    prime_bound: Optional[int] = None,
                    index_bound: Optional[int] = None) -> CurveConstants:
    """
    Scan ``L``, ``a_l``, ``b_p`` and ``b``.

    ``L`` is finite but its completeness cannot be certified: only primes
    ``l <= min(prime_bound, index_bound)`` are scanned.
    """
    index_bound = _upto(terms, index_bound)
    prime_bound = index_bound if prime_bound is None else prime_bound
    consts = CurveConstants(scan_bound=index_bound, prime_bound=prime_bound)
    for prime in primes_up_to(min(prime_bound, index_bound)):
        if terms.denom(prime) != 1:
            continue
        consts.small_primes.append(prime)
        exponent, power = 1, prime
        consts.exponents[prime] = None
        while power <= index_bound:
            if terms.denom(power) > 1:
                consts.exponents[prime] = exponent
                break
            exponent += 1
            power *= prime
    for prime in terms.curve.bad_primes:
        consts.bad_ranks[prime] = _first_divisible(terms, prime)
    logger.info('L = %s, b_p = %s', consts.small_primes, consts.bad_ranks)
    return consts


@dataclass
class BadPrimeGrowth():
    """``ord_p(B_n)`` for every bad ``p``."""

    valuations: Dict[int, List[int]] = field(default_factory=dict)
    """per bad prime, ``ord_p(B_n)`` for ``n = 1..N``"""

    max_rate: Dict[int, float] = field(default_factory=dict)
    """per bad prime, ``max_n ord_p(B_n) / log(n + 1)``"""

    doubling_violations: List[Tuple[int, int]] = field(default_factory=list)
    """``(p, n)`` with ``ord_p(B_n) > ord_p(B_2n)``"""


def bad_prime_growth_report(terms: EdsTable,
                            bound: Optional[int] = None) -> BadPrimeGrowth:
    """Growth of bad-prime valuations along the sequence."""
    bound = _upto(terms, bound)
    report = BadPrimeGrowth()
    for prime in terms.curve.bad_primes:
        vals = [valuation(terms.denom(n), prime) for n in range(1, bound + 1)]
        report.valuations[prime] = vals
        report.max_rate[prime] = max(
            v / math.log(n + 1) for n, v in enumerate(vals, start=1))
        report.doubling_violations.extend(
            (prime, n) for n in range(1, bound // 2 + 1)
            if vals[n - 1] > vals[2 * n - 1])
    return report


TABLE_HEADER = ('n', 'digits_B', 'B', 'digits_primitive', 'primitive_class',
                'p_n', 'p_n_prime')


def term_rows(terms: EdsTable,
              budget: int = DEFAULT_BUDGET,
              include_values: bool = False,
              seed: int = 0) -> List[Sequence]:
    """
    Rows of the term table (see :data:`TABLE_HEADER`).

    ``B`` is blank unless ``include_values``; ``p_n`` columns read
    ``Unknown`` when the primitive part resists factoring.
    """
    rows = []
    for term in terms:
        n = term.n
        found = primitive_primes(terms, n, budget, seed)
        if found.status is FactorStatus.COMPLETE:
            p_n = found.largest or ''
            p_n_prime = found.second_largest or ''
        else:
            p_n = p_n_prime = 'Unknown'
        rows.append((n, term.digits, term.b if include_values else '',
                     len(str(primitive_part(terms, n))),
                     str(classify_primitive(terms, n, budget)), p_n,
                     p_n_prime))
    return rows
