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
Integer arithmetic backbone.

Primality, budgeted factorization and prime-power detection over
arbitrary precision integers.

Budget
------
One work unit is one trial division or one rho iteration.
Running out of budget is a *status* (:attr:`FactorStatus.PARTIAL`),
never an error.
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import gmpy2
from gmpy2 import mpz
from sympy import sieve

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7
"""Default work units for a single factorization."""

DEFAULT_TRIAL_BOUND = 10**4
"""Trial division covers every prime up to this bound."""

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class FactorStatus(Enum):
    """Outcome of a budgeted factorization."""

    COMPLETE = 'Complete'
    PARTIAL = 'PartialBudgetExceeded'


@dataclass(frozen=True)
class FactorReport():
    """
    Budgeted factorization of ``input``.

    ``prod(p**e for p, e in factors) * cofactor == input``
    """

    input: int
    """factored integer"""

    factors: Tuple[Tuple[int, int], ...] = ()
    """(prime, exponent) pairs in increasing prime order"""

    cofactor: int = 1
    """unresolved composite part"""

    trial_bound: int = 0
    """every prime factor of ``cofactor`` exceeds this"""

    spent: int = 0
    """work units used"""

    @property
    def status(self) -> FactorStatus:
        """Complete iff nothing is left unresolved."""
        if self.cofactor == 1:
            return FactorStatus.COMPLETE
        return FactorStatus.PARTIAL

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    @property
    def primes(self) -> List[int]:
        """Known prime factors."""
        return [prime for prime, _ in self.factors]

    def reassemble(self) -> int:
        value = mpz(self.cofactor)
        for prime, exp in self.factors:
            value *= mpz(prime)**exp
        return int(value)


@lru_cache(maxsize=32)
def primes_up_to(bound: int) -> Tuple[int, ...]:
    """
    All primes ``<= bound``.

    Cached tuples: callers share them and must not expect a list.
    """
    if bound < 2:
        return ()
    return tuple(int(p) for p in sieve.primerange(2, bound + 1))


@lru_cache(maxsize=32)
def _primorial(bound: int) -> mpz:
    return gmpy2.primorial(bound) if bound >= 2 else mpz(1)


def is_prime(n: int) -> bool:
    """
    Primality test.

    Deterministic below 2**64; above, the Baillie-PSW combination
    (strong base-2 pseudoprime and strong Lucas test), which has no
    known counterexample but is probabilistic in principle.

    Parameters
    ----------
    n : int
        candidate, ``n >= 0``

    Returns
    -------
    bool
        ``n`` is (probably) prime
    """
    n = mpz(n)
    if n < 2:
        return False
    for prime in _SMALL_PRIMES:
        if n == prime:
            return True
        if n % prime == 0:
            return False
    return bool(gmpy2.is_bpsw_prp(n))


def primality_cost(n: int) -> int:
    """Work units charged for one primality test of ``n``."""
    return max(1, mpz(n).bit_length())


def valuation(n: int, prime: int) -> int:
    """Exponent of ``prime`` in ``n`` (``n != 0``)."""
    if n == 0:
        raise ValueError('valuation of 0 is infinite')
    return int(gmpy2.remove(mpz(n), mpz(prime))[1])


def remove_primes(n: int, primes) -> Tuple[int, Dict[int, int]]:
    """
    Strip the listed primes out of ``n``.

    Returns
    -------
    Tuple[int, Dict[int, int]]
        remaining part and the valuation of every listed prime
    """
    rest = mpz(n)
    valuations: Dict[int, int] = {}
    for prime in primes:
        rest, count = gmpy2.remove(rest, mpz(prime))
        valuations[int(prime)] = int(count)
    return int(rest), valuations


def strip_below(n: int, bound: int) -> Tuple[int, int]:
    """
    Remove every prime ``<= bound`` from ``n`` without factoring.

    Returns
    -------
    Tuple[int, int]
        (part with all prime factors > bound, stripped part)
    """
    rest = mpz(n)
    stripped = mpz(1)
    common = gmpy2.gcd(rest, _primorial(bound))
    while common > 1:
        rest //= common
        stripped *= common
        common = gmpy2.gcd(rest, common)
    return int(rest), int(stripped)


def perfect_prime_power(n: int) -> Optional[Tuple[int, int]]:
    """
    Detect ``n == l**k`` with ``l`` prime.

    Parameters
    ----------
    n : int
        ``n >= 2``

    Returns
    -------
    Optional[Tuple[int, int]]
        ``(l, k)`` or ``None``
    """
    n = mpz(n)
    if n < 2:
        return None
    if is_prime(n):
        return int(n), 1
    if not gmpy2.is_power(n):
        return None
    for k in primes_up_to(n.bit_length()):
        root, exact = gmpy2.iroot(n, k)
        if exact:
            inner = perfect_prime_power(root)
            if inner is None:
                return None
            return inner[0], inner[1] * k
    return None  # pragma: no cover


def _brent(n: mpz, rng: random.Random,
           budget: int) -> Tuple[Optional[mpz], int]:
    """
    Pollard rho with Brent cycle detection.

    Returns a non-trivial divisor (or ``None``) and the iterations spent.
    """
    spent = 0
    block = 128
    while spent < budget:
        y = mpz(rng.randrange(1, int(n)))
        c = mpz(rng.randrange(1, int(n)))
        g = q = mpz(1)
        r = 1
        x = ys = y
        while g == 1 and spent < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            spent += r
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(block, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                spent += min(block, r - k)
                g = gmpy2.gcd(q, n)
                k += block
            r *= 2
        if g == n:
            # backtrack from the last saved position
            g = mpz(1)
            while g == 1:
                ys = (ys * ys + c) % n
                g = gmpy2.gcd(abs(x - ys), n)
                spent += 1
        if 1 < g < n:
            return g, spent
    return None, spent


def factor(n: int,
           budget: int = DEFAULT_BUDGET,
           seed: int = 0,
           trial_bound: int = DEFAULT_TRIAL_BOUND) -> FactorReport:
    """
    Budgeted factorization.

    Trial division by all primes up to ``trial_bound``, then Brent's rho
    on the remaining composites with whatever budget is left.
    Deterministic given ``(n, budget, seed, trial_bound)``.

    Parameters
    ----------
    n : int
        ``n >= 1``
    budget : int
        work units (trial divisions + rho iterations)
    seed : int
        rho seed
    trial_bound : int
        largest trial divisor

    Returns
    -------
    FactorReport
        factorization, possibly with an unresolved cofactor
    """
    if n < 1:
        raise ValueError(f'cannot factor {n}')
    rest = mpz(n)
    exponents: Counter = Counter()
    spent = 0

    all_trial = primes_up_to(trial_bound)
    trial = all_trial[:max(budget, 0)]
    spent += len(trial)
    if len(trial) == len(all_trial):
        done_bound = max(trial_bound, 1)
    else:
        # budget ran out inside trial division
        done_bound = trial[-1] if trial else 1
    common = gmpy2.gcd(rest, _primorial(done_bound))
    if common > 1:
        for prime in trial:
            if common % prime == 0:
                rest, count = gmpy2.remove(rest, prime)
                exponents[prime] += int(count)

    rng = random.Random(seed)
    pending: List[mpz] = [rest] if rest > 1 else []
    unresolved = mpz(1)
    while pending:
        comp = pending.pop()
        if comp == 1:
            continue
        spent += 1
        if is_prime(comp):
            exponents[int(comp)] += 1
            continue
        if gmpy2.is_power(comp):
            for k in primes_up_to(comp.bit_length()):
                root, exact = gmpy2.iroot(comp, k)
                if exact:
                    pending.extend([root] * k)
                    break
            continue
        divisor, used = _brent(comp, rng, budget - spent)
        spent += used
        if divisor is None:
            logger.info('rho budget exhausted on a %d-digit composite',
                        len(str(comp)))
            unresolved *= comp
            continue
        pending.extend((divisor, comp // divisor))

    return FactorReport(input=int(n),
                        factors=tuple(sorted(
                            (int(p), e) for p, e in exponents.items())),
                        cofactor=int(unresolved),
                        trial_bound=int(done_bound),
                        spent=spent)


def prime_factors(n: int) -> List[int]:
    """Distinct prime factors of a small integer (complete factorization)."""
    report = factor(n, budget=DEFAULT_BUDGET, trial_bound=DEFAULT_TRIAL_BOUND)
    if not report.complete:  # pragma: no cover
        raise ValueError(f'could not factor {n} completely')
    return report.primes
