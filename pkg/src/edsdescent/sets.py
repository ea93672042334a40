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
Recursive prime sets.

Index sets ``U`` (and ``U'``) of primes ``l_i`` with ``y(l_i Q)`` close to
``i`` drive two constructions over the good primes:

- complementary: ``S = P - S2`` and ``T = P - T2``
- exact: ``S = S1 | T2`` and ``T = P - S``

Membership of a prime ``p`` depends only on ``n_p``, the order of ``Q``
modulo ``p``, and on where ``p`` ranks among the primitive primes of
``B_{n_p}``.
"""

import logging
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import mpmath
from gmpy2 import mpq

from edsdescent.analytic import (RealEmbedding, approx_y_of_multiple,
                                 theta_of_y, y_monotone)
from edsdescent.arith import (DEFAULT_BUDGET, FactorStatus, factor,
                              is_prime, primality_cost, primes_up_to)
from edsdescent.curve import group_order_mod_p, point_order_mod_p, scalar_mul
from edsdescent.eds import (CurveConstants, EdsTable, good_part,
                            is_largest_primitive, is_second_largest_primitive,
                            primitive_part, primitive_primes)
from edsdescent.errors import (DecompositionError, PreconditionError,
                               ScheduleTooLooseError, SearchExhausted)
from edsdescent.utils import Certificate

logger = logging.getLogger(__name__)

EXACT_VERIFY_BOUND = 50
"""Entries with ``l_i`` up to this are checked in exact arithmetic."""

MODEL_ADD_TOLERANCE = mpq(3, 10)
"""``|y_i + y_j - y_k|`` bound that characterizes ``i + j = k``."""

MODEL_SQUARE_TOLERANCE = mpq(1, 2)
"""``|y_m**2 - y_a|`` bound that characterizes ``a = m**2``."""

INTEGRALITY_EXCEPTION_LIMIT = 5
"""Most non-``U`` indices up to the integrality bound allowed to be
``S``-integral."""

SCHEDULES = ('strict', 'relaxed', 'custom')


class Verdict(Enum):
    IN = 'In'
    OUT = 'Out'
    UNKNOWN = 'Unknown'


class Mode(Enum):
    COMPLEMENTARY = 'complementary'
    EXACT = 'exact'


@dataclass(frozen=True)
class Schedule():
    """
    Tolerance ``|y_i - i| < tolerance(i)``.

    strict: ``1 / (10 i)``; relaxed: ``1 / 2``; custom: ``scale / i``.
    """

    name: str = 'strict'
    scale: mpq = mpq(1, 10)

    def __post_init__(self):
        if self.name not in SCHEDULES:
            raise ValueError(f'{self.name} is not a recognised schedule')
        if self.scale <= 0:
            raise ValueError('schedule scale must be positive')

    def tolerance(self, index: int) -> mpq:
        if self.name == 'strict':
            return mpq(1, 10 * index)
        if self.name == 'relaxed':
            return mpq(1, 2)
        return mpq(self.scale) / index


@dataclass(frozen=True)
class UEntry():
    index: int
    prime: int
    y: mpmath.mpf
    """approximate ``y(l_i Q)``"""

    error: mpmath.mpf
    exact_verified: bool = False


@dataclass
class IndexSetU():
    """Computed initial segment of ``U`` (or ``U'``)."""

    entries: List[UEntry] = field(default_factory=list)
    schedule: Schedule = field(default_factory=Schedule)
    search_bound: int = 0
    exclusions: Tuple[int, ...] = ()
    floor: int = 0
    """``b``: every ``l_i`` exceeds it"""

    decided_below: int = 0
    """membership in ``U`` is known for every index up to this"""

    exhausted_at: Optional[int] = None
    """index whose search ran out of primes"""

    small_scan_bound: int = 0
    """``L`` is only known up to this"""

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def primes(self) -> List[int]:
        return [entry.prime for entry in self.entries]

    def y(self, index: int) -> mpmath.mpf:
        if not 1 <= index <= len(self.entries):
            raise PreconditionError(f'index {index} outside 1..{len(self)}')
        return self.entries[index - 1].y

    def membership(self, n: int) -> Optional[bool]:
        """``n in U``; ``None`` beyond the decided range."""
        if n in self.primes:
            return True
        if n <= self.decided_below:
            return False
        return None


def _exact_y(emb: RealEmbedding, prime: int) -> mpq:
    return scalar_mul(emb.curve, emb.point, prime)[1]


def _next_entry(emb: RealEmbedding, found: IndexSetU, index: int, stop: int,
                avoid: Optional[IndexSetU]) -> Optional[UEntry]:
    """Least admissible prime in ``(decided_below, stop]`` for ``index``."""
    tol = found.schedule.tolerance(index)
    tol_real = mpmath.mpf(int(tol.numerator)) / int(tol.denominator)
    monotone = y_monotone(emb.curve)
    if monotone:
        low = theta_of_y(emb, index - tol_real)
        high = theta_of_y(emb, index + tol_real)
    primes = primes_up_to(found.search_bound)
    first = bisect_right(primes, found.decided_below)
    for prime in primes[first:bisect_right(primes, stop)]:
        if prime <= found.floor or prime in found.exclusions:
            continue
        if monotone:
            with mpmath.workdps(emb.precision):
                phi = prime * emb.theta
                phi -= mpmath.floor(phi)
            if not low < phi < high:
                continue
        approx = approx_y_of_multiple(emb, prime)
        if approx.unbounded:
            continue
        gap = abs(approx.value - index)
        if gap + approx.error >= tol_real:
            if gap - approx.error < tol_real:
                logger.info('y(%dQ) too close to the window edge of %d',
                            prime, index)
            continue
        if avoid is not None:
            extend_index_set(emb, avoid, until=prime, partial=True)
            member = avoid.membership(prime)
            if member is None:
                logger.info('cannot tell whether %d avoids U', prime)
            if member is not False:
                continue
        verified = False
        if prime <= EXACT_VERIFY_BOUND:
            verified = abs(_exact_y(emb, prime) - index) < tol
        return UEntry(index, prime, approx.value, approx.error, verified)
    return None


def extend_index_set(emb: RealEmbedding,
                     found: IndexSetU,
                     count: Optional[int] = None,
                     until: Optional[int] = None,
                     avoid: Optional[IndexSetU] = None,
                     partial: bool = False) -> IndexSetU:
    """
    Continue the search, in place.

    Parameters
    ----------
    emb : RealEmbedding
        real embedding of ``Q``
    found : IndexSetU
        entries so far
    count : Optional[int]
        search until this many entries exist
    until : Optional[int]
        search until membership is decided up to this prime
    avoid : Optional[IndexSetU]
        index set to stay disjoint from (extended as needed)
    partial : bool
        stop quietly on exhaustion

    Raises
    ------
    SearchExhausted
        no prime up to the search bound fits the next index
    """
    if (count is None) == (until is None):
        raise ValueError('give exactly one of count and until')
    while found.exhausted_at is None:
        stop = found.search_bound
        if count is not None and len(found) >= count:
            break
        if until is not None:
            if found.decided_below >= until:
                break
            stop = min(until, stop)
        index = len(found) + 1
        entry = _next_entry(emb, found, index, stop, avoid)
        if entry is not None:
            logger.debug('l_%d = %d', index, entry.prime)
            found.entries.append(entry)
            found.decided_below = entry.prime
            continue
        found.decided_below = stop
        if stop == found.search_bound:
            found.exhausted_at = index
            logger.info('search for index %d exhausted below %d', index,
                        stop)
            if not partial:
                raise SearchExhausted(index, stop)
    return found


def _empty_index_set(constants: CurveConstants, search_bound: int,
                     schedule: Optional[Schedule], q: int) -> IndexSetU:
    if constants.b is None:
        raise PreconditionError('b is beyond the scanned range')
    return IndexSetU(schedule=schedule or Schedule(),
                     search_bound=search_bound,
                     exclusions=tuple(sorted({*constants.small_primes, q})),
                     floor=constants.b,
                     small_scan_bound=constants.scan_bound)


def find_U(emb: RealEmbedding,
           constants: CurveConstants,
           count: int,
           search_bound: int,
           schedule: Optional[Schedule] = None,
           q: int = 3,
           partial: bool = False) -> IndexSetU:
    """
    ``l_1 < l_2 < ...``: least admissible primes with ``y(l_i Q)`` near ``i``.

    Admissible primes exceed ``b`` and avoid ``L`` and ``q``.

    Raises
    ------
    SearchExhausted
        no prime up to ``search_bound`` fits some index (unless ``partial``)
    """
    found = _empty_index_set(constants, search_bound, schedule, q)
    return extend_index_set(emb, found, count=count, partial=partial)


def find_Uprime(emb: RealEmbedding,
                constants: CurveConstants,
                index_set: IndexSetU,
                count: int,
                search_bound: int,
                schedule: Optional[Schedule] = None,
                q: int = 3,
                partial: bool = False) -> IndexSetU:
    """
    As :func:`find_U`, additionally avoiding every prime of ``U``.

    ``index_set`` is extended in place as far as needed to certify that
    each chosen prime lies outside ``U``.
    """
    found = _empty_index_set(constants,
                             min(search_bound, index_set.search_bound),
                             schedule, q)
    extend_index_set(emb,
                     found,
                     count=count,
                     avoid=index_set,
                     partial=partial)
    found.exclusions = tuple(
        sorted({*found.exclusions, *(p for p in index_set.primes
                                     if p <= found.decided_below)}))
    return found


@dataclass
class PrimeFragment():
    """Certified finite part of one of ``S1, S2, T1, T2``."""

    name: str
    members: Dict[int, Dict] = field(default_factory=dict)
    """prime -> witness"""

    unresolved: List[Dict] = field(default_factory=list)
    bounds: Dict[str, int] = field(default_factory=dict)

    def __contains__(self, prime: int) -> bool:
        return prime in self.members

    @property
    def primes(self) -> List[int]:
        return sorted(self.members)


def build_S1(index_set: IndexSetU,
             terms: EdsTable,
             budget: int = DEFAULT_BUDGET,
             prime_bound: int = 0,
             name: str = 'S1',
             seed: int = 0) -> PrimeFragment:
    """
    Prime divisors of ``B_{l_i}``.

    Terms in range are factored within ``budget`` (rho seeded by ``seed``);
    primes up to ``prime_bound`` with ``n_p in U`` are added from their
    point order.
    """
    frag = PrimeFragment(name,
                         bounds={
                             'terms': len(terms),
                             'prime_bound': prime_bound,
                             'budget': budget
                         })
    curve = terms.curve
    for entry in index_set.entries:
        if entry.prime > len(terms):
            frag.unresolved.append({
                'index': entry.prime,
                'reason': 'term beyond range'
            })
            continue
        value = terms.denom(entry.prime)
        if good_part(curve, value) != value:
            raise PreconditionError(f'bad prime divides B_{entry.prime}')
        report = factor(value, budget=budget, seed=seed)
        for prime, exp in report.factors:
            frag.members[prime] = {'index': entry.prime, 'exponent': exp}
        if not report.complete:
            frag.unresolved.append({
                'index': entry.prime,
                'reason': 'budget',
                'cofactor_digits': len(str(report.cofactor))
            })
    indices = set(index_set.primes)
    for prime in primes_up_to(prime_bound):
        if prime in frag.members or not curve.is_good(prime):
            continue
        order = point_order_mod_p(curve, terms.point, prime)
        if order in indices:
            frag.members[prime] = {'index': order, 'order': order}
    return frag


def build_T1(index_set: IndexSetU,
             terms: EdsTable,
             budget: int = DEFAULT_BUDGET,
             prime_bound: int = 0,
             seed: int = 0) -> PrimeFragment:
    """``S1`` over ``U`` (complementary) or over ``U'`` (exact)."""
    return build_S1(index_set, terms, budget, prime_bound, 'T1', seed)


def _clause_indices(index_set: IndexSetU, constants: CurveConstants,
                    top: int) -> List[Tuple[int, str]]:
    """In-range indices named by the three clauses."""
    out = []
    for prime in primes_up_to(top):
        if index_set.membership(prime) is False and (
                prime not in constants.small_primes):
            out.append((prime, 'prime-index'))
    ells = index_set.primes
    for i, big in enumerate(ells):
        for small in ells[:i + 1]:
            if small * big <= top:
                out.append((small * big, 'product-of-index-primes'))
        for small in constants.small_primes:
            if small * big <= top:
                out.append((small * big, 'small-prime-times-index-prime'))
    return sorted(set(out))


def build_S2(index_set: IndexSetU,
             constants: CurveConstants,
             terms: EdsTable,
             budget: int = DEFAULT_BUDGET,
             second: bool = False,
             q: int = 3,
             seed: int = 0) -> PrimeFragment:
    """
    ``p_l`` (``l`` prime outside ``U``), ``p_{l_i l_j}`` and ``p_{l l_i}``.

    ``second`` selects the second largest primitive prime (``T2``), which
    is only defined when ``q`` does not divide the index.
    """
    frag = PrimeFragment('T2' if second else 'S2',
                         bounds={
                             'terms': len(terms),
                             'budget': budget
                         })
    for index, clause in _clause_indices(index_set, constants, len(terms)):
        if second and index % q == 0:
            continue
        found = primitive_primes(terms, index, budget, seed)
        chosen = found.second_largest if second else found.largest
        if found.status is not FactorStatus.COMPLETE:
            frag.unresolved.append({
                'index': index,
                'clause': clause,
                'reason': 'budget'
            })
        elif chosen is not None:
            frag.members[chosen] = {'index': index, 'clause': clause}
    return frag


def build_T2(index_set: IndexSetU,
             constants: CurveConstants,
             terms: EdsTable,
             budget: int = DEFAULT_BUDGET,
             q: int = 3,
             seed: int = 0) -> PrimeFragment:
    """Second-largest analogue of :func:`build_S2`."""
    return build_S2(index_set,
                    constants,
                    terms,
                    budget,
                    second=True,
                    q=q,
                    seed=seed)


@dataclass
class PrimeSetFamily():
    """Fragments and everything membership decisions need."""

    mode: Mode
    terms: EdsTable
    constants: CurveConstants
    index_set: IndexSetU
    index_set_prime: Optional[IndexSetU] = None
    fragments: Dict[str, PrimeFragment] = field(default_factory=dict)
    q: int = 3
    term_limit: int = 0
    """terms may be generated up to this index for decisions"""

    budget: int = DEFAULT_BUDGET
    """work units for membership, decomposition and integrality"""

    table_budget: int = DEFAULT_BUDGET
    """work units per factored term while building fragments"""

    seed: int = 0
    """rho seed for every factorization"""

    @property
    def t_index_set(self) -> IndexSetU:
        """``U'`` in exact mode, ``U`` otherwise."""
        if self.mode is Mode.EXACT:
            if self.index_set_prime is None:
                raise PreconditionError('exact mode needs U\'')
            return self.index_set_prime
        return self.index_set

    @property
    def bounds(self) -> Dict[str, int]:
        return {
            'terms': len(self.terms),
            'term_limit': self.term_limit,
            'search_bound': self.index_set.search_bound,
            'decided_below': self.index_set.decided_below,
            'small_scan_bound': self.constants.scan_bound,
            'budget': self.budget,
            'table_budget': self.table_budget,
            'rho_seed': self.seed
        }

    def decide(self, prime: int, which: str = 'S') -> 'MembershipVerdict':
        return decide_membership(prime, self, which)


def assemble(mode: Mode,
             terms: EdsTable,
             constants: CurveConstants,
             index_set: IndexSetU,
             index_set_prime: Optional[IndexSetU] = None,
             budget: int = DEFAULT_BUDGET,
             prime_bound: int = 0,
             q: int = 3,
             term_limit: Optional[int] = None,
             seed: int = 0,
             table_budget: Optional[int] = None) -> PrimeSetFamily:
    """
    Build all four fragments and the family.

    complementary: ``S = P - S2``, ``T = P - T2``, ``T1 = S1``;
    exact: ``S = S1 | T2``, ``T = P - S``, with ``T1`` and ``T2`` over ``U'``.

    Fragment terms are factored within ``table_budget`` (capped by
    ``budget``); later decisions spend ``budget``.
    """
    table = budget if table_budget is None else min(budget, table_budget)
    family = PrimeSetFamily(mode=mode,
                            terms=terms,
                            constants=constants,
                            index_set=index_set,
                            index_set_prime=index_set_prime,
                            q=q,
                            term_limit=term_limit or len(terms),
                            budget=budget,
                            table_budget=table,
                            seed=seed)
    t_set = family.t_index_set
    family.fragments['S1'] = build_S1(index_set, terms, table, prime_bound,
                                      seed=seed)
    family.fragments['S2'] = build_S2(index_set, constants, terms, table,
                                      q=q, seed=seed)
    family.fragments['T1'] = build_T1(t_set, terms, table, prime_bound, seed)
    family.fragments['T2'] = build_T2(t_set, constants, terms, table, q,
                                      seed)
    logger.info('fragments: %s', {
        name: len(frag.members)
        for name, frag in family.fragments.items()
    })
    return family


@dataclass
class MembershipVerdict():
    """Decision for one prime with the witness it rests on."""

    prime: int
    family: str
    verdict: Verdict
    witness: Dict = field(default_factory=dict)
    budget_spent: int = 0


_Outcome = Tuple[Verdict, Dict]


def _index_factors(n: int) -> List[int]:
    """Prime factors of ``n`` with multiplicity."""
    return [p for p, e in factor(n).factors for _ in range(e)]


def _rank_test(family: PrimeSetFamily, n: int, prime: int,
               second: bool) -> Optional[bool]:
    terms = family.terms
    if n > len(terms):
        if n > family.term_limit:
            return None
        terms.extend(n)
    test = is_second_largest_primitive if second else is_largest_primitive
    return test(terms, n, prime)


def _in_small(family: PrimeSetFamily, prime: int) -> bool:
    """``l in L``; primes beyond the scan are taken outside ``L``."""
    if prime <= len(family.terms):
        return family.terms.denom(prime) == 1
    return prime in family.constants.small_primes


def _clauses(family: PrimeSetFamily, prime: int, n: int,
             index_set: IndexSetU, second: bool) -> _Outcome:
    """Evaluate the three clauses of ``S2`` (or ``T2``) at ``n = n_p``."""
    factors = _index_factors(n) if n > 1 else []
    detail: Dict = {'n_p_factors': factors}
    if second and n % family.q == 0:
        detail['clause'] = 'second largest undefined for q | n'
        return Verdict.OUT, detail
    if len(factors) == 1:
        member = index_set.membership(n)
        if member is None:
            detail['blocking'] = f'U undecided at {n}'
            return Verdict.UNKNOWN, detail
        if member or _in_small(family, n):
            detail['clause'] = 'none: index prime in U or L'
            return Verdict.OUT, detail
        detail['clause'] = 'prime-index'
    elif len(factors) == 2:
        small, big = factors
        members = [index_set.membership(small), index_set.membership(big)]
        if all(members):
            detail['clause'] = 'product-of-index-primes'
        elif (members[1] and _in_small(family, small)) or (
                members[0] and _in_small(family, big)):
            detail['clause'] = 'small-prime-times-index-prime'
        elif None in members:
            detail['blocking'] = f'U undecided at {factors}'
            return Verdict.UNKNOWN, detail
        else:
            detail['clause'] = 'none: no clause matches'
            return Verdict.OUT, detail
    else:
        detail['clause'] = 'none: no clause matches'
        return Verdict.OUT, detail
    ranked = _rank_test(family, n, prime, second)
    if ranked is None:
        detail['blocking'] = f'B_{n} beyond term limit'
        return Verdict.UNKNOWN, detail
    detail['rank'] = 'second largest' if second else 'largest'
    detail['matches'] = ranked
    return (Verdict.IN if ranked else Verdict.OUT), detail


def _index_member(index_set: IndexSetU, n: int) -> _Outcome:
    member = index_set.membership(n)
    if member is None:
        return Verdict.UNKNOWN, {'blocking': f'U undecided at {n}'}
    return (Verdict.IN if member else Verdict.OUT), {'n_p_in_U': member}


def _negate(verdict: Verdict) -> Verdict:
    return {
        Verdict.IN: Verdict.OUT,
        Verdict.OUT: Verdict.IN
    }.get(verdict, Verdict.UNKNOWN)


def _union(first: Verdict, second: Verdict) -> Verdict:
    if Verdict.IN in (first, second):
        return Verdict.IN
    if Verdict.UNKNOWN in (first, second):
        return Verdict.UNKNOWN
    return Verdict.OUT


def decide_membership(prime: int,
                      family: PrimeSetFamily,
                      which: str = 'S',
                      budget: Optional[int] = None,
                      order: Optional[int] = None) -> MembershipVerdict:
    """
    Decide ``prime`` in ``S``, ``T``, ``S1``, ``S2``, ``T1`` or ``T2``.

    Parameters
    ----------
    prime : int
        queried prime
    family : PrimeSetFamily
        assembled family
    which : str
        set to query
    budget : Optional[int]
        work units for factoring ``E_p`` (default: the family's)
    order : Optional[int]
        ``n_p`` when already known (``prime`` divides the primitive part of
        ``B_{n_p}``); ``E_p`` is then not computed

    Returns
    -------
    MembershipVerdict
        ``In``, ``Out`` or ``Unknown`` with its witness chain
    """
    if which not in ('S', 'T', 'S1', 'S2', 'T1', 'T2'):
        raise ValueError(f'{which} is not a recognised set')
    if not is_prime(prime):
        raise ValueError(f'{prime} is not prime')
    budget = family.budget if budget is None else budget
    curve = family.terms.curve
    spent = primality_cost(prime)
    witness: Dict = {}
    parts: Dict[str, Callable[[], _Outcome]]
    if not curve.is_good(prime):
        witness['bad_reduction'] = True
        parts = {name: (lambda: (Verdict.OUT, {}))
                 for name in ('S1', 'S2', 'T1', 'T2')}
    else:
        factored = True
        if order is None:
            order = point_order_mod_p(curve, family.terms.point, prime)
            group = group_order_mod_p(curve, prime, seed=family.seed)
            report = factor(group, budget=budget, seed=family.seed)
            spent += report.spent
            factored = report.complete
            witness.update({
                'n_p': order,
                'E_p': group,
                'E_p_factors': report.factors
            })
        else:
            witness.update({'n_p': order, 'n_p_source': 'rank of apparition'})
        n_p = order
        t_set = family.t_index_set
        parts = {
            'S1': lambda: _index_member(family.index_set, n_p),
            'T1': lambda: _index_member(t_set, n_p),
            'S2': lambda: _clauses(family, prime, n_p, family.index_set,
                                   False),
            'T2': lambda: _clauses(family, prime, n_p, t_set, True),
        }
        if not factored:
            blocked = {'blocking': 'E_p not factored within budget'}
            parts = {name: (lambda: (Verdict.UNKNOWN, blocked))
                     for name in parts}
    outcomes: Dict[str, Verdict] = {}

    def part(name: str) -> Verdict:
        verdict, detail = parts[name]()
        witness[name] = {'verdict': verdict.value, **detail}
        outcomes[name] = verdict
        return verdict

    if which in parts:
        verdict = part(which)
    elif family.mode is Mode.EXACT:
        in_s = _union(part('S1'), part('T2'))
        verdict = in_s if which == 'S' else _negate(in_s)
    else:
        verdict = _negate(part('S2' if which == 'S' else 'T2'))
    if verdict is Verdict.UNKNOWN:
        logger.info('%s membership of %d unknown', which, prime)
    return MembershipVerdict(prime, which, verdict, witness, spent)


def check_venn(family: PrimeSetFamily) -> List[Certificate]:
    """Fragment relations of the chosen construction."""
    frags = {
        name: set(frag.members)
        for name, frag in family.fragments.items()
    }
    curve = family.terms.curve
    certs = [
        Certificate('fragments-good-reduction', {},
                    {'bad': sorted(p for f in frags.values() for p in f
                                   if not curve.is_good(p))},
                    all(curve.is_good(p) for f in frags.values() for p in f)),
        Certificate('S1-S2-disjoint', {},
                    {'common': sorted(frags['S1'] & frags['S2'])},
                    not frags['S1'] & frags['S2']),
    ]
    if family.mode is Mode.EXACT:
        clash = frags['T2'] & (frags['T1'] | frags['S2'])
        certs.append(
            Certificate('T2-disjoint-from-T1-S2', {},
                        {'common': sorted(clash)}, not clash))
        clash = frags['T1'] & frags['S1']
        certs.append(
            Certificate('T1-S1-disjoint', {}, {'common': sorted(clash)},
                        not clash))
        meet = frags['T2'] & frags['S1']
        certs.append(
            Certificate('T2-meets-S1', {}, {'common': sorted(meet)},
                        'witnessed' if meet else 'not witnessed in bounds'))
    else:
        clash = frags['S2'] & frags['T2']
        certs.append(
            Certificate('S2-T2-disjoint', {}, {'common': sorted(clash)},
                        not clash))
    return certs


@dataclass
class IntegralityReport():
    """``nQ`` is ``S``-integral exactly for ``n = l_i``, up to exceptions."""

    rows: Dict[int, Dict] = field(default_factory=dict)
    exceptions: List[int] = field(default_factory=list)
    """indices outside ``U`` with every prime of ``B_n`` in ``S``"""

    unknown: List[int] = field(default_factory=list)
    """indices outside ``U`` with no witness and some prime undecided"""

    @property
    def verdict(self) -> bool:
        return (len(self.exceptions) <= INTEGRALITY_EXCEPTION_LIMIT
                and all(row['status'] != 'violation'
                        for row in self.rows.values()))


def _primitive_witness(family: PrimeSetFamily, m: int,
                       budget: int) -> _Outcome:
    """
    A prime outside ``S`` among the good primitive primes of ``B_m``.

    Every such prime has ``n_p = m``.  ``In`` means all of them lie in ``S``.
    """
    terms = family.terms
    value = good_part(terms.curve, primitive_part(terms, m))
    if value == 1:
        return Verdict.IN, {}
    report = factor(value, budget=budget, seed=family.seed)
    undecided = []
    for prime, _ in report.factors:
        decided = decide_membership(prime, family, 'S', budget, order=m)
        if decided.verdict is Verdict.OUT:
            return Verdict.OUT, {'prime': prime, 'n_p': m}
        if decided.verdict is Verdict.UNKNOWN:
            undecided.append(prime)
    if report.complete:
        if undecided:
            return Verdict.UNKNOWN, {'undecided': undecided}
        return Verdict.IN, {}
    member = family.index_set.membership(m)
    if family.mode is Mode.EXACT and member is False:
        # a composite non-power cofactor holds two primes with n_p = m
        # and only a second largest one can reach T2
        return Verdict.OUT, {
            'prime': 'largest primitive prime of unfactored cofactor',
            'n_p': m,
            'cofactor_digits': len(str(report.cofactor))
        }
    if member:
        return Verdict.IN, {}
    return Verdict.UNKNOWN, {'cofactor_digits': len(str(report.cofactor))}


def _integrality_row(family: PrimeSetFamily, n: int, budget: int,
                     seen: Dict[int, _Outcome]) -> Dict:
    """Search ``B_n`` for a prime outside ``S``."""
    terms = family.terms
    undecided: List = []
    for prime in terms.curve.bad_primes:
        if terms.denom(n) % prime:
            continue
        decided = decide_membership(prime, family, 'S', budget)
        if decided.verdict is Verdict.OUT:
            return {'status': 'excluded', 'prime': prime, 'bad': True}
        if decided.verdict is Verdict.UNKNOWN:
            undecided.append(prime)
    for m in range(2, n + 1):
        if n % m:
            continue
        if m not in seen:
            seen[m] = _primitive_witness(family, m, budget)
        verdict, detail = seen[m]
        if verdict is Verdict.OUT:
            return {'status': 'excluded', **detail}
        if verdict is Verdict.UNKNOWN:
            undecided.append({'n_p': m, **detail})
    if undecided:
        return {'status': 'unknown', 'undecided': undecided}
    return {'status': 'exception'}


def check_EZS(family: PrimeSetFamily,
              bound: int = 40,
              budget: Optional[int] = None) -> IntegralityReport:
    """
    ``nQ`` is ``S``-integral iff ``n`` is some ``l_i``, for ``n <= bound``.

    ``l_i Q`` is integral away from ``S`` because ``B_1 = 1`` and bad primes
    skip ``B_{l_i}``.  Any other ``n`` is excluded by a prime of ``B_n``
    decided outside ``S``; such a prime is either bad or a primitive prime
    of ``B_m`` for some ``m | n``.  Indices whose primes all lie in ``S``
    are exceptions; indices with undecided primes and no witness are
    reported as unknown.

    Parameters
    ----------
    family : PrimeSetFamily
        assembled family
    bound : int
        largest index checked (clipped to the generated terms)
    budget : Optional[int]
        work units per primitive part (default: the family's table budget)
    """
    terms = family.terms
    bound = min(bound, len(terms))
    budget = family.table_budget if budget is None else budget
    report = IntegralityReport()
    seen: Dict[int, _Outcome] = {}
    for n in range(1, bound + 1):
        value = terms.denom(n)
        if family.index_set.membership(n):
            integral = (terms.denom(1) == 1
                        and good_part(terms.curve, value) == value)
            report.rows[n] = {
                'status': 'member' if integral else 'violation',
                'in_U': True
            }
            continue
        row = _integrality_row(family, n, budget, seen)
        report.rows[n] = {'in_U': False, **row}
        if row['status'] == 'exception':
            report.exceptions.append(n)
        elif row['status'] == 'unknown':
            report.unknown.append(n)
    logger.info('integrality exceptions up to %d: %s (unknown: %s)', bound,
                report.exceptions, report.unknown)
    return report


def decompose_rational(value,
                       family: PrimeSetFamily,
                       budget: Optional[int] = None) -> Tuple[mpq, mpq]:
    """
    ``value = s * t`` with ``s`` supported on ``S`` and ``t`` on ``T``.

    ``s > 0``; the sign goes to ``t``.

    Raises
    ------
    PreconditionError
        the family is not exactly complementary, or ``value == 0``
    DecompositionError
        a prime factor is undecided or could not be found within budget
    """
    if family.mode is not Mode.EXACT:
        raise PreconditionError(
            'decomposition needs exactly complementary sets')
    value = mpq(value)
    if value == 0:
        raise PreconditionError('cannot decompose 0')
    budget = family.budget if budget is None else budget
    s_part, t_part = mpq(1), mpq(1 if value > 0 else -1)
    for part, sign in ((abs(value.numerator), 1), (value.denominator, -1)):
        report = factor(int(part), budget=budget, seed=family.seed)
        if not report.complete:
            raise DecompositionError(report.cofactor)
        for prime, exp in report.factors:
            verdict = decide_membership(prime, family, 'S', budget).verdict
            if verdict is Verdict.UNKNOWN:
                raise DecompositionError(prime)
            power = mpq(prime)**(sign * exp)
            if verdict is Verdict.IN:
                s_part *= power
            else:
                t_part *= power
    return s_part, t_part


def _require_tight(index_set: IndexSetU):
    loose = [
        i for i in range(1, len(index_set) + 1)
        if index_set.schedule.tolerance(i) > mpq(1, 10)
    ]
    if loose:
        raise ScheduleTooLooseError(
            f'tolerance above 1/10 at indices {loose}: the add predicate '
            'does not separate sums')


def _check_indices(index_set: IndexSetU, *indices: int):
    outside = [i for i in indices if not 1 <= i <= len(index_set)]
    if outside:
        raise PreconditionError(
            f'indices {outside} outside 1..{len(index_set)}')


def model_check_add(index_set: IndexSetU, i: int, j: int, k: int) -> bool:
    """
    ``|y_i + y_j - y_k| <= 3/10``, which holds exactly when ``i + j = k``.

    Raises
    ------
    ScheduleTooLooseError
        schedule tolerances exceed ``1/10``
    PreconditionError
        an index lies outside ``U``
    """
    _require_tight(index_set)
    _check_indices(index_set, i, j, k)
    gap = abs(index_set.y(i) + index_set.y(j) - index_set.y(k))
    return gap <= mpmath.mpf(3) / 10


def model_check_square(index_set: IndexSetU, m: int, a: int) -> bool:
    """``|y_m**2 - y_a| < 1/2``, which holds exactly when ``a = m**2``."""
    _require_tight(index_set)
    _check_indices(index_set, m, a)
    return abs(index_set.y(m)**2 - index_set.y(a)) < mpmath.mpf(1) / 2


def model_check_mul(index_set: IndexSetU, i: int, j: int, k: int) -> bool:
    """
    ``i * j = k`` through ``2k + i**2 + j**2 = (i + j)**2``.

    Every step is an add or square predicate on ``y`` values; the squares
    must lie inside ``U``.
    """
    total = i + j
    _check_indices(index_set, i, j, k, total, total * total)
    checks = [
        model_check_add(index_set, i, j, total),
        model_check_square(index_set, i, i * i),
        model_check_square(index_set, j, j * j),
        model_check_square(index_set, total, total * total),
    ]
    twice = 2 * k
    partial = twice + i * i
    if partial > len(index_set):
        # nothing in U to round 2k + i**2 to
        return False
    checks += [
        model_check_add(index_set, k, k, twice),
        model_check_add(index_set, twice, i * i, partial),
        model_check_add(index_set, partial, j * j, total * total),
    ]
    return all(checks)


def model_check_add_all(index_set: IndexSetU) -> Certificate:
    """Add predicate against integer addition over every triple of ``U``."""
    size = len(index_set)
    mismatches = []
    worst = mpmath.mpf(0)
    for i in range(1, size + 1):
        for j in range(1, size + 1):
            for k in range(1, size + 1):
                if model_check_add(index_set, i, j, k) != (i + j == k):
                    mismatches.append((i, j, k))
                if i + j == k:
                    worst = max(
                        worst,
                        abs(index_set.y(i) + index_set.y(j) - index_set.y(k)))
    return Certificate('model-addition', {'count': size}, {
        'mismatches': mismatches,
        'max_deviation': worst
    }, not mismatches and worst <= mpmath.mpf(3) / 10)
