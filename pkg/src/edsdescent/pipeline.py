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
Stages run by the command line.

Every stage writes its artifacts under the output directory and returns a
:class:`StageReport`; ``report-all`` runs them in turn and writes one
summary keyed by descriptive anchor.
"""

import logging
import random
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import mpmath
from gmpy2 import mpq

from edsdescent.__about__ import SPEC_VERSION, __version__
from edsdescent.analytic import (ZETA2_BOUND, RealEmbedding,
                                 check_height_isogeny_ratio,
                                 check_primitive_growth, estimate_height,
                                 naive_height_estimate, prime_zeta2_partial,
                                 real_embedding)
from edsdescent.arith import primes_up_to
from edsdescent.config import RunConfig
from edsdescent.config_io import write_csv, write_json, write_yaml
from edsdescent.curve import (CurveSpec, point_order_mod_p, torsion_trivial)
from edsdescent.descent import (DescentPair, check_divdiv, check_divdiv_all,
                                check_homomorphism, check_ordord,
                                check_ordord_all, companion_eds,
                                primitive_lift_check,
                                two_primitive_divisors_report)
from edsdescent.eds import (TABLE_HEADER, CurveConstants, EdsTable,
                            PrimitiveKind, bad_prime_growth_report,
                            check_divisibility, check_rank_law,
                            curve_constants, eds_terms, good_part,
                            rank_of_apparition, term_rows)
from edsdescent.errors import (DecompositionError, PreconditionError,
                               ScheduleTooLooseError)
from edsdescent.sets import (IndexSetU, Mode, PrimeSetFamily, Schedule,
                             Verdict, assemble, check_EZS, check_venn,
                             decide_membership, decompose_rational,
                             find_U, find_Uprime, model_check_add,
                             model_check_add_all, model_check_mul)
from edsdescent.utils import (ANCHORS, format_point, parse_point,
                              parse_rational)

logger = logging.getLogger(__name__)

DIVISIBILITY_BOUND = 60
"""``B_n | B_m`` is checked for ``n | m`` up to this."""

ZETA_BOUND = 10**6
"""Primes summed for the ``1 / p^2`` tail."""

DECOMPOSE_TRIALS = 100

HOMOMORPHISM_TRIALS = 50


@dataclass
class StageReport():
    """Outcome of one stage."""

    anchor: str
    verdicts: Dict[str, Any] = field(default_factory=dict)
    violations: int = 0
    unknown: int = 0
    artifacts: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.anchor not in ANCHORS:
            raise ValueError(f'{self.anchor} is not a registered anchor')


class Session():
    """
    Lazily built objects shared by the stages of one run.

    Parameters
    ----------
    config : RunConfig
        validated configuration
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.out = Path(config.output)
        self._curve: Optional[CurveSpec] = None
        self._terms: Optional[EdsTable] = None
        self._pair: Optional[DescentPair] = None
        self._small_terms: Optional[EdsTable] = None
        self._constants: Optional[CurveConstants] = None
        self._embedding: Optional[RealEmbedding] = None
        self._index_set: Optional[IndexSetU] = None
        self._index_set_prime: Optional[IndexSetU] = None
        self._family: Optional[PrimeSetFamily] = None

    @property
    def curve(self) -> CurveSpec:
        if self._curve is None:
            self._curve = CurveSpec.from_coefficients(self.config.curve.a)
        return self._curve

    @property
    def point(self):
        return parse_point(self.config.curve.Q)

    @property
    def terms(self) -> EdsTable:
        """``B_1 .. B_N``; may grow during membership decisions."""
        if self._terms is None:
            self._terms = eds_terms(self.curve, self.point,
                                    self.config.bounds.terms)
        return self._terms

    @property
    def pair(self) -> DescentPair:
        if self._pair is None:
            iso = self.config.isogeny
            pair = DescentPair.from_config(iso.a,
                                           iso.u,
                                           parse_point(iso.Qprime),
                                           point=self.point,
                                           q=iso.q)
            if pair.curve != self.curve:
                raise PreconditionError(
                    f'isogeny image {pair.curve} is not {self.curve}')
            self._pair = pair
        return self._pair

    @property
    def small_terms(self) -> EdsTable:
        """``b_1 .. b_{q * chain}`` on ``E'``."""
        if self._small_terms is None:
            count = max(self.pair.q * self.config.bounds.chain,
                        self.config.bounds.terms)
            self._small_terms = companion_eds(self.pair, count)
        return self._small_terms

    @property
    def constants(self) -> CurveConstants:
        if self._constants is None:
            self._constants = curve_constants(
                self.terms, prime_bound=self.config.bounds.prime_bound)
        return self._constants

    @property
    def embedding(self) -> RealEmbedding:
        if self._embedding is None:
            self._embedding = real_embedding(self.curve, self.point,
                                             self.config.precision)
        return self._embedding

    @property
    def schedule(self) -> Schedule:
        sets = self.config.sets
        return Schedule(sets.schedule, parse_rational(sets.scale))

    @property
    def index_set(self) -> IndexSetU:
        if self._index_set is None:
            sets = self.config.sets
            self._index_set = find_U(self.embedding, self.constants,
                                     sets.count, sets.search_bound,
                                     self.schedule, self.config.isogeny.q)
        return self._index_set

    @property
    def index_set_prime(self) -> IndexSetU:
        if self._index_set_prime is None:
            sets = self.config.sets
            self._index_set_prime = find_Uprime(self.embedding,
                                                self.constants,
                                                self.index_set, sets.count,
                                                sets.search_bound,
                                                self.schedule,
                                                self.config.isogeny.q)
        return self._index_set_prime

    @property
    def table_budget(self) -> int:
        """Work units per factored term, capped by ``budget``."""
        return min(self.config.budget, self.config.bounds.table_budget)

    @property
    def family(self) -> PrimeSetFamily:
        if self._family is None:
            sets = self.config.sets
            mode = Mode(sets.mode)
            prime_set = (self.index_set_prime
                         if mode is Mode.EXACT else None)
            self._family = assemble(mode,
                                    self.terms,
                                    self.constants,
                                    self.index_set,
                                    prime_set,
                                    budget=self.config.budget,
                                    prime_bound=sets.prime_bound,
                                    q=self.config.isogeny.q,
                                    term_limit=sets.term_limit,
                                    seed=self.config.rho_seed,
                                    table_budget=self.table_budget)
        return self._family

    def metadata(self) -> Dict[str, Any]:
        """Inputs every artifact is stamped with."""
        return {
            'specVersion': SPEC_VERSION,
            'version': __version__,
            'curve': self.curve.coefficients,
            'Q': format_point(self.point),
            'trusted_generator': self.config.curve.trusted_generator,
            'budget': self.config.budget,
            'rho_seed': self.config.rho_seed,
            'precision': self.config.precision,
        }

    def write(self, name: str, data: Dict[str, Any],
              report: Optional[StageReport] = None) -> Path:
        """JSON artifact stamped with :meth:`metadata`."""
        path = write_json({**self.metadata(), **data}, self.out / name)
        if report is not None:
            report.artifacts.append(name)
        return path

    def write_table(self, name: str, rows, header,
                    report: Optional[StageReport] = None) -> Path:
        path = write_csv(rows, header, self.out / name)
        if report is not None:
            report.artifacts.append(name)
        return path


def _rank_law(session: Session, terms: EdsTable,
              bound: int) -> Tuple[Dict, int]:
    """Rank law and ``n_l = ord(Q mod l)`` for good ``l <= bound``."""
    rows: Dict[int, Dict] = {}
    violations = 0
    for prime in primes_up_to(bound):
        if not session.curve.is_good(prime):
            continue
        rank = rank_of_apparition(terms, prime)
        if rank is None:
            continue
        failing = check_rank_law(terms, prime)
        order = point_order_mod_p(session.curve, session.point, prime)
        rows[prime] = {'rank': rank, 'order': order, 'failing': failing}
        violations += len(failing) + (order != rank)
    return rows, violations


def run_eds(session: Session,
            max_n: Optional[int] = None,
            include_values: bool = False) -> StageReport:
    """Term table, divisibility, rank law and scanned constants."""
    report = StageReport('divisibility-and-rank-of-apparition')
    terms = session.terms
    if max_n is not None:
        terms = eds_terms(session.curve, session.point, max_n)
    top = len(terms)
    if not torsion_trivial(session.curve):
        logger.info('%s has rational torsion', session.curve)
    divisibility = check_divisibility(terms, min(DIVISIBILITY_BOUND, top))
    rank_rows, rank_violations = _rank_law(session, terms,
                                           session.config.bounds.prime_bound)
    growth = bad_prime_growth_report(terms, top)
    rows = term_rows(terms, session.table_budget,
                     include_values, session.config.rho_seed)
    session.write_table('eds_terms.csv', rows, TABLE_HEADER, report)
    report.verdicts = {
        'divisibility': not divisibility,
        'rank-of-apparition': not rank_violations,
        'bad-prime-doubling': not growth.doubling_violations,
    }
    report.violations = (len(divisibility) + rank_violations +
                         len(growth.doubling_violations))
    report.unknown = sum(1 for row in rows if row[5] == 'Unknown')
    session.write(
        'eds_constants.json', {
            'constants': session.constants,
            'b': session.constants.b,
            'divisibility_violations': divisibility,
            'rank_law': rank_rows,
            'bad_prime_growth': growth,
            'verdicts': report.verdicts,
        }, report)
    return report


def run_isogeny_check(session: Session) -> StageReport:
    """Descent sign, valuation chain, valuation addition, primitive lifts."""
    report = StageReport('descent-via-isogeny')
    pair, big, small = session.pair, session.terms, session.small_terms
    config = session.config
    chain = config.bounds.chain
    record: List = []
    divdiv = check_divdiv(pair, big, small, chain, record=record)
    divdiv_all = check_divdiv_all(pair, big, small, chain)
    ordord: List = []
    for n in range(1, chain + 1):
        value = good_part(pair.curve, small.denom(n))
        if value == 1:
            continue
        for prime in primes_up_to(config.bounds.prime_bound):
            if prime > 2 and value % prime == 0:
                check_ordord(pair, small, prime, n, record=ordord)
        ordord.append(check_ordord_all(pair, small, n))
    homomorphism = check_homomorphism(pair, HOMOMORPHISM_TRIALS,
                                      config.rho_seed)
    lifts = primitive_lift_check(pair, big, small, config.bounds.classify,
                                 session.table_budget, config.rho_seed)
    indices = [
        n for n in range(1, config.bounds.classify + 1) if gcd(n, pair.q) == 1
    ]
    primitive = two_primitive_divisors_report(pair, big, indices,
                                              session.table_budget)
    chain_bad = divdiv + [c.params for c in divdiv_all if not c.verdict]
    ordord_bad = [c for c in ordord if not c.verdict]
    report.verdicts = {
        'sign_match': pair.sign_match,
        'valuation-chain': not chain_bad,
        'valuation-addition': not ordord_bad,
        'sigma-homomorphism': not homomorphism,
        'primitive-lift': all(rec.verdict for rec in lifts),
        'two-primitive-divisors': primitive.summary,
    }
    report.violations = (len(chain_bad) + len(ordord_bad) +
                         len(homomorphism) +
                         sum(not rec.verdict for rec in lifts))
    report.unknown = primitive.summary.get(PrimitiveKind.UNKNOWN.value, 0)
    session.write(
        'isogeny_check.json', {
            'isogeny': {
                'a': pair.a,
                'u': pair.u,
                'q': pair.q,
                'eprime': pair.eprime.coefficients,
                'Qprime': format_point(pair.qprime),
                'sigma_Qprime': format_point(pair.point),
            },
            'verdicts': report.verdicts,
            'valuation_chain': record + divdiv_all,
            'valuation_addition': ordord,
            'homomorphism_failures': homomorphism,
            'primitive_lift': lifts,
        }, report)
    session.write('two_primitive_divisors.json', {
        'rows': primitive.rows,
        'summary': primitive.summary
    }, report)
    return report


def run_heights(session: Session) -> StageReport:
    """Height ratio across the isogeny, primitive growth, prime zeta tail."""
    report = StageReport('heights-and-growth')
    bounds = session.config.bounds
    low, high = bounds.height_window
    height = estimate_height(session.terms, low, high)
    height_prime = estimate_height(session.small_terms, low, high)
    naive = naive_height_estimate(session.curve, session.point)
    ratio = check_height_isogeny_ratio(height, height_prime,
                                       session.pair.q)
    growth = check_primitive_growth(session.terms,
                                    height,
                                    stop=high,
                                    window_start=bounds.growth_window)
    zeta = prime_zeta2_partial(ZETA_BOUND)
    report.verdicts = {
        'height-isogeny-ratio': ratio.verdict,
        'primitive-growth': growth.verdict,
        'prime-zeta-tail': zeta < ZETA2_BOUND,
    }
    report.violations = sum(not v for v in report.verdicts.values())
    session.write(
        'heights.json', {
            'height': height,
            'height_prime': height_prime,
            'naive_height': naive,
            'ratio': ratio,
            'growth_minimum': growth.minimum,
            'growth_window': growth.window,
            'prime_zeta_partial': {
                'bound': ZETA_BOUND,
                'value': zeta
            },
            'verdicts': report.verdicts,
        }, report)
    with mpmath.workdps(15):
        rows = [(n, mpmath.nstr(log_b, 12), mpmath.nstr(log_star, 12),
                 mpmath.nstr(ratio_n, 12))
                for n, log_b, log_star, ratio_n in growth.rows]
    session.write_table('heights.csv', rows,
                        ('n', 'log_B', 'log_primitive', 'ratio'), report)
    return report


def _partition(family: PrimeSetFamily, bound: int) -> Dict[str, Any]:
    """``S`` and ``T`` against each other for every prime up to ``bound``."""
    both, neither, unknown = [], [], 0
    for prime in primes_up_to(bound):
        in_s = decide_membership(prime, family, 'S').verdict
        in_t = decide_membership(prime, family, 'T').verdict
        if Verdict.UNKNOWN in (in_s, in_t):
            unknown += 1
        elif in_s is in_t is Verdict.IN:
            both.append(prime)
        elif in_s is in_t is Verdict.OUT:
            neither.append(prime)
    return {'bound': bound, 'both': both, 'neither': neither,
            'unknown': unknown}


def _index_set_record(index_set: IndexSetU) -> Dict[str, Any]:
    return {
        'schedule': index_set.schedule,
        'entries': index_set.entries,
        'decided_below': index_set.decided_below,
        'exclusions': index_set.exclusions,
        'floor': index_set.floor,
        'exhausted_at': index_set.exhausted_at,
    }


def run_sets_build(session: Session) -> StageReport:
    """Index sets, fragments, Venn relations, partition and integrality."""
    report = StageReport('recursive-prime-sets')
    family = session.family
    venn = check_venn(family)
    partition = _partition(family, session.config.sets.prime_bound)
    integrality = check_EZS(family, session.config.bounds.integrality)
    venn_bad = [cert.check for cert in venn if cert.verdict is False]
    report.verdicts = {
        'fragment-relations': not venn_bad,
        'exact-partition': not (partition['both'] or partition['neither']),
        'integrality': integrality.verdict,
    }
    report.violations = (len(venn_bad) + len(partition['both']) +
                         len(partition['neither']) +
                         (not integrality.verdict))
    report.unknown = partition['unknown'] + len(integrality.unknown) + sum(
        len(frag.unresolved) for frag in family.fragments.values())
    data = {
        'mode': family.mode,
        'bounds': family.bounds,
        'constants': family.constants,
        'U': _index_set_record(family.index_set),
        'fragments': family.fragments,
        'venn': venn,
        'partition': partition,
        'integrality': integrality,
        'verdicts': report.verdicts,
    }
    if family.mode is Mode.EXACT:
        data['U_prime'] = _index_set_record(family.index_set_prime)
    session.write('sets.json', data, report)
    for name, frag in family.fragments.items():
        session.write_table(f'{name}.csv',
                            [(p, frag.members[p].get('index', ''))
                             for p in frag.primes], ('prime', 'index'),
                            report)
    return report


def run_sets_decide(session: Session, prime: int,
                    which: str = 'S') -> StageReport:
    """Membership of one prime, with its witness chain."""
    report = StageReport('membership')
    verdict = decide_membership(prime, session.family, which)
    report.verdicts = {f'{which}({prime})': verdict.verdict}
    report.unknown = int(verdict.verdict is Verdict.UNKNOWN)
    session.write(f'decide_{which}_{prime}.json', {'membership': verdict},
                  report)
    return report


def _random_rationals(seed: int, count: int,
                      bound: int) -> List[mpq]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        num = rng.choice((-1, 1)) * rng.randint(1, bound)
        out.append(mpq(num, rng.randint(1, bound)))
    return out


def _decompose_one(value: mpq, family: PrimeSetFamily) -> Dict[str, Any]:
    """Decomposition plus its consistency checks; ``None`` parts if stuck."""
    try:
        s_part, t_part = decompose_rational(value, family)
    except DecompositionError as err:
        return {'x': value, 'status': 'Unknown', 'blocking': str(err)}
    again = decompose_rational(s_part * t_part, family)
    negated = decompose_rational(-value, family)
    holds = (s_part * t_part == value and s_part > 0
             and again == (s_part, t_part)
             and negated == (s_part, -t_part)
             and decompose_rational(s_part, family) == (s_part, 1))
    return {
        'x': value,
        's': s_part,
        't': t_part,
        'status': 'ok' if holds else 'violation',
    }


def run_decompose(session: Session,
                  value: Optional[mpq] = None) -> StageReport:
    """``x = s t`` for one rational, or for seeded random rationals."""
    report = StageReport('unit-decomposition')
    mode = Mode(session.config.sets.mode)
    if mode is not Mode.EXACT:
        if value is not None:
            raise PreconditionError(
                'decomposition needs exactly complementary sets')
        logger.info('decomposition skipped in %s mode', mode.value)
        report.verdicts = {'decomposition': 'skipped'}
        return report
    family = session.family
    if value is None:
        values = _random_rationals(session.config.rho_seed, DECOMPOSE_TRIALS,
                                   10**4)
    else:
        values = [mpq(value)]
    rows = [_decompose_one(val, family) for val in values]
    report.violations = sum(row['status'] == 'violation' for row in rows)
    report.unknown = sum(row['status'] == 'Unknown' for row in rows)
    report.verdicts = {'decomposition': not report.violations}
    session.write('decompose.json', {
        'rows': rows,
        'verdicts': report.verdicts
    }, report)
    return report


def run_model(session: Session,
              operation: Optional[str] = None,
              indices: Tuple[int, ...] = ()) -> StageReport:
    """
    Arithmetic read off ``U``.

    Without an operation the add predicate is checked against integer
    addition on every triple.
    """
    report = StageReport('model-arithmetic')
    index_set = session.index_set
    if operation is None:
        cert = model_check_add_all(index_set)
        report.verdicts = {'model-addition': cert.verdict}
        report.violations = int(not cert.verdict)
        session.write('model.json', {'certificate': cert}, report)
        return report
    i, j, k = indices
    check = model_check_add if operation == 'add' else model_check_mul
    holds = check(index_set, i, j, k)
    expected = (i + j == k) if operation == 'add' else (i * j == k)
    report.verdicts = {
        f'{operation}({i},{j},{k})': holds,
        'agrees-with-integers': holds == expected,
    }
    report.violations = int(holds != expected)
    session.write(f'model_{operation}.json', {
        'indices': [i, j, k],
        'y': {n: index_set.y(n) for n in sorted({i, j, k})
              if n <= len(index_set)},
        'verdicts': report.verdicts,
    }, report)
    return report


def report_all(session: Session) -> StageReport:
    """Every stage; one summary keyed by anchor."""
    summary = StageReport('summary')
    stages = [
        lambda: run_eds(session),
        lambda: run_isogeny_check(session),
        lambda: run_heights(session),
        lambda: run_sets_build(session),
        lambda: run_decompose(session),
        lambda: run_model(session),
    ]
    results: Dict[str, Any] = {}
    for stage in stages:
        try:
            result = stage()
        except ScheduleTooLooseError as err:
            # only the model stage needs a tight schedule
            logger.info('model arithmetic skipped: %s', err)
            results['model-arithmetic'] = {'skipped': str(err)}
            continue
        results[result.anchor] = result
        summary.violations += result.violations
        summary.unknown += result.unknown
        summary.artifacts.extend(result.artifacts)
    summary.verdicts = results
    session.write('summary.json', {
        'stages': results,
        'anchors': {name: ANCHORS[name] for name in results},
        'violations': summary.violations,
        'unknown': summary.unknown,
        'config': session.config.as_dict(),
    })
    write_yaml(session.config.as_dict(), session.out / 'config.yml')
    summary.artifacts.append('summary.json')
    summary.artifacts.append('config.yml')
    logger.info('%d violations, %d unknown verdicts', summary.violations,
                summary.unknown)
    return summary

