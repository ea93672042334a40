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
Test the index sets, prime set fragments and model arithmetic
"""

from random import Random
from unittest import TestCase

from gmpy2 import mpq
from mpmath import mpf

from edsdescent.arith import prime_factors, primes_up_to
from edsdescent.config import RunConfig
from edsdescent.errors import (DecompositionError, PreconditionError,
                               ScheduleTooLooseError, SearchExhausted)
from edsdescent.pipeline import Session
from edsdescent.sets import (INTEGRALITY_EXCEPTION_LIMIT, IndexSetU, Mode,
                             Schedule, UEntry, Verdict, assemble, check_EZS,
                             check_venn, decide_membership,
                             decompose_rational, find_U, model_check_add,
                             model_check_add_all, model_check_mul,
                             model_check_square)


def exact_index_set(schedule: Schedule = Schedule(),
                    size: int = 9) -> IndexSetU:
    """``y_i = i`` at made-up primes."""
    entries = [
        UEntry(i, prime, mpf(i), mpf(0))
        for i, prime in enumerate(primes_up_to(100)[2:2 + size], start=1)
    ]
    return IndexSetU(entries=entries, schedule=schedule)


def small_config() -> RunConfig:
    config = RunConfig()
    config.update({
        'bounds': {
            'terms': 40,
            'table_budget': 10**4
        },
        'sets': {
            'prime_bound': 500,
            'term_limit': 40
        },
        'precision': 40
    })
    return config


class TestSchedule(TestCase):

    def test_tolerances(self):
        self.assertEqual(Schedule().tolerance(5), mpq(1, 50))
        self.assertEqual(Schedule('relaxed').tolerance(5), mpq(1, 2))
        self.assertEqual(Schedule('custom', mpq(1, 5)).tolerance(2),
                         mpq(1, 10))

    def test_unknown(self):
        with self.assertRaises(ValueError):
            Schedule('loose')
        with self.assertRaises(ValueError):
            Schedule('custom', mpq(0))


class TestModel(TestCase):

    def test_add(self):
        index_set = exact_index_set()
        self.assertTrue(model_check_add(index_set, 2, 3, 5))
        self.assertFalse(model_check_add(index_set, 2, 3, 6))
        self.assertTrue(model_check_add_all(index_set).verdict)

    def test_square(self):
        index_set = exact_index_set()
        self.assertTrue(model_check_square(index_set, 3, 9))
        self.assertFalse(model_check_square(index_set, 2, 5))

    def test_mul(self):
        index_set = exact_index_set()
        self.assertTrue(model_check_mul(index_set, 1, 2, 2))
        self.assertFalse(model_check_mul(index_set, 1, 2, 3))

    def test_outside(self):
        with self.assertRaises(PreconditionError):
            model_check_add(exact_index_set(), 4, 6, 10)
        with self.assertRaises(PreconditionError):
            model_check_mul(exact_index_set(size=8), 1, 2, 2)

    def test_loose(self):
        with self.assertRaises(ScheduleTooLooseError):
            model_check_add(exact_index_set(Schedule('relaxed')), 1, 1, 2)
        with self.assertRaises(ScheduleTooLooseError):
            model_check_mul(exact_index_set(Schedule('custom', mpq(1, 5))),
                            1, 2, 2)
        self.assertTrue(
            model_check_mul(exact_index_set(Schedule('custom', mpq(1, 10))),
                            1, 2, 2))


class TestIndexSet(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.session = Session(small_config())
        cls.index_set = cls.session.index_set

    def test_entries(self):
        ells = self.index_set.primes
        self.assertEqual(len(ells), 3)
        self.assertEqual(ells, sorted(ells))
        for entry in self.index_set.entries:
            self.assertGreater(entry.prime, 4)
            self.assertNotIn(entry.prime, (2, 3))
            self.assertLess(abs(entry.y - entry.index),
                            mpf(1) / (10 * entry.index))

    def test_membership(self):
        ells = self.index_set.primes
        self.assertTrue(self.index_set.membership(ells[0]))
        self.assertFalse(self.index_set.membership(ells[0] - 1))
        self.assertIsNone(self.index_set.membership(10**6))

    def test_disjoint(self):
        prime_set = self.session.index_set_prime
        self.assertEqual(len(prime_set), 3)
        self.assertFalse(set(prime_set.primes) & set(self.index_set.primes))

    def test_exhausted(self):
        with self.assertRaises(SearchExhausted):
            find_U(self.session.embedding, self.session.constants, 3, 30)
        partial = find_U(self.session.embedding,
                         self.session.constants,
                         3,
                         30,
                         partial=True)
        self.assertIsNotNone(partial.exhausted_at)
        self.assertEqual(partial.decided_below, 30)


class TestFamily(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.session = Session(small_config())
        cls.family = cls.session.family

    def test_fragments(self):
        self.assertEqual(sorted(self.family.fragments),
                         ['S1', 'S2', 'T1', 'T2'])
        curve = self.family.terms.curve
        for frag in self.family.fragments.values():
            self.assertTrue(all(curve.is_good(p) for p in frag.primes))

    def test_venn(self):
        for cert in check_venn(self.family):
            self.assertIn(cert.verdict,
                          (True, 'witnessed', 'not witnessed in bounds'),
                          cert.check)

    def test_bad_prime(self):
        self.assertIs(self.family.decide(2, 'S').verdict, Verdict.OUT)
        self.assertIs(self.family.decide(2, 'T').verdict, Verdict.IN)
        self.assertTrue(self.family.decide(3, 'S').witness['bad_reduction'])

    def test_point_order(self):
        verdict = self.family.decide(5, 'S1')
        self.assertEqual(verdict.witness['n_p'], 6)
        self.assertEqual(verdict.witness['E_p'], 6)
        self.assertIs(verdict.verdict, Verdict.OUT)
        self.assertEqual(verdict.witness['S1']['verdict'], 'Out')

    def test_bad_query(self):
        with self.assertRaises(ValueError):
            self.family.decide(15, 'S')
        with self.assertRaises(ValueError):
            self.family.decide(5, 'R')

    def test_decompose(self):
        s_part, t_part = decompose_rational(mpq(-4, 9), self.family)
        self.assertEqual(s_part, 1)
        self.assertEqual(t_part, mpq(-4, 9))
        with self.assertRaises(PreconditionError):
            decompose_rational(0, self.family)

    def test_integrality(self):
        report = check_EZS(self.family, 40)
        self.assertTrue(report.verdict)
        self.assertEqual(report.exceptions, [1, 2])
        self.assertLessEqual(len(report.exceptions),
                             INTEGRALITY_EXCEPTION_LIMIT)
        self.assertEqual(report.rows[3], {
            'in_U': False,
            'status': 'excluded',
            'prime': 3,
            'bad': True
        })
        self.assertEqual(report.rows[4]['prime'], 2)
        self.assertEqual(report.rows[5]['prime'], 61)
        self.assertEqual(report.rows[7]['prime'], 13)
        for n in range(3, 41):
            self.assertIn(report.rows[n]['status'], ('excluded', 'unknown'))

    def test_integrality_witness_is_out(self):
        report = check_EZS(self.family, 40)
        for n, row in report.rows.items():
            prime = row.get('prime')
            if prime is None or isinstance(prime, str):
                continue
            self.assertEqual(self.family.terms.denom(n) % prime, 0)
            self.assertIs(self.family.decide(int(prime), 'S').verdict,
                          Verdict.OUT, n)

    def test_pinned_fragments(self):
        # B_5 = 61 and B_7 = 13 * 41 * 83
        self.assertEqual(self.family.index_set.primes[:3], [293, 2521, 3691])
        self.assertTrue(
            set(self.family.index_set_prime.primes).isdisjoint(
                self.family.index_set.primes))
        for n in range(1, 41):
            self.assertIs(self.family.index_set.membership(n), False, n)
            self.assertIs(self.family.index_set_prime.membership(n), False,
                          n)
        s2_members = self.family.fragments['S2'].members
        self.assertEqual(s2_members[61]['index'], 5)
        self.assertEqual(s2_members[83]['index'], 7)
        self.assertEqual(s2_members[83]['clause'], 'prime-index')
        self.assertEqual(self.family.fragments['T2'].members[41]['index'], 7)
        self.assertNotIn(13, self.family.fragments['T2'])
        self.assertEqual(self.family.fragments['S1'].bounds['terms'], 40)

    def test_pinned_membership(self):
        second = self.family.decide(41, 'S')
        self.assertIs(second.verdict, Verdict.IN)
        self.assertEqual(second.witness['n_p'], 7)
        self.assertEqual(second.witness['T2']['verdict'], 'In')
        self.assertIs(self.family.decide(41, 'T').verdict, Verdict.OUT)
        for prime in (13, 61, 83):
            self.assertIs(self.family.decide(prime, 'S').verdict,
                          Verdict.OUT, prime)
            self.assertIs(self.family.decide(prime, 'T').verdict,
                          Verdict.IN, prime)

    def test_known_order(self):
        given = decide_membership(41, self.family, 'S', order=7)
        self.assertIs(given.verdict, Verdict.IN)
        self.assertEqual(given.witness['n_p_source'], 'rank of apparition')
        self.assertNotIn('E_p', given.witness)

    def test_partition(self):
        for prime in primes_up_to(10**4):
            in_s = self.family.decide(prime, 'S').verdict
            in_t = self.family.decide(prime, 'T').verdict
            if in_s is Verdict.UNKNOWN:
                self.assertIs(in_t, Verdict.UNKNOWN, prime)
            else:
                self.assertIsNot(in_s, in_t, prime)
                self.assertIsNot(in_t, Verdict.UNKNOWN, prime)

    def test_decompose_random(self):
        decided = [
            p for p in primes_up_to(200)
            if self.family.decide(p, 'S').verdict is not Verdict.UNKNOWN
        ]
        self.assertIn(41, decided)
        rng = Random(3)
        nontrivial = 0
        for _ in range(100):
            value = mpq(rng.choice((-1, 1)))
            for prime in rng.sample(decided, 4):
                value *= mpq(prime)**rng.randint(-2, 2)
            if rng.random() < 0.5:
                value *= 41
            s_part, t_part = decompose_rational(value, self.family)
            self.assertEqual(s_part * t_part, value)
            self.assertGreater(s_part, 0)
            for part, verdict in ((s_part, Verdict.IN), (t_part, Verdict.OUT)):
                for side in (abs(part.numerator), part.denominator):
                    for prime in prime_factors(int(side)) if side > 1 else []:
                        self.assertIs(
                            self.family.decide(prime, 'S').verdict, verdict)
            nontrivial += s_part != 1
        self.assertGreater(nontrivial, 0)

    def test_decompose_budget(self):
        s_part, t_part = decompose_rational(mpq(41, 61), self.family)
        self.assertEqual((s_part, t_part), (41, mpq(1, 61)))
        with self.assertRaises(DecompositionError):
            decompose_rational(mpq(41 * 61), self.family, budget=5)

    def test_seed_and_budget(self):
        bounds = self.family.bounds
        self.assertEqual(bounds['budget'], RunConfig().budget)
        self.assertEqual(bounds['table_budget'], 10**4)
        self.assertEqual(bounds['rho_seed'], 0)


class TestComplementary(TestCase):

    @classmethod
    def setUpClass(cls):
        session = Session(small_config())
        cls.family = assemble(Mode.COMPLEMENTARY,
                              session.terms,
                              session.constants,
                              session.index_set,
                              budget=10**4,
                              prime_bound=200)

    def test_venn(self):
        checks = {cert.check: cert.verdict for cert in check_venn(self.family)}
        self.assertTrue(checks['S2-T2-disjoint'])
        self.assertTrue(checks['S1-S2-disjoint'])

    def test_bad_prime(self):
        self.assertIs(self.family.decide(2, 'S').verdict, Verdict.IN)
        self.assertIs(self.family.decide(2, 'T').verdict, Verdict.IN)

    def test_no_decomposition(self):
        with self.assertRaises(PreconditionError):
            decompose_rational(mpq(5, 7), self.family)


class TestBudget(TestCase):

    def test_table_budget_capped(self):
        session = Session(small_config())
        family = assemble(Mode.EXACT,
                          session.terms,
                          session.constants,
                          session.index_set,
                          session.index_set_prime,
                          budget=5,
                          seed=1,
                          table_budget=10**4)
        self.assertEqual(family.table_budget, 5)
        self.assertEqual(family.bounds['rho_seed'], 1)
        self.assertEqual(family.fragments['S2'].bounds['budget'], 5)


class TestRelaxed(TestCase):

    @classmethod
    def setUpClass(cls):
        config = small_config()
        config.update({'sets': {'schedule': 'relaxed'}})
        cls.family = Session(config).family

    def test_schedule(self):
        self.assertEqual(self.family.index_set.schedule.name, 'relaxed')

    def test_venn(self):
        for cert in check_venn(self.family):
            self.assertIn(cert.verdict,
                          (True, 'witnessed', 'not witnessed in bounds'),
                          cert.check)

    def test_complement(self):
        for prime in primes_up_to(200):
            in_s = self.family.decide(prime, 'S').verdict
            in_t = self.family.decide(prime, 'T').verdict
            if in_s is not Verdict.UNKNOWN:
                self.assertIsNot(in_s, in_t, prime)

    def test_integrality(self):
        report = check_EZS(self.family, 40)
        self.assertIn(1, report.exceptions)
        self.assertEqual(sorted(report.rows), list(range(1, 41)))
