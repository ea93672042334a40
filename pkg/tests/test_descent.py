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
Test descent through the 3-isogeny
"""

from unittest import TestCase

from gmpy2 import mpq

from edsdescent.arith import primes_up_to
from edsdescent.descent import (DescentPair, check_divdiv, check_divdiv_all,
                                check_homomorphism, check_ordord,
                                check_ordord_all, primitive_lift_check,
                                sigma, two_primitive_divisors_report)
from edsdescent.eds import (PrimitiveKind, classify_primitive, good_part,
                            primitive_part, strip_common)
from edsdescent.errors import (NoDescentError, OutOfScopeError,
                               PreconditionError)

from . import (EXAMPLE_POINT, EXAMPLE_PRIME_POINT, example_pair,
               example_small_terms, example_terms)


class TestPair(TestCase):

    def setUp(self):
        self.pair = example_pair()

    def test_curves(self):
        self.assertEqual(self.pair.curve.coefficients, (0, 0, 0, 0, -4))
        self.assertEqual(self.pair.eprime.coefficients, (0, 0, 0, 0, 108))
        self.assertEqual(set(self.pair.curve.bad_primes),
                         set(self.pair.eprime.bad_primes))

    def test_sigma(self):
        self.assertEqual(sigma(self.pair, EXAMPLE_PRIME_POINT),
                         (mpq(2), mpq(-2)))
        self.assertEqual(self.pair.sign_match, -1)
        self.assertIsNone(sigma(self.pair, None))

    def test_default_point(self):
        pair = DescentPair.from_config(108, 3, EXAMPLE_PRIME_POINT)
        self.assertEqual(pair.point, (mpq(2), mpq(-2)))
        self.assertEqual(pair.sign_match, 1)

    def test_kernel(self):
        with self.assertRaises(OutOfScopeError):
            sigma(self.pair, (mpq(0), mpq(1)))

    def test_preconditions(self):
        with self.assertRaises(PreconditionError):
            DescentPair.from_config(108, 2, EXAMPLE_PRIME_POINT)
        with self.assertRaises(OutOfScopeError):
            DescentPair.from_config(108, 3, EXAMPLE_PRIME_POINT, q=5)
        with self.assertRaises(NoDescentError):
            DescentPair.from_config(108,
                                    3,
                                    EXAMPLE_PRIME_POINT,
                                    point=(mpq(5), mpq(-11)))

    def test_homomorphism(self):
        self.assertEqual(check_homomorphism(self.pair, trials=50, seed=0), [])


class TestValuations(TestCase):

    def setUp(self):
        self.pair = example_pair()
        self.big = example_terms()
        self.small = example_small_terms()

    def test_chain(self):
        record = []
        self.assertEqual(
            check_divdiv(self.pair, self.big, self.small, 30, record=record),
            [])
        self.assertTrue(record)
        self.assertTrue(
            all(cert.check == 'valuation-chain' for cert in record))

    def test_chain_all_primes(self):
        certs = check_divdiv_all(self.pair, self.big, self.small, 30)
        self.assertEqual(len(certs), 30)
        self.assertTrue(all(cert.verdict for cert in certs))

    def test_addition(self):
        checked = 0
        for n in range(1, 31):
            value = good_part(self.pair.curve, self.small.denom(n))
            for prime in primes_up_to(1000):
                if prime > 2 and value % prime == 0:
                    self.assertTrue(
                        check_ordord(self.pair, self.small, prime, n))
                    checked += 1
            self.assertTrue(
                check_ordord_all(self.pair, self.small, n).verdict)
        self.assertGreater(checked, 0)

    def test_addition_preconditions(self):
        with self.assertRaises(PreconditionError):
            check_ordord(self.pair, self.small, 2, 4)
        with self.assertRaises(PreconditionError):
            check_ordord(self.pair, self.small, 3, 4)
        with self.assertRaises(PreconditionError):
            check_ordord(self.pair, self.small, 1000003, 4)


class TestPrimitiveDivisors(TestCase):

    def setUp(self):
        self.pair = example_pair()
        self.big = example_terms()
        self.small = example_small_terms()

    def test_lift(self):
        records = primitive_lift_check(self.pair, self.big, self.small, 20,
                                       budget=10**5)
        self.assertTrue(records)
        self.assertTrue(all(rec.verdict for rec in records))
        self.assertNotIn(3, [rec.n for rec in records])

    def test_report(self):
        indices = [n for n in range(1, 41) if n % 3]
        report = two_primitive_divisors_report(self.pair, self.big, indices,
                                               budget=10**5)
        self.assertEqual(sum(report.summary.values()), len(indices))
        resolved = len(indices) - report.summary['Unknown']
        self.assertGreaterEqual(resolved, 0.8 * len(indices))
        self.assertEqual(report.rows[4], ('AtLeastTwoPrimes',
                                          'ExactlyOnePrime(11,1)'))


    def test_report_rows(self):
        indices = [n for n in range(1, 41) if n % 3]
        report = two_primitive_divisors_report(self.pair, self.big, indices,
                                               budget=10**5)
        self.assertEqual(sorted(report.rows), indices)
        self.assertEqual(report.rows[1], ('Zero', 'Zero'))
        self.assertEqual(report.rows[2], ('Zero', 'Zero'))
        self.assertEqual(report.rows[4], ('AtLeastTwoPrimes',
                                          'ExactlyOnePrime(11,1)'))

    def test_two_primitive_window(self):
        window = []
        for n in range(5, 41):
            if n % 3 == 0:
                continue
            lifted = good_part(self.pair.curve,
                               primitive_part(self.small, n))
            whole = good_part(self.pair.curve, primitive_part(self.big, n))
            self.assertEqual(whole % lifted, 0, n)
            if lifted > 1 and strip_common(whole, lifted) > 1:
                window.append(n)
                kind = classify_primitive(self.big, n, 10**5,
                                          good_only=True).kind
                self.assertIn(kind,
                              (PrimitiveKind.MANY, PrimitiveKind.UNKNOWN), n)
        self.assertTrue(window)
    def test_report_rejects(self):
        with self.assertRaises(PreconditionError):
            two_primitive_divisors_report(self.pair, self.big, [3])
