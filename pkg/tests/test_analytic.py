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
Test the real embedding, heights and growth checks
"""

from unittest import TestCase

import mpmath
from gmpy2 import mpq

from edsdescent.analytic import (HeightMethod, RealEmbedding,
                                 approx_y_of_multiple,
                                 check_height_isogeny_ratio,
                                 check_primitive_growth, elliptic_log,
                                 estimate_height, naive_height_estimate,
                                 point_at, prime_zeta2_partial, real_embedding,
                                 theta_of_y, y_monotone)
from edsdescent.curve import CurveSpec, multiples
from edsdescent.errors import OutOfScopeError

from . import EXAMPLE_POINT, example_curve, example_small_terms, example_terms


class TestEmbedding(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.emb = real_embedding(example_curve(), EXAMPLE_POINT, 40)

    def test_period(self):
        self.assertAlmostEqual(float(self.emb.period),
                               float(self.emb.period_carlson()),
                               places=12)

    def test_self_test(self):
        self.assertLess(self.emb.self_test_error, mpmath.mpf('1e-20'))

    def test_theta(self):
        self.assertTrue(0 < self.emb.theta < 1)
        self.assertAlmostEqual(float(elliptic_log(self.emb, EXAMPLE_POINT)),
                               float(self.emb.theta))
        x, y = point_at(self.emb, self.emb.theta)
        self.assertAlmostEqual(float(x), 2, places=12)
        self.assertAlmostEqual(float(y), 2, places=12)
        self.assertIsNone(self.emb.point_at(0))

    def test_y_of_multiple(self):
        double = approx_y_of_multiple(self.emb, 2)
        self.assertTrue(double.contains(-11))
        triple = approx_y_of_multiple(self.emb, 3)
        with mpmath.workdps(80):
            exact = mpmath.mpf(1090) / 27
        self.assertTrue(triple.contains(exact))
        self.assertFalse(triple.contains(40))
        with self.assertRaises(ValueError):
            approx_y_of_multiple(self.emb, 0)

    def test_round_trip(self):
        for n, point in enumerate(multiples(example_curve(), EXAMPLE_POINT,
                                            50),
                                  start=1):
            approx = approx_y_of_multiple(self.emb, n)
            self.assertFalse(approx.unbounded, n)
            with mpmath.workdps(80):
                exact = (mpmath.mpf(int(point[1].numerator)) /
                         int(point[1].denominator))
                gap = abs(approx.value - exact)
                self.assertLess(gap, mpmath.mpf('1e-6') * max(1, abs(exact)),
                                n)
                self.assertTrue(approx.contains(exact), n)

    def test_theta_of_y(self):
        self.assertTrue(y_monotone(example_curve()))
        self.assertAlmostEqual(float(theta_of_y(self.emb, 2)),
                               float(self.emb.theta))
        self.assertLess(theta_of_y(self.emb, 1), theta_of_y(self.emb, 3))

    def test_two_components(self):
        with self.assertRaises(OutOfScopeError):
            RealEmbedding(CurveSpec(a4=-1), (mpq(0), mpq(0)))


class TestHeights(TestCase):

    @classmethod
    def setUpClass(cls):
        cls.terms = example_terms(100)
        cls.small = example_small_terms(100)
        cls.height = estimate_height(cls.terms, 40, 100)

    def test_regression(self):
        self.assertIs(self.height.method, HeightMethod.REGRESSION)
        self.assertEqual(self.height.sample_range, (40, 100))
        self.assertGreater(self.height.value, 0)
        with self.assertRaises(ValueError):
            estimate_height(self.terms, 40, 41)

    def test_isogeny_ratio(self):
        height_prime = estimate_height(self.small, 40, 100)
        ratio = check_height_isogeny_ratio(self.height, height_prime, 3)
        self.assertTrue(ratio.verdict)
        self.assertTrue(2.9 <= ratio.ratio <= 3.1)

    def test_naive(self):
        naive = naive_height_estimate(example_curve(), EXAMPLE_POINT)
        self.assertIs(naive.method, HeightMethod.DOUBLING)
        self.assertLess(abs(naive.value / self.height.value - 1), 0.05)

    def test_primitive_growth(self):
        growth = check_primitive_growth(self.terms, self.height, stop=100,
                                        window_start=40)
        self.assertTrue(growth.verdict)
        self.assertEqual(growth.window, (40, 100))
        self.assertNotIn(2, [row[0] for row in growth.rows])


class TestPrimeZeta(TestCase):

    def test_small(self):
        self.assertAlmostEqual(float(prime_zeta2_partial(10)), 0.421519,
                               places=6)

    def test_tail(self):
        value = prime_zeta2_partial(10**6)
        self.assertTrue(0.4522 < value < 0.453)

    def test_bound(self):
        with self.assertRaises(ValueError):
            prime_zeta2_partial(1)
