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
Test parsing helpers, serialization and the anchor registry
"""

from unittest import TestCase

from gmpy2 import mpq

from edsdescent.pipeline import StageReport
from edsdescent.utils import (ANCHORS, Certificate, format_point, json_safe,
                              parse_point, parse_rational)


class TestRational(TestCase):

    def test_parse(self):
        self.assertEqual(parse_rational('-4/6'), mpq(-2, 3))
        self.assertEqual(parse_rational(7), mpq(7))
        self.assertEqual(parse_point(['2/1', '2']), (mpq(2), mpq(2)))
        self.assertIsNone(parse_point(None))

    def test_format(self):
        self.assertEqual(format_point((mpq(6), mpq(-18))), ('6/1', '-18/1'))

    def test_json_safe(self):
        self.assertEqual(json_safe({1: mpq(2, 4), 'b': {3, 1}}), {
            '1': '1/2',
            'b': [1, 3]
        })


class TestAnchors(TestCase):

    def test_registered(self):
        self.assertTrue(all(ANCHORS.values()))
        self.assertEqual(Certificate('S1-S2-disjoint').verdict, True)
        self.assertEqual(StageReport('summary').anchor, 'summary')

    def test_unregistered(self):
        with self.assertRaises(ValueError):
            Certificate('no-such-anchor')
        with self.assertRaises(ValueError):
            StageReport('no-such-stage')
