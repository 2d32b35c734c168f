# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Unit tests for clustering, extrapolation, determinants and report helpers."""
import json
import os
import tempfile
import unittest

import numpy as np

from extended_courant.utils.clustering import cluster_labels, first_positions, same_cluster
from extended_courant.utils.determinants import last_column_cofactors, vandermonde_product
from extended_courant.utils.log import Log
from extended_courant.utils.report_io import dumps, round_floats, write_rows
from extended_courant.utils.richardson import extrapolate_h2, richardson_extrapolate
from extended_courant.utils.verification_result import (
    FAIL,
    PASS,
    VIOLATION_CONFIRMED,
    Verdict,
)


class TestClustering(unittest.TestCase):
    """Relative gap clustering of sorted eigenvalues."""

    def test_same_cluster(self):
        """Relative above one, absolute below."""
        self.assertTrue(same_cluster(100.0, 100.005, 1e-4))
        self.assertFalse(same_cluster(100.0, 100.02, 1e-4))
        self.assertTrue(same_cluster(0.0, 5e-5, 1e-4))

    def test_first_positions(self):
        """Every member of a cluster gets its first position."""
        values = [0.0, 7.16, 17.546, 17.546, 37.49]
        np.testing.assert_array_equal(cluster_labels(values, 1e-4), [0, 1, 2, 2, 3])
        self.assertEqual(first_positions(values, 1e-4), [1, 2, 3, 3, 5])

    def test_unsorted(self):
        """Decreasing sequences are refused."""
        with self.assertRaises(ValueError):
            cluster_labels([2.0, 1.0], 1e-4)


class TestRichardson(unittest.TestCase):
    """Extrapolation of O(h^2) errors."""

    def test_h2(self):
        """An exact quadratic error is removed."""
        exact = np.array([1.0, 4.0])
        coarse = exact + 0.4
        fine = exact + 0.1
        np.testing.assert_allclose(extrapolate_h2(coarse, fine), exact)

    def test_three_factors(self):
        """Three stretch factors remove a quadratic polynomial in the stretch."""
        stretch = np.array([1.0, 2.0, 4.0])
        values = 3.0 + 0.5 * stretch - 0.1 * stretch**2
        ydata = np.stack([values, np.zeros(3)], axis=-1)
        np.testing.assert_allclose(richardson_extrapolate(ydata, stretch)[0], 3.0)

    def test_shape_mismatch(self):
        """One stretch factor per measurement."""
        with self.assertRaises(ValueError):
            richardson_extrapolate(np.zeros((3, 2)), [1.0, 2.0])


class TestDeterminants(unittest.TestCase):
    """Cofactor expansion and Vandermonde products."""

    def test_cofactors(self):
        """det([partial | v]) = c . v."""
        rng = np.random.default_rng(4)
        partial = rng.standard_normal((4, 3))
        column = rng.standard_normal(4)
        cofactors = last_column_cofactors(partial)
        expected = np.linalg.det(np.column_stack([partial, column]))
        self.assertAlmostEqual(cofactors @ column, expected, places=10)
        with self.assertRaises(ValueError):
            last_column_cofactors(np.zeros((3, 3)))

    def test_vandermonde(self):
        """(1 - 2)(1 - 4)(2 - 4) = -6."""
        self.assertAlmostEqual(float(vandermonde_product(np.array([1.0, 2.0, 4.0]))), -6.0)
        batch = vandermonde_product(np.array([[0.0, 1.0], [3.0, 1.0]]))
        np.testing.assert_allclose(batch, [-1.0, 2.0])


class TestReports(unittest.TestCase):
    """Verdicts and deterministic report output."""

    def test_verdict(self):
        """Statuses are checked and confirmed violations count as ok."""
        self.assertEqual(Verdict.from_bool("a", True).status, PASS)
        self.assertEqual(Verdict.from_bool("a", False).status, FAIL)
        self.assertTrue(Verdict("a", VIOLATION_CONFIRMED).ok)
        self.assertFalse(Verdict("a", FAIL).ok)
        with self.assertRaises(ValueError):
            Verdict("a", "maybe")

    def test_plain_details(self):
        """numpy values become plain Python."""
        verdict = Verdict("a", PASS, {"count": np.int64(3), "values": np.array([0.5, 1.5])})
        self.assertEqual(verdict.to_dict()["details"], {"count": 3, "values": [0.5, 1.5]})

    def test_round_floats(self):
        """Twelve significant digits and named non-finite values."""
        rounded = round_floats({"a": 1 / 3, "b": [float("nan"), float("-inf")], "c": True})
        self.assertEqual(rounded, {"a": 0.333333333333, "b": ["nan", "-inf"], "c": True})

    def test_dumps_is_deterministic(self):
        """Key order does not change the text."""
        first = dumps({"b": 1.0, "a": [np.float64(2.5)]})
        second = dumps({"a": [2.5], "b": 1.0})
        self.assertEqual(first, second)
        self.assertTrue(first.endswith("\n"))
        self.assertEqual(list(json.loads(first)), ["a", "b"])

    def test_write_rows(self):
        """Floats are written with repr."""
        with tempfile.TemporaryDirectory() as folder:
            path = write_rows(os.path.join(folder, "t.csv"), ["k", "v"], [(1, 0.1)])
            with open(path, encoding="utf-8") as file:
                self.assertEqual(file.read().splitlines(), ["k,v", "1,0.1"])


class TestLog(unittest.TestCase):
    """Section timings."""

    def test_section_timings(self):
        """Repeated sections accumulate."""
        Log.reset_timings()
        with Log.section("work"):
            pass
        with Log.section("work"):
            pass
        self.assertEqual(list(Log.timings), ["work"])
        self.assertGreaterEqual(Log.timings["work"], 0.0)
        Log.reset_timings()
        self.assertEqual(Log.timings, {})


if __name__ == "__main__":
    unittest.main()
