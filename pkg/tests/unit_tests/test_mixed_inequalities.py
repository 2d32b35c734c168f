# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Unit tests for inequalities between mixed eigenvalues."""
import unittest

import numpy as np

from extended_courant.core.mixed_inequalities import (
    HOLDS,
    UNRESOLVED,
    VIOLATED,
    Comparison,
    verify_inequalities,
)
from extended_courant.core.triangle_spectra import enumerate_mixed_spectrum
from extended_courant.utils.verification_result import FAIL, INCONCLUSIVE, PASS


class StubResult:
    """Stand-in for an extrapolated solver result."""

    def __init__(self, values, error=0.0):
        self.values = np.asarray(values, dtype=float)
        self.error_estimates = np.full(len(values), error)

    def best_values(self):
        """Sorted eigenvalues."""
        return self.values


def columns(**overrides):
    """All eight problems; closed forms where they exist."""
    table = {
        "Th:nnn": enumerate_mixed_spectrum("Th:nnn"),
        "Th:ndn": enumerate_mixed_spectrum("Th:ndn"),
        "Th:dnd": enumerate_mixed_spectrum("Th:dnd"),
        "Th:ddd": enumerate_mixed_spectrum("Th:ddd"),
        "Th:nnd": StubResult([7.16, 37.49, 90.06, 120.87], 0.01),
        "Th:ndd": StubResult([47.63, 110.36, 189.52, 224.68], 0.01),
        "Th:dnn": StubResult([30.0, 80.0, 150.0, 200.0], 0.01),
        "Th:ddn": StubResult([90.0, 170.0, 260.0, 300.0], 0.01),
    }
    table.update({f"Th:{sides}": column for sides, column in overrides.items()})
    return table


class TestComparison(unittest.TestCase):
    """Single comparisons against error estimates."""

    def test_strict(self):
        """Margins beyond the error decide the status."""
        self.assertEqual(Comparison("a", "b", "<", 1.0, 2.0, 0.1).status, HOLDS)
        self.assertEqual(Comparison("a", "b", "<", 2.0, 1.0, 0.1).status, VIOLATED)
        self.assertEqual(Comparison("a", "b", "<", 1.0, 1.05, 0.1).status, UNRESOLVED)

    def test_equality(self):
        """Identities hold up to a relative tolerance."""
        self.assertEqual(Comparison("a", "b", "=", 17.5, 17.5 + 1e-6, 0.0).status, HOLDS)
        self.assertEqual(Comparison("a", "b", "=", 17.5, 18.0, 0.0).status, VIOLATED)


class TestVerifyInequalities(unittest.TestCase):
    """The monotone chains and the first eigenvalue chain."""

    def test_reference_values_pass(self):
        """Reference eigenvalues satisfy every inequality."""
        verdict = verify_inequalities(columns())
        self.assertEqual(verdict.status, PASS)
        self.assertEqual(verdict.violations, [])
        # 4 chains x 4 depths x 2 links, 7 first eigenvalue links, 2 identities
        self.assertEqual(len(verdict.comparisons), 32 + 7 + 2)

    def test_violation(self):
        """A dnn eigenvalue above ddn breaks the chain."""
        verdict = verify_inequalities(columns(ddn=StubResult([20.0, 170.0, 260.0, 300.0])))
        self.assertEqual(verdict.status, FAIL)
        self.assertIn("dnn_1 < ddn_1", verdict.violations)

    def test_large_errors_are_inconclusive(self):
        """Margins below the error estimate are never violations."""
        verdict = verify_inequalities(columns(nnd=StubResult([7.16, 37.49, 90.06, 120.87], 50.0)))
        self.assertEqual(verdict.status, INCONCLUSIVE)
        self.assertIn("nnd_1 < ndd_1", verdict.unresolved)

    def test_shallow_depth(self):
        """Short columns are enough for a small i_max."""
        table = columns(dnn=StubResult([30.0]), ddn=StubResult([90.0]))
        self.assertEqual(verify_inequalities(table, i_max=1).status, PASS)
        with self.assertRaises(ValueError):
            verify_inequalities(table, i_max=2)

    def test_bad_input(self):
        """Missing columns and depths outside 1..4."""
        table = columns()
        table.pop("Th:ddn")
        with self.assertRaises(ValueError):
            verify_inequalities(table)
        with self.assertRaises(ValueError):
            verify_inequalities(columns(), i_max=5)
        table = columns()
        table["Te:nnn"] = enumerate_mixed_spectrum("Te:nnn")
        with self.assertRaises(ValueError):
            verify_inequalities(table)


if __name__ == "__main__":
    unittest.main()
