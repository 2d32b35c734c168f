# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Tests for the rhombus experiments."""
import unittest

import numpy as np

from extended_courant.core.courant import VIOLATION
from extended_courant.core.triangle_spectra import (
    LAMBDA_UNIT,
    enumerate_mixed_spectrum,
    rhombus_spectrum_assemble,
)
from extended_courant.core.wrappers.rhombus_experiments import (
    counterexample_function,
    counterexample_rhombus_neumann,
    dirichlet_ordering,
    lifted_matches_pairwise_sums,
    neumann_ordering,
    product_lift_experiment,
    rhombus_columns,
    transversal_probe,
)
from extended_courant.utils.verification_result import PASS


def neumann_spectrum():
    """Neumann rhombus from closed forms and tabulated nnd, ndd values."""
    return rhombus_spectrum_assemble(
        {
            "Th:nnn": enumerate_mixed_spectrum("Th:nnn"),
            "Th:ndn": enumerate_mixed_spectrum("Th:ndn"),
            "Th:nnd": [7.16, 37.49, 90.06, 120.87],
            "Th:ndd": [47.63, 110.36, 189.52, 224.68],
        }
    )


class TestOrderings(unittest.TestCase):
    """Orderings of the low rhombus eigenvalues."""

    def test_neumann(self):
        """0 = nu_1 < nu_2 < nu_3 = nu_4 < nu_5."""
        verdict = neumann_ordering(neumann_spectrum())
        self.assertEqual(verdict.status, PASS)

    def test_dirichlet(self):
        """delta_5 = delta_6 comes from dnd_2 = ddd_1."""
        spectrum = rhombus_spectrum_assemble(
            {
                "Th:dnd": enumerate_mixed_spectrum("Th:dnd"),
                "Th:ddd": enumerate_mixed_spectrum("Th:ddd"),
                # synthetic columns below and above the closed form pair
                "Th:dnn": [30.0, 80.0, 150.0, 200.0],
                "Th:ddn": [90.0, 170.0, 260.0, 300.0],
            }
        )
        self.assertAlmostEqual(spectrum[5].value, 7 * LAMBDA_UNIT)
        self.assertEqual(dirichlet_ordering(spectrum).status, PASS)
        with self.assertRaises(ValueError):
            neumann_ordering(spectrum)

    def test_outer_letter(self):
        """Only 'n' and 'd' are outer letters."""
        with self.assertRaises(ValueError):
            rhombus_columns("x", 3, 4)


class TestCounterexample(unittest.TestCase):
    """1 + phi2 on the Neumann rhombus."""

    @classmethod
    def setUpClass(cls):
        cls.spectrum = neumann_spectrum()
        cls.report = counterexample_rhombus_neumann(cls.spectrum, grid=801)

    def test_nodal_lines(self):
        """The zero set is the two closed form segments."""
        func = counterexample_function()
        self.assertAlmostEqual(float(func(0.75, 0.2)), 0.0, places=12)
        self.assertTrue(self.report.segments_vanish)
        offsets = transversal_probe(func)
        self.assertGreater(len(offsets), 0)
        self.assertLess(max(offsets), 1e-3)

    def test_four_domains_against_kappa_three(self):
        """beta0 = 4 > kappa(16 pi^2 / 9) = 3."""
        self.assertEqual(self.report.report.beta0, 4)
        self.assertEqual(self.report.report.kappa, 3)
        self.assertEqual(self.report.report.verdict, VIOLATION)
        self.assertTrue(self.report.confirmed)
        self.assertLess(self.report.eigen_residual, 1e-6)

    def test_product_lift(self):
        """The violation survives on a thin product."""
        lifted = product_lift_experiment(self.spectrum, self.report, 0.01)
        self.assertTrue(lifted.collapsed)
        self.assertEqual(lifted.kappa, 3)
        self.assertEqual(lifted.verdict, VIOLATION)
        self.assertAlmostEqual(lifted.threshold, 3 / (4 * np.pi))

    def test_pairwise_sums(self):
        """Merged lifted spectrum matches brute force sums."""
        self.assertTrue(lifted_matches_pairwise_sums(self.spectrum.values(), 0.2))
        self.assertTrue(lifted_matches_pairwise_sums(self.spectrum.values(), 0.01))


if __name__ == "__main__":
    unittest.main()
