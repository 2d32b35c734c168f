# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Unit tests for the one dimensional Sturm-Liouville solver and checks."""
import os
import tempfile
import unittest

import numpy as np

from extended_courant.core.sturm_liouville import (
    CoefficientTriple,
    CombinationSpec,
    SLProblem,
    convergence_ratios,
    count_sign_changes,
    liouville_determinant,
    oscillation_check,
    sign_change_positions,
    solve_sl,
    sturm_bounds_check,
    sturm_suite,
    y_ell,
    y_ell_recurrence_residual,
    y_ell_zero_report,
)
from extended_courant.exceptions import DegeneratePointsError, ResolutionError


class TestSLProblem(unittest.TestCase):
    """SLProblem and coefficient preset tests."""

    def test_presets(self):
        """Presets evaluate to the documented coefficients."""
        mathieu = CoefficientTriple.from_preset("mathieu:3")
        self.assertAlmostEqual(float(mathieu.potential(0.0)), 3.0)
        custom = CoefficientTriple.from_preset("custom:1,1;0;2")
        self.assertAlmostEqual(float(custom.stiffness(2.0)), 3.0)
        self.assertAlmostEqual(float(custom.weight(5.0)), 2.0)

    def test_bad_presets(self):
        """Unknown and malformed presets raise ValueError."""
        with self.assertRaises(ValueError):
            CoefficientTriple.from_preset("airy")
        with self.assertRaises(ValueError):
            CoefficientTriple.from_preset("custom:1;0")

    def test_geometry_follows_boundary(self):
        """Periodic conditions live on the circle of length 2 pi."""
        problem = SLProblem.from_preset("sine", "periodic", 0.0, 1.0)
        self.assertTrue(problem.periodic)
        self.assertAlmostEqual(problem.length, 2 * np.pi)
        with self.assertRaises(ValueError):
            SLProblem(CoefficientTriple.from_preset("sine"), "periodic", geometry="interval")
        with self.assertRaises(ValueError):
            SLProblem.from_preset("sine", "dirichlet", 1.0, 1.0)

    def test_nonperiodic_coefficient_on_circle(self):
        """A coefficient that is not 2 pi periodic is rejected."""
        with self.assertRaises(ValueError):
            SLProblem.from_preset("custom:1;0,1;1", "periodic")


class TestSolveSL(unittest.TestCase):
    """Eigenvalue solver tests."""

    def test_dirichlet_sine(self):
        """Dirichlet eigenvalues on [0, pi] are j^2."""
        problem = SLProblem.from_preset("sine", "dirichlet", 0.0, np.pi)
        spectrum = solve_sl(problem, 1024, 4)
        np.testing.assert_allclose(spectrum.eigenvalues, [1, 4, 9, 16], rtol=1e-3)

    def test_neumann_sine(self):
        """Neumann eigenvalues on [0, pi] are (j - 1)^2."""
        problem = SLProblem.from_preset("sine", "neumann", 0.0, np.pi)
        spectrum = solve_sl(problem, 1024, 4)
        np.testing.assert_allclose(spectrum.eigenvalues, [0, 1, 4, 9], atol=2e-3)

    def test_periodic_sine(self):
        """Circle eigenvalues come in pairs after the constant mode."""
        problem = SLProblem.from_preset("sine", "periodic")
        spectrum = solve_sl(problem, 512, 5)
        np.testing.assert_allclose(spectrum.eigenvalues, [0, 1, 1, 4, 4], atol=2e-3)
        self.assertTrue(oscillation_check(spectrum).passed)
        self.assertEqual(oscillation_check(spectrum).expected, [0, 2, 2, 4, 4])

    def test_resolution_limit(self):
        """At most grid_size / 8 eigenpairs are requested."""
        problem = SLProblem.from_preset("sine", "dirichlet", 0.0, np.pi)
        with self.assertRaises(ResolutionError):
            solve_sl(problem, 64, 9)
        with self.assertRaises(ValueError):
            solve_sl(problem, 32, 2)

    def test_convergence_is_second_order(self):
        """Successive error ratios approach 4."""
        problem = SLProblem.from_preset("sine", "dirichlet", 0.0, np.pi)
        ratios = convergence_ratios(problem, 256, 4)
        self.assertTrue(np.all((ratios > 3.5) & (ratios < 4.5)), ratios)

    def test_evaluate_matches_sine(self):
        """Spline evaluation reproduces the normalized eigenfunction."""
        problem = SLProblem.from_preset("sine", "dirichlet", 0.0, np.pi)
        spectrum = solve_sl(problem, 1024, 3)
        points = np.linspace(0.3, 2.8, 7)
        expected = np.sqrt(2 / np.pi) * np.sin(2 * points)
        np.testing.assert_allclose(spectrum.evaluate(2, points), expected, atol=1e-3)

    def test_csv(self):
        """CSV rows hold index, eigenvalue and sign changes."""
        problem = SLProblem.from_preset("mathieu:10", "neumann", 0.0, np.pi)
        spectrum = solve_sl(problem, 256, 4)
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "spectrum.csv")
            spectrum.to_csv(path)
            with open(path, encoding="utf-8") as file:
                lines = file.read().splitlines()
        self.assertEqual(lines[0], "index,eigenvalue,sign_changes")
        self.assertEqual([line.split(",")[2] for line in lines[1:]], ["0", "1", "2", "3"])


class TestSturmBounds(unittest.TestCase):
    """Zero and sign change bounds of combinations."""

    @classmethod
    def setUpClass(cls):
        cls.interval = solve_sl(
            SLProblem.from_preset("mathieu:10", "dirichlet", 0.0, np.pi), 1024, 6
        )
        cls.circle = solve_sl(SLProblem.from_preset("sine", "periodic"), 1024, 6)

    def test_combination_spec_validation(self):
        """Extreme coefficients must be nonzero and sizes must match."""
        with self.assertRaises(ValueError):
            CombinationSpec(2, 4, [0.0, 1.0, 1.0])
        with self.assertRaises(ValueError):
            CombinationSpec(2, 4, [1.0, 1.0])
        with self.assertRaises(ValueError):
            CombinationSpec(3, 2, [1.0])

    def test_single_eigenfunction(self):
        """V_4 has exactly three interior zeros."""
        verdict = sturm_bounds_check(self.interval, CombinationSpec.single(4))
        self.assertTrue(verdict.passed)
        self.assertEqual(verdict.sign_changes, 3)

    def test_random_suite(self):
        """Random combinations respect both bounds."""
        self.assertTrue(sturm_suite(self.interval, 100, seed=1).passed)
        self.assertTrue(sturm_suite(self.circle, 100, seed=1).passed)

    def test_count_sign_changes(self):
        """Sign changes of a tabulated sine, on the interval and wrapped around."""
        grid = np.linspace(0, 2 * np.pi, 400, endpoint=False)
        self.assertEqual(count_sign_changes(np.sin(3 * grid + 0.1), periodic=True), 6)
        grid = np.linspace(0, np.pi, 400)
        positions = sign_change_positions(grid, np.cos(grid))
        self.assertEqual(len(positions), 1)
        self.assertAlmostEqual(positions[0], np.pi / 2, delta=grid[1] - grid[0])


class TestYEll(unittest.TestCase):
    """The Y_ell family and Liouville's determinant."""

    @classmethod
    def setUpClass(cls):
        cls.spectrum = solve_sl(SLProblem.from_preset("sine", "dirichlet", 0.0, np.pi), 1024, 6)

    def test_y0_is_the_combination(self):
        """Y_0 equals Y."""
        combo = CombinationSpec(2, 4, [1.0, -0.5, 0.3])
        np.testing.assert_allclose(y_ell(self.spectrum, combo, 0), self.spectrum.combination(combo))

    def test_recurrence(self):
        """G Y_{ell+1} = (K Y_ell')' - Q Y_ell at rounding level."""
        combo = CombinationSpec(1, 5, [0.4, -1.0, 0.2, 0.7, -0.3])
        for ell in range(3):
            self.assertLess(y_ell_recurrence_residual(self.spectrum, combo, ell), 1e-6)

    def test_y_ell_zero_bound(self):
        """Every Y_ell of a combination of V_2..V_4 keeps at most three zeros."""
        combo = CombinationSpec(2, 4, [1.0, 0.2, -0.4])
        for ell in range(4):
            report = y_ell_zero_report(self.spectrum, combo, ell)
            self.assertLessEqual(report.zeros_with_multiplicity, 3)
            self.assertGreaterEqual(report.sign_changes, 1)

    def test_liouville_determinant(self):
        """U changes sign exactly at the chosen points."""
        determinant = liouville_determinant(self.spectrum, [np.pi / 2])
        self.assertTrue(determinant.zeros_at_nodes)
        determinant = liouville_determinant(self.spectrum, [0.7, 1.9, 2.5])
        self.assertTrue(determinant.zeros_at_nodes)

    def test_liouville_degenerate(self):
        """Points at common zeros make every cofactor vanish."""
        with self.assertRaises((DegeneratePointsError, ValueError)):
            liouville_determinant(self.spectrum, [np.pi / 2, np.pi / 2])


if __name__ == "__main__":
    unittest.main()
