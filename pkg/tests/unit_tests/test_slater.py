# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Unit tests for Slater determinants of one dimensional eigenbases."""
import unittest

import numpy as np

from extended_courant.core.slater import (
    NonvanishingVerdict,
    SlaterBasis,
    collinearity_check,
    hermite_closed_form_check,
    property_p_check,
    sign_change_structure,
    simplex_nonvanishing_check,
    slater_eval,
    slater_minors,
)
from extended_courant.core.sturm_liouville import SLProblem, solve_sl


class TestSlaterBasis(unittest.TestCase):
    """SlaterBasis construction and evaluation."""

    def test_sine_value(self):
        """S(0.25, 0.5) = -2 for sqrt(2) sin(pi x), sqrt(2) sin(2 pi x)."""
        self.assertAlmostEqual(slater_eval(SlaterBasis.sine(2), (0.25, 0.5)), -2.0, places=12)

    def test_particle_range(self):
        """Between two and eight particles."""
        with self.assertRaises(ValueError):
            SlaterBasis.sine(1)
        with self.assertRaises(ValueError):
            SlaterBasis.sine(9)

    def test_antisymmetry(self):
        """Swapping two particles flips the sign."""
        basis = SlaterBasis.sine(3)
        self.assertAlmostEqual(
            slater_eval(basis, (0.2, 0.5, 0.7)), -slater_eval(basis, (0.5, 0.2, 0.7)), places=12
        )
        with self.assertRaises(ValueError):
            slater_eval(basis, (0.2, 0.5))

    def test_from_periodic_spectrum(self):
        """Circle spectra are not simple and give no basis."""
        spectrum = solve_sl(SLProblem.from_preset("sine", "periodic"), 256, 4)
        with self.assertRaises(ValueError):
            SlaterBasis.from_spectrum(spectrum, 3)


class TestSlaterChecks(unittest.TestCase):
    """Nonvanishing, property P, slab signs and collinearity."""

    def test_nonvanishing_sine(self):
        """One sign on the ordered simplex."""
        verdict = simplex_nonvanishing_check(SlaterBasis.sine(3), 10000, seed=2)
        self.assertTrue(verdict.holds)
        self.assertTrue(verdict.constant_sign)

    def test_nonvanishing_near_faces(self):
        """Samples close to x_i = x_j have tiny determinants without breaking the sign."""
        verdict = simplex_nonvanishing_check(SlaterBasis.sine(4), 10000)
        self.assertTrue(verdict.holds, verdict)
        points = np.array([[0.1, 0.2], [0.3, 0.3 + 1e-12], [0.5, 0.9]])
        values = np.array([-0.8, -1e-24, -0.3])
        tiny = NonvanishingVerdict("synthetic", 3, values, points, 1e-13)
        self.assertTrue(tiny.holds)
        self.assertEqual(tiny.near_face, 1)
        self.assertLess(tiny.min_ratio, 1e-13)

    def test_nonvanishing_sign_change(self):
        """A sign change fails and reports two witnesses."""
        points = np.array([[0.1, 0.2], [0.3, 0.4], [0.5, 0.9]])
        verdict = NonvanishingVerdict("synthetic", 3, np.array([0.5, -0.2, 0.4]), points, 1e-13)
        self.assertFalse(verdict.holds)
        self.assertEqual(verdict.witnesses, [[0.1, 0.2], [0.3, 0.4]])

    def test_nonvanishing_needs_samples(self):
        """Fewer than 10^4 samples are refused."""
        with self.assertRaises(ValueError):
            simplex_nonvanishing_check(SlaterBasis.sine(2), 100)

    def test_nonvanishing_computed_basis(self):
        """Mathieu eigenfunctions behave like the sine basis."""
        spectrum = solve_sl(
            SLProblem.from_preset("mathieu:10", "dirichlet", 0.0, np.pi), 1024, 4
        )
        basis = SlaterBasis.from_spectrum(spectrum, 3)
        self.assertTrue(simplex_nonvanishing_check(basis, 10000).holds)

    def test_property_p(self):
        """The minor combination vanishes exactly at the chosen points."""
        basis = SlaterBasis.sine(3)
        c = [0.2, 0.65]
        verdict = property_p_check(basis, c)
        self.assertTrue(verdict.holds)
        np.testing.assert_allclose(verdict.zero_locations, c, atol=1e-3)

    def test_slab_signs(self):
        """Signs alternate from slab to slab."""
        basis = SlaterBasis.sine(4)
        verdict = sign_change_structure(basis, [0.1, 0.4, 0.8])
        self.assertTrue(verdict.holds)
        self.assertEqual(len(verdict.observed), 4)
        self.assertEqual(verdict.observed[0], -verdict.observed[1])

    def test_minors_reproduce_slater(self):
        """s(c) . h(x) equals the Slater determinant at (c, x)."""
        basis = SlaterBasis.sine(2)
        minors = slater_minors(basis, [0.25])
        value = minors.combination(basis, np.array([0.5]))[0]
        self.assertAlmostEqual(abs(value), abs(slater_eval(basis, (0.25, 0.5))), places=10)

    def test_collinearity(self):
        """b is collinear with s(c) at the zeros of S_b."""
        basis = SlaterBasis.sine(3)
        rng = np.random.default_rng(5)
        for _ in range(10):
            verdict = collinearity_check(basis, rng.standard_normal(3))
            self.assertTrue(verdict.holds, verdict)
            if not verdict.trivial:
                self.assertLess(verdict.sin_angle, 1e-6)

    def test_collinearity_rejects_zero(self):
        """b must be nonzero."""
        with self.assertRaises(ValueError):
            collinearity_check(SlaterBasis.sine(2), [0.0, 0.0])

    def test_hermite_closed_form(self):
        """Hermite Slater determinant is Vandermonde times a Gaussian."""
        for n in (2, 3, 4, 5):
            verdict = hermite_closed_form_check(n, samples=50, seed=n)
            self.assertTrue(verdict.holds)
            self.assertAlmostEqual(verdict.constant / verdict.expected_constant, 1.0, places=6)
        with self.assertRaises(ValueError):
            hermite_closed_form_check(6)


if __name__ == "__main__":
    unittest.main()
