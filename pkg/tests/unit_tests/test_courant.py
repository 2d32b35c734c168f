# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Unit tests for Courant indices, ECP checks, sweeps and product lifts."""
import unittest

import numpy as np

from extended_courant.core.courant import (
    CONSISTENT,
    INCONCLUSIVE,
    NOT_COLLAPSED,
    VIOLATION,
    ECPReport,
    circle_spectrum,
    coefficient_sweep,
    courant_sanity,
    default_t_values,
    ecp_check,
    kappa,
    lifted_spectrum,
    product_lift,
    search_max_count,
    sphere_bounds,
)
from extended_courant.core.geometry import UNIT_SQUARE
from extended_courant.core.nodal_domains import SampledField
from extended_courant.exceptions import NoMatchingClusterError

# Dirichlet spectrum of the unit square in units of pi^2
SQUARE = np.pi**2 * np.array([2, 5, 5, 8, 10, 10, 13, 13])
LAMBDA = 16 * np.pi**2 / 9


def square_field(p, q, resolution=201):
    """Sampled sin(p pi x) sin(q pi y)."""
    return SampledField.from_function(
        UNIT_SQUARE, lambda x, y: np.sin(p * np.pi * x) * np.sin(q * np.pi * y), resolution
    )


class TestKappa(unittest.TestCase):
    """Courant index of an eigenvalue."""

    def test_first_index_of_cluster(self):
        """kappa is the first position of the cluster."""
        self.assertEqual(kappa(SQUARE, 5 * np.pi**2).kappa, 2)
        self.assertEqual(kappa(SQUARE, 10 * np.pi**2).kappa, 5)
        self.assertEqual(kappa([0.0, 1.0, 1.0 + 1e-6, 3.0], 1.0).kappa, 2)

    def test_no_cluster(self):
        """An eigenvalue missing from the spectrum."""
        with self.assertRaises(NoMatchingClusterError):
            kappa(SQUARE, 3 * np.pi**2)


class TestECPCheck(unittest.TestCase):
    """Nodal counts against kappa."""

    def test_square_combination(self):
        """A combination from E(5 pi^2) has two nodal domains, kappa 2."""
        u, v = square_field(2, 1), square_field(1, 2)
        report = ecp_check(
            SampledField.combine([u, v], [1.0, 0.3]), [5 * np.pi**2], SQUARE, description="u+v"
        )
        self.assertEqual(report.beta0, 2)
        self.assertEqual(report.kappa, 2)
        self.assertEqual(report.verdict, CONSISTENT)
        self.assertIsNotNone(report.nodal_partition())

    def test_sanity(self):
        """Single eigenfunctions satisfy Courant's bound."""
        fields = [square_field(1, 1), square_field(2, 1), square_field(2, 2)]
        values = np.pi**2 * np.array([2, 5, 8])
        reports = courant_sanity(fields, values, SQUARE)
        self.assertEqual([r.beta0 for r in reports], [1, 2, 4])
        self.assertTrue(all(r.verdict == CONSISTENT for r in reports))

    def test_verdicts(self):
        """Large zero bands and unresolved counts are inconclusive."""
        self.assertEqual(ECPReport("a", 4, 3, LAMBDA, 0.001).verdict, VIOLATION)
        self.assertEqual(ECPReport("b", 4, 3, LAMBDA, 0.05).verdict, INCONCLUSIVE)
        self.assertEqual(ECPReport("c", None, 3, LAMBDA, None).verdict, INCONCLUSIVE)
        self.assertEqual(ECPReport("d", 3, 3, LAMBDA, 0.05).verdict, CONSISTENT)


class TestSweeps(unittest.TestCase):
    """Sweeps of u + t v."""

    def test_default_t_values(self):
        """Odd counts contain t = 0 and are symmetric."""
        t_values = default_t_values(11)
        self.assertEqual(len(t_values), 11)
        self.assertAlmostEqual(t_values[5], 0.0)
        np.testing.assert_allclose(t_values, -t_values[::-1], atol=1e-12)

    def test_sweep_square(self):
        """Every combination of the second square eigenspace has two domains."""
        u, v = square_field(2, 1), square_field(1, 2)
        result = coefficient_sweep(u, v, [-2.0, -1.0, 0.0, 0.5, 1.0])
        self.assertEqual(result.counts, [2, 2, 2, 2, 2])
        self.assertEqual(result.max_count, 2)
        self.assertEqual(result.argmax_t, -2.0)
        self.assertEqual(result.change_intervals, [])

    def test_search_stops_at_target(self):
        """No refinement once the target count is met."""
        u, v = square_field(2, 1), square_field(1, 2)
        result = search_max_count(u, v, 2, t_values=[0.0, 1.0], refinements=3)
        self.assertEqual(len(result.t_values), 2)
        refined = search_max_count(u, v, 3, t_values=[0.0, 1.0], refinements=1, per_interval=2)
        self.assertEqual(len(refined.t_values), 4)
        self.assertEqual(refined.max_count, 2)


class TestProductLift(unittest.TestCase):
    """Lifting a combination to a product with a collapsed circle."""

    BASE = [0.0, 7.16, LAMBDA, LAMBDA, 37.49]

    def test_circle_spectrum(self):
        """0, 1, 1, 4, 4, 9."""
        np.testing.assert_allclose(circle_spectrum(6), [0, 1, 1, 4, 4, 9])

    def test_lifted_spectrum(self):
        """Smallest pairwise sums."""
        lifted = lifted_spectrum([0.0, 7.0], circle_spectrum(5), 0.5, 5)
        np.testing.assert_allclose(lifted, [0, 4, 4, 7, 11])

    def test_threshold_and_violation(self):
        """The violation survives below sqrt(mu_2(S^1) / mu) = 3 / (4 pi)."""
        report = ECPReport("1 + phi2", 4, 3, LAMBDA, 0.001)
        lifted = product_lift(self.BASE, report, circle_spectrum(16), 0.01)
        self.assertAlmostEqual(lifted.threshold, 3 / (4 * np.pi))
        self.assertTrue(lifted.collapsed)
        self.assertEqual(lifted.kappa, 3)
        self.assertEqual(lifted.verdict, VIOLATION)

    def test_not_collapsed(self):
        """Above the threshold nothing is claimed; kappa still counts the lifted sums below mu."""
        report = ECPReport("1 + phi2", 4, 3, LAMBDA, 0.001)
        lifted = product_lift(self.BASE, report, circle_spectrum(16), 0.5)
        self.assertEqual(lifted.verdict, NOT_COLLAPSED)
        # 0, 4, 4, 7.16, 11.16, 11.16, 16, 16 lie below 16 pi^2 / 9
        self.assertEqual(lifted.kappa, 9)
        self.assertEqual(len(lifted.lifted_values), len(self.BASE))

    def test_epsilon_one(self):
        """epsilon = 1 pushes mu far past the base length of the lifted spectrum."""
        report = ECPReport("1 + phi2", 4, 3, LAMBDA, 0.001)
        lifted = product_lift(self.BASE, report, circle_spectrum(16), 1.0)
        self.assertFalse(lifted.collapsed)
        self.assertEqual(lifted.verdict, NOT_COLLAPSED)
        self.assertEqual(lifted.kappa, 17)

    def test_bad_epsilon(self):
        """epsilon must be positive."""
        report = ECPReport("1 + phi2", 4, 3, LAMBDA, 0.001)
        with self.assertRaises(ValueError):
            product_lift(self.BASE, report, circle_spectrum(16), 0.0)


class TestSphereBounds(unittest.TestCase):
    """Courant and Leydold bounds on spheres."""

    def test_two_sphere(self):
        """k = 3 on the 2-sphere."""
        bounds = sphere_bounds(2, 3)
        self.assertEqual(bounds.courant, 10)
        self.assertEqual(bounds.leydold, 8)
        self.assertEqual(bounds.effective, 8)
        self.assertEqual(bounds.eigenvalue, 12)
        self.assertEqual(bounds.multiplicity, 7)

    def test_courant_is_k_squared_plus_one(self):
        """On the 2-sphere the Courant bound is k^2 + 1."""
        for k in range(1, 21):
            self.assertEqual(sphere_bounds(2, k).courant, k * k + 1)

    def test_three_sphere(self):
        """No Leydold bound beyond d = 2."""
        bounds = sphere_bounds(3, 2)
        self.assertEqual(bounds.courant, 6)
        self.assertIsNone(bounds.leydold)
        self.assertEqual(bounds.multiplicity, 9)

    def test_invalid(self):
        """Negative degree."""
        with self.assertRaises(ValueError):
            sphere_bounds(2, -1)


if __name__ == "__main__":
    unittest.main()
