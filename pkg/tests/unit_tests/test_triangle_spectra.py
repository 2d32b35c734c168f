# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Unit tests for closed form triangle spectra and the rhombus assembly."""
import csv
import os
import tempfile
import unittest

import numpy as np

from extended_courant.core.geometry import EQUILATERAL, RHOMBUS
from extended_courant.core.triangle_spectra import (
    LAMBDA_UNIT,
    LatticePair,
    MixedProblemId,
    enumerate_mixed_spectrum,
    lambda_hat,
    laplacian_residual,
    neumann_boundary_residual,
    phi2_neumann,
    reflect_extend,
    rhombus_spectrum_assemble,
    symmetry_label,
    symmetry_project,
)
from extended_courant.exceptions import InconsistentBoundaryError, UnsupportedProblemError

NND = [7.16, 37.49, 90.06, 120.87]
NDD = [47.63, 110.36, 189.52, 224.68]


class TestClosedForms(unittest.TestCase):
    """Lattice enumeration of the closed form problems."""

    def test_lattice_pair(self):
        """m^2 + mn + n^2 and the eigenvalue it scales."""
        self.assertEqual(LatticePair(1, 2).multiple, 7)
        self.assertAlmostEqual(lambda_hat((1, 1)), 3 * LAMBDA_UNIT)
        with self.assertRaises(ValueError):
            LatticePair(-1, 0)

    def test_problem_ids(self):
        """Labels parse and map to symmetry classes."""
        problem = MixedProblemId.parse("Th:nnd")
        self.assertEqual(problem.label, "Th:nnd")
        self.assertEqual(problem.symmetry, (1, -1))
        self.assertEqual(problem.boundary(), {1: "neumann", 2: "neumann", 3: "dirichlet"})
        self.assertEqual(symmetry_label(problem.symmetry), "(+,-)")
        with self.assertRaises(ValueError):
            MixedProblemId.parse("Tx:nnn")
        with self.assertRaises(ValueError):
            MixedProblemId.parse("Th:nn")

    def test_hemiequilateral_tables(self):
        """First multiples of the four closed form problems."""
        tables = {
            "Th:nnn": [0, 1, 3, 4, 7, 9],
            "Th:ndn": [1, 4, 7, 9],
            "Th:dnd": [3, 7, 12, 13, 19, 21],
            "Th:ddd": [7, 13, 19, 21],
        }
        for label, expected in tables.items():
            spectrum = enumerate_mixed_spectrum(label)
            self.assertEqual(spectrum.multiples()[: len(expected)], expected, label)

    def test_equilateral_multiplicities(self):
        """The Neumann equilateral triangle has double eigenvalues."""
        spectrum = enumerate_mixed_spectrum("Te:nnn")
        self.assertEqual(spectrum.multiples()[:6], [0, 1, 1, 3, 4, 4])
        np.testing.assert_allclose(spectrum.values()[1], LAMBDA_UNIT)

    def test_cutoff(self):
        """Everything up to the cutoff and nothing above."""
        spectrum = enumerate_mixed_spectrum("Th:nnn", cutoff=4 * LAMBDA_UNIT + 1e-9)
        self.assertEqual(spectrum.multiples(), [0, 1, 3, 4])
        self.assertEqual(len(spectrum), 4)

    def test_unsupported(self):
        """Mixed problems without closed forms are refused."""
        with self.assertRaises(UnsupportedProblemError):
            enumerate_mixed_spectrum("Th:nnd")

    def test_csv(self):
        """One row per lattice pair."""
        spectrum = enumerate_mixed_spectrum("Te:nnn", cutoff=LAMBDA_UNIT + 1e-9)
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "te.csv")
            spectrum.to_csv(path)
            with open(path, encoding="utf-8") as file:
                lines = file.read().splitlines()
        self.assertEqual(lines[0], "value,multiple,m,n,multiplicity,symmetry,kappa")
        self.assertEqual(len(lines), 4)
        self.assertEqual([line.split(",")[-1] for line in lines[1:]], ["1", "2", "2"])


class TestPhi2(unittest.TestCase):
    """Second Neumann eigenfunction of the equilateral triangle."""

    def test_residuals(self):
        """Helmholtz equation inside and zero normal derivative on the sides."""
        points = EQUILATERAL.sample(200, np.random.default_rng(3), margin=0.05)
        self.assertLess(laplacian_residual(phi2_neumann, LAMBDA_UNIT, points), 1e-6)
        self.assertLess(neumann_boundary_residual(phi2_neumann), 1e-6)

    def test_even_extension(self):
        """The even extension is continuous and fully symmetric."""
        extension = reflect_extend(phi2_neumann, 1)
        self.assertTrue(extension.continuous)
        self.assertEqual(extension.symmetry, (1, 1))

    def test_odd_extension(self):
        """The trace does not vanish, so the odd extension jumps."""
        extension = reflect_extend(phi2_neumann, -1)
        self.assertFalse(extension.continuous)
        self.assertEqual(extension.symmetry, (1, -1))
        with self.assertRaises(ValueError):
            reflect_extend(phi2_neumann, 0)

    def test_symmetry_projection(self):
        """A symmetric function is its own (+,+) component."""
        extension = reflect_extend(phi2_neumann, 1)
        components = symmetry_project(extension)
        points = RHOMBUS.sample(100, np.random.default_rng(1), margin=1e-3)
        x, y = points[:, 0], points[:, 1]
        np.testing.assert_allclose(components[(1, 1)](x, y), extension(x, y), atol=1e-10)
        for symmetry in ((1, -1), (-1, 1), (-1, -1)):
            np.testing.assert_allclose(components[symmetry](x, y), 0.0, atol=1e-10)
        total = components[(1, 1)] + components[(-1, -1)]
        np.testing.assert_allclose(total(x, y), extension(x, y), atol=1e-10)


class TestRhombusAssembly(unittest.TestCase):
    """Merging four hemiequilateral columns."""

    @classmethod
    def setUpClass(cls):
        cls.columns = {
            "Th:nnn": enumerate_mixed_spectrum("Th:nnn"),
            "Th:ndn": enumerate_mixed_spectrum("Th:ndn"),
            "Th:nnd": NND,
            "Th:ndd": NDD,
        }

    def test_neumann_rhombus(self):
        """nu_2 is in (+,-) and nu_3 = nu_4 = 16 pi^2 / 9."""
        spectrum = rhombus_spectrum_assemble(self.columns)
        self.assertEqual(spectrum.outer, "n")
        self.assertAlmostEqual(spectrum.complete_below, 120.87)
        self.assertEqual(len(spectrum), 12)
        self.assertAlmostEqual(spectrum[2].value, 7.16)
        self.assertEqual(spectrum[2].symmetry, (1, -1))
        self.assertAlmostEqual(spectrum[3].value, LAMBDA_UNIT)
        self.assertAlmostEqual(spectrum[4].value, LAMBDA_UNIT)
        self.assertEqual(spectrum.symmetries()[2:4], [(1, 1), (-1, 1)])
        self.assertEqual(spectrum.kappas[:5], [1, 2, 3, 3, 5])
        self.assertAlmostEqual(spectrum[5].value, 37.49)
        self.assertEqual(spectrum.errors().tolist(), [0.0] * 12)

    def test_one_based_indexing(self):
        """Positions start at one."""
        spectrum = rhombus_spectrum_assemble(self.columns)
        self.assertAlmostEqual(spectrum[1].value, 0.0)
        with self.assertRaises(IndexError):
            spectrum[0]  # pylint: disable=pointless-statement
        with self.assertRaises(IndexError):
            spectrum[13]  # pylint: disable=pointless-statement

    def test_mixed_outer_letters(self):
        """Columns with different outer letters cannot be merged."""
        columns = dict(self.columns)
        columns["Th:dnd"] = columns.pop("Th:ndn")
        with self.assertRaises(InconsistentBoundaryError):
            rhombus_spectrum_assemble(columns)

    def test_missing_class(self):
        """One column per symmetry class."""
        columns = dict(self.columns)
        columns.pop("Th:ndd")
        with self.assertRaises(ValueError):
            rhombus_spectrum_assemble(columns)

    def test_csv(self):
        """Rows carry the source problem and kappa."""
        spectrum = rhombus_spectrum_assemble(self.columns)
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "rhombus.csv")
            spectrum.to_csv(path)
            with open(path, newline="", encoding="utf-8") as file:
                rows = list(csv.reader(file))
        self.assertEqual(rows[0], ["position", "value", "symmetry", "problem", "index", "kappa"])
        self.assertEqual(rows[2][2:], ["(+,-)", "Th:nnd", "1", "2"])


if __name__ == "__main__":
    unittest.main()
