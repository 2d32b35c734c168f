# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Slater determinants built from one dimensional eigenfunctions."""

import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import hermite, legendre
from scipy.optimize import brentq
from scipy.stats import norm, qmc

from extended_courant.core.sturm_liouville import SLSpectrum, sign_change_positions
from extended_courant.exceptions import DegeneratePointsError, SolverAccuracyError
from extended_courant.utils.determinants import last_column_cofactors, vandermonde_product
from extended_courant.utils.log import Log
from extended_courant.utils.verification_result import VerificationResult

MAX_PARTICLES = 8
ORTHONORMALITY_TOLERANCE = 1e-6
ZERO_TOLERANCE = 1e-7
DIP_TOLERANCE = 1e-9
COLLINEARITY_TOLERANCE = 1e-6


def hermite_functions(n: int, points) -> np.ndarray:
    """First n normalized Hermite functions by the three-term recurrence.

    Returns:
        array of shape (n, len(points)).
    """
    points = np.asarray(points, dtype=float)
    values = np.empty((n,) + points.shape)
    values[0] = np.pi**-0.25 * np.exp(-(points**2) / 2)
    if n > 1:
        values[1] = np.sqrt(2.0) * points * values[0]
    for k in range(1, n - 1):
        values[k + 1] = (
            np.sqrt(2.0 / (k + 1)) * points * values[k] - np.sqrt(k / (k + 1)) * values[k - 1]
        )
    return values


class SlaterBasis:
    """The first n eigenfunctions h_1..h_n with eigenvalues l_1 < ... < l_n.

    Attr:
        functions (list): evaluators h_j, vectorized over arrays of points.
        eigenvalues (np.ndarray): strictly increasing eigenvalues.
        window (tuple): the open interval (a, b) carrying the particles;
            infinite ends are allowed.
        scan_window (tuple): finite interval used for grid scans.
        name (str): label used in reports.
    """

    def __init__(
        self,
        functions: Sequence[Callable],
        eigenvalues: Sequence[float],
        window: Tuple[float, float],
        quadrature: Tuple[np.ndarray, np.ndarray],
        name: str,
        scan_window: Optional[Tuple[float, float]] = None,
    ):
        """
        Args:
            functions: the evaluators h_1..h_n.
            eigenvalues: their eigenvalues.
            window: the domain of the particles.
            quadrature: nodes and weights used to check orthonormality.
            name: label used in reports.
            scan_window: finite interval for grid scans, defaults to window.
        """
        self.functions = list(functions)
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.window = (float(window[0]), float(window[1]))
        self.scan_window = scan_window or self.window
        self.name = name
        if not 2 <= self.n <= MAX_PARTICLES:
            raise ValueError(f"Particle count must be in [2, {MAX_PARTICLES}], got {self.n}.")
        if len(self.eigenvalues) != self.n:
            raise ValueError("One eigenvalue per function is required.")
        if np.any(np.diff(self.eigenvalues) <= 0):
            raise ValueError("Basis eigenvalues must be strictly increasing.")
        nodes, weights = quadrature
        tabulated = self.evaluate(nodes)
        gram = (tabulated * weights) @ tabulated.T
        deviation = float(np.max(np.abs(gram - np.eye(self.n))))
        if deviation > ORTHONORMALITY_TOLERANCE:
            raise ValueError(
                f"Basis '{name}' is not orthonormal: Gram deviation {deviation:.3g}."
            )

    @property
    def n(self) -> int:
        """Particle count."""
        return len(self.functions)

    @property
    def energy(self) -> float:
        """The n-particle ground energy l_1 + ... + l_n."""
        return float(np.sum(self.eigenvalues))

    def evaluate(self, points) -> np.ndarray:
        """Values h_j(x) with shape (n,) + shape(points)."""
        points = np.asarray(points, dtype=float)
        return np.array([func(points) for func in self.functions])

    @classmethod
    def sine(cls, n: int) -> "SlaterBasis":
        """sqrt(2) sin(j pi x) on (0, 1), eigenvalues (j pi)^2."""
        nodes, weights = legendre.leggauss(64)
        quadrature = ((nodes + 1) / 2, weights / 2)
        functions = [
            (lambda x, j=j: np.sqrt(2.0) * np.sin(j * np.pi * np.asarray(x)))
            for j in range(1, n + 1)
        ]
        eigenvalues = [(j * np.pi) ** 2 for j in range(1, n + 1)]
        return cls(functions, eigenvalues, (0.0, 1.0), quadrature, f"sine-{n}")

    @classmethod
    def hermite(cls, n: int) -> "SlaterBasis":
        """Hermite functions on the line, eigenvalues 2k + 1 of -u'' + x^2 u."""
        nodes, weights = hermite.hermgauss(60)
        quadrature = (nodes, weights * np.exp(nodes**2))
        functions = [(lambda x, k=k: hermite_functions(k + 1, x)[k]) for k in range(n)]
        eigenvalues = [2 * k + 1 for k in range(n)]
        return cls(
            functions,
            eigenvalues,
            (-np.inf, np.inf),
            quadrature,
            f"hermite-{n}",
            scan_window=(-6.0, 6.0),
        )

    @classmethod
    def from_spectrum(cls, spectrum: SLSpectrum, n: int) -> "SlaterBasis":
        """Spline evaluators of the first n eigenfunctions of an interval problem."""
        if spectrum.problem.periodic:
            raise ValueError("Slater bases need simple eigenvalues; use an interval problem.")
        if n > spectrum.count:
            raise ValueError(f"Spectrum has {spectrum.count} eigenpairs, {n} requested.")
        functions = [(lambda x, j=j: spectrum.evaluate(j, x)) for j in range(1, n + 1)]
        problem = spectrum.problem
        return cls(
            functions,
            spectrum.eigenvalues[:n],
            (problem.alpha, problem.beta),
            (spectrum.grid, spectrum.quadrature_weights),
            f"sl-{problem.boundary}-{n}",
        )

    def sample_simplex(self, count: int, seed: int = 0) -> np.ndarray:
        """Quasi-random points of the ordered simplex as sorted Halton tuples."""
        uniform = qmc.Halton(d=self.n, scramble=True, seed=seed).random(count)
        uniform = np.clip(uniform, 1e-12, 1 - 1e-12)
        low, high = self.window
        if np.isfinite(low) and np.isfinite(high):
            points = low + (high - low) * uniform
        else:
            points = norm.ppf(uniform)
        return np.sort(points, axis=1)

    def reference_point(self) -> np.ndarray:
        """Equally spaced ordered point used to fix the global simplex sign."""
        low, high = self.scan_window
        return low + (high - low) * np.arange(1, self.n + 1) / (self.n + 1)

    def scan_grid(self, grid_size: int) -> np.ndarray:
        """Open uniform grid on the scan window."""
        low, high = self.scan_window
        return np.linspace(low, high, grid_size + 2)[1:-1]

    def check_interior(self, points: np.ndarray):
        """Raises ValueError unless points are strictly increasing inside the window."""
        points = np.asarray(points, dtype=float)
        if np.any(np.diff(points) <= 0):
            raise ValueError(f"Points must be strictly increasing, got {points}.")
        if len(points) and (points[0] <= self.window[0] or points[-1] >= self.window[1]):
            raise ValueError(f"Points must lie inside {self.window}, got {points}.")

    def __repr__(self):
        return f"SlaterBasis({self.name}, eigenvalues={np.round(self.eigenvalues, 6)})"


class SimplexPoint:
    """An ordered configuration x_1 < ... < x_n."""

    def __init__(self, coordinates: Sequence[float]):
        coordinates = np.asarray(coordinates, dtype=float)
        if np.any(np.diff(coordinates) <= 0):
            raise ValueError(f"Simplex coordinates must increase strictly, got {coordinates}.")
        self.coordinates = coordinates


def slater_values(basis: SlaterBasis, points) -> np.ndarray:
    """det[h_i(x_j)] for each row of points (shape (m, n))."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    count, n = points.shape
    if n != basis.n:
        raise ValueError(f"Points have {n} coordinates, basis has {basis.n} functions.")
    tabulated = basis.evaluate(points.ravel()).reshape(n, count, n)
    return np.linalg.det(tabulated.transpose(1, 0, 2))


def slater_eval(basis: SlaterBasis, point: Sequence[float]) -> float:
    """The Slater determinant det[h_i(x_j)] at one point (any ordering)."""
    return float(slater_values(basis, [point])[0])


class NonvanishingVerdict(VerificationResult):
    """Sign of the Slater determinant over samples of the simplex."""

    def __init__(self, basis_name, samples, values, points, tolerance):
        self.basis = basis_name
        self.samples = samples
        magnitude = np.abs(values)
        self.min_ratio = float(np.min(magnitude) / np.max(magnitude))
        positive = values > 0
        negative = values < 0
        self.global_sign = 1 if np.count_nonzero(positive) >= np.count_nonzero(negative) else -1
        self.constant_sign = bool(np.all(positive) or np.all(negative))
        self.witnesses = []
        if not self.constant_sign:
            self.witnesses = [
                points[np.flatnonzero(positive)[0]].tolist(),
                points[np.flatnonzero(~positive)[0]].tolist(),
            ]
        # samples close to a face x_i = x_j; the determinant tends to 0 there
        self.near_face = int(np.count_nonzero(magnitude <= tolerance * np.max(magnitude)))
        self.holds = self.constant_sign


def simplex_nonvanishing_check(
    basis: SlaterBasis, samples: int = 10000, seed: int = 0, tolerance: float = 1e-13
) -> NonvanishingVerdict:
    """The Slater determinant keeps one sign on the ordered simplex."""
    if samples < 10000:
        raise ValueError(f"At least 10^4 samples are required, got {samples}.")
    points = basis.sample_simplex(samples, seed)
    values = slater_values(basis, points)
    verdict = NonvanishingVerdict(basis.name, samples, values, points, tolerance)
    Log.log(
        f"Nonvanishing {basis.name}: sign {verdict.global_sign}, "
        f"min ratio {verdict.min_ratio:.3g}"
    )
    return verdict


class MinorVector(VerificationResult):
    """Signed (n-1)x(n-1) Slater minors s_1..s_n at points c.

    ``sum_j s_j h_j(x)`` equals the Slater determinant at (c_1..c_{n-1}, x).
    """

    def __init__(self, c: np.ndarray, s: np.ndarray):
        self.c = np.asarray(c, dtype=float)
        self.s = np.asarray(s, dtype=float)

    def combination(self, basis: SlaterBasis, points) -> np.ndarray:
        """x -> sum_j s_j h_j(x)."""
        return np.tensordot(self.s, basis.evaluate(points), axes=1)


def slater_minors(basis: SlaterBasis, c: Sequence[float]) -> MinorVector:
    """Cofactors of the last column of det[h_i(c_1..c_{n-1}, x)]."""
    c = np.asarray(c, dtype=float)
    if len(c) != basis.n - 1:
        raise ValueError(f"Expected {basis.n - 1} points, got {len(c)}.")
    basis.check_interior(c)
    partial = basis.evaluate(c)
    s = last_column_cofactors(partial)
    if np.max(np.abs(s)) <= 1e-12 * max(1.0, float(np.max(np.abs(partial)))) ** (basis.n - 1):
        raise DegeneratePointsError(f"All Slater minors vanish at c={c}.")
    return MinorVector(c, s)


def _scan(basis: SlaterBasis, coefficients: np.ndarray, grid_size: int):
    grid = basis.scan_grid(grid_size)
    values = np.tensordot(coefficients, basis.evaluate(grid), axes=1)
    return grid, values


def _dips(values: np.ndarray) -> int:
    """Local minima of |f| below the dip tolerance without a sign change."""
    magnitude = np.abs(values)
    scale = np.max(magnitude)
    signs = np.sign(values)
    signs[magnitude < ZERO_TOLERANCE * scale] = 0
    inner = np.arange(1, len(values) - 1)
    minima = (
        (magnitude[inner] < magnitude[inner - 1])
        & (magnitude[inner] < magnitude[inner + 1])
        & (signs[inner - 1] == signs[inner + 1])
        & (signs[inner - 1] != 0)
        & (magnitude[inner] < DIP_TOLERANCE * scale)
    )
    return int(np.count_nonzero(minima))


class PropertyPVerdict(VerificationResult):
    """Zeros of x -> S_{s(c)}(x) against the points c."""

    def __init__(self, c, zero_locations, dips, pitch):
        self.c = np.asarray(c, dtype=float)
        self.zero_locations = np.asarray(zero_locations, dtype=float)
        self.dips = dips
        self.holds = (
            dips == 0
            and len(self.zero_locations) == len(self.c)
            and bool(np.all(np.abs(self.zero_locations - self.c) <= 2 * pitch))
        )


def property_p_check(basis: SlaterBasis, c: Sequence[float], grid_size: int = 4000):
    """Grid scan finds exactly the n-1 zeros c_1..c_{n-1}."""
    minors = slater_minors(basis, c)
    grid, values = _scan(basis, minors.s, grid_size)
    positions = sign_change_positions(grid, values)
    return PropertyPVerdict(minors.c, positions, _dips(values), grid[1] - grid[0])


class SlabVerdict(VerificationResult):
    """Signs of S_{s(c)} on the slabs (c_{j-1}, c_j)."""

    def __init__(self, c, global_sign, observed, expected):
        self.c = np.asarray(c, dtype=float)
        self.global_sign = global_sign
        self.observed = observed
        self.expected = expected
        self.holds = observed == expected


def sign_change_structure(basis: SlaterBasis, c: Sequence[float], grid_size: int = 4000):
    """Sign on slab j equals (-1)^(n-j) times the global simplex sign."""
    minors = slater_minors(basis, c)
    global_sign = int(np.sign(slater_eval(basis, basis.reference_point())))
    grid, values = _scan(basis, minors.s, grid_size)
    magnitude = np.abs(values)
    significant = magnitude >= ZERO_TOLERANCE * np.max(magnitude)
    edges = np.concatenate([[-np.inf], minors.c, [np.inf]])
    observed = []
    for j in range(1, basis.n + 1):
        inside = (grid > edges[j - 1]) & (grid < edges[j]) & significant
        signs = np.unique(np.sign(values[inside]))
        observed.append(int(signs[0]) if len(signs) == 1 else 0)
    expected = [(-1) ** (basis.n - j) * global_sign for j in range(1, basis.n + 1)]
    return SlabVerdict(minors.c, global_sign, observed, expected)


class CollinearityVerdict(VerificationResult):
    """Angle between b and s(c) where c are the zeros of S_b."""

    def __init__(self, b, zeros, dips, n, sin_angle=None):
        self.b = np.asarray(b, dtype=float)
        self.zeros = np.asarray(zeros, dtype=float)
        self.dips = dips
        self.zero_count = len(self.zeros) + 2 * dips
        self.sin_angle = sin_angle
        self.trivial = sin_angle is None
        if self.trivial:
            self.branch = "bound already satisfied"
            self.holds = self.zero_count <= n - 1
        else:
            self.branch = "collinear"
            self.holds = (
                sin_angle < COLLINEARITY_TOLERANCE and len(self.zeros) == n - 1 and dips == 0
            )


def collinearity_check(
    basis: SlaterBasis, b: Sequence[float], grid_size: int = 4096
) -> CollinearityVerdict:
    """S_b is proportional to the Slater determinant at its own zeros.

    Zeros are bracketed by sign changes on a grid and refined by Brent's
    method to 1e-12. If S_b changes sign fewer than n-1 times there is
    nothing to prove.

    Raises:
        SolverAccuracyError: s(c) is degenerate at the located zeros.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (basis.n,) or not np.any(b):
        raise ValueError("b must be a nonzero vector with one entry per basis function.")
    grid, values = _scan(basis, b, grid_size)

    def s_b(x):
        return float(np.tensordot(b, basis.evaluate(np.array([x])), axes=1)[0])

    signs = np.sign(values)
    signs[np.abs(values) < ZERO_TOLERANCE * np.max(np.abs(values))] = 0
    nonzero = np.flatnonzero(signs)
    zeros: List[float] = []
    for left, right in zip(nonzero[:-1], nonzero[1:]):
        if signs[left] != signs[right]:
            zeros.append(brentq(s_b, grid[left], grid[right], xtol=1e-12))
    dips = _dips(values)
    if len(zeros) < basis.n - 1:
        return CollinearityVerdict(b, zeros, dips, basis.n)
    try:
        minors = slater_minors(basis, zeros[: basis.n - 1])
    except (DegeneratePointsError, ValueError) as error:
        raise SolverAccuracyError(
            f"Slater minors degenerate at the zeros {zeros} of S_b."
        ) from error
    unit_s = minors.s / np.linalg.norm(minors.s)
    residual = b - (b @ unit_s) * unit_s
    sin_angle = float(np.linalg.norm(residual) / np.linalg.norm(b))
    return CollinearityVerdict(b, zeros, dips, basis.n, sin_angle)


class HermiteVerdict(VerificationResult):
    """Ratio of the Hermite Slater determinant to Vandermonde times Gaussian."""

    def __init__(self, n, ratios, expected_constant):
        self.n = n
        self.constant = float(np.median(ratios))
        self.expected_constant = expected_constant
        self.relative_spread = float(np.max(np.abs(ratios - self.constant)) / abs(self.constant))
        self.holds = self.relative_spread < 1e-8


def hermite_constant(n: int) -> float:
    """C_n with S_n = C_n prod_{i<j} (x_i - x_j) exp(-|x|^2 / 2)."""
    constant = (-1.0) ** (n * (n - 1) // 2)
    for k in range(n):
        constant *= 2.0**k / np.sqrt(2.0**k * math.factorial(k) * np.sqrt(np.pi))
    return constant


def hermite_closed_form_check(n: int, samples: int = 200, seed: int = 0) -> HermiteVerdict:
    """The Hermite Slater determinant is C_n times Vandermonde times Gaussian."""
    if not 2 <= n <= 5:
        raise ValueError(f"n must be in [2, 5], got {n}.")
    basis = SlaterBasis.hermite(n)
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < samples:
        candidate = rng.standard_normal(n)
        gaps = np.abs(np.subtract.outer(candidate, candidate))[np.triu_indices(n, 1)]
        if np.min(gaps) > 0.05 and candidate @ candidate < 16:
            points.append(candidate)
    points = np.array(points)
    gaussian = np.exp(-np.sum(points**2, axis=1) / 2)
    ratios = slater_values(basis, points) / (vandermonde_product(points) * gaussian)
    return HermiteVerdict(n, ratios, hermite_constant(n))
