# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""One dimensional Sturm-Liouville eigenproblems and Sturm's zero bounds."""

import csv
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import sparse
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.optimize import brentq

from extended_courant.exceptions import (
    CoefficientDomainError,
    DegeneratePointsError,
    IdenticallyZeroError,
    MultiplicityResolutionError,
    ResolutionError,
    SimplicityError,
    SpectrumInvariantError,
)
from extended_courant.utils.determinants import last_column_cofactors
from extended_courant.utils.log import Log
from extended_courant.utils.verification_result import VerificationResult

ZERO_TOLERANCE = 1e-7
DEGENERACY_TOLERANCE = 1e-8
PERIODICITY_TOLERANCE = 1e-10
MAX_ZERO_ORDER = 3
MIN_GRID_SIZE = 64
BOUNDARIES = ("dirichlet", "neumann", "periodic")


def _evaluate(func: Callable, points: np.ndarray) -> np.ndarray:
    """Evaluates a coefficient callable, broadcasting constants."""
    values = np.asarray(func(points), dtype=float)
    return np.array(np.broadcast_to(values, np.shape(points)), dtype=float)


def _polynomial(coefficients: str) -> Callable:
    coefs = [float(c) for c in coefficients.split(",") if c.strip()]
    if not coefs:
        raise ValueError(f"Empty polynomial coefficient string '{coefficients}'.")
    return lambda x: npoly.polyval(x, coefs)


class CoefficientTriple:
    """Coefficients of -(K u')' + Q u = lambda G u.

    Attr:
        stiffness (callable): K, positive on the closed domain.
        potential (callable): Q.
        weight (callable): G, positive on the closed domain.
    """

    def __init__(self, stiffness: Callable, potential: Callable, weight: Callable):
        self.stiffness = stiffness
        self.potential = potential
        self.weight = weight

    @classmethod
    def from_preset(cls, preset: str) -> "CoefficientTriple":
        """Builds coefficients from a named preset.

        Args:
            preset: ``sine`` (K=G=1, Q=0), ``mathieu:A`` (Q = A cos x) or
                ``custom:K;Q;G`` where each part is a comma separated list of
                polynomial coefficients in x, lowest degree first.
        """
        name, _, argument = preset.partition(":")
        name = name.strip().lower()
        if name == "sine":
            return cls(lambda x: 1.0, lambda x: 0.0, lambda x: 1.0)
        if name == "mathieu":
            amplitude = float(argument) if argument else 10.0
            return cls(lambda x: 1.0, lambda x: amplitude * np.cos(x), lambda x: 1.0)
        if name == "custom":
            parts = argument.split(";")
            if len(parts) != 3:
                raise ValueError(
                    "Custom preset needs three polynomials 'K;Q;G', "
                    f"got '{argument}'."
                )
            return cls(*(_polynomial(part) for part in parts))
        raise ValueError(f"Unknown coefficient preset '{preset}'.")


class SLProblem:
    """A Sturm-Liouville problem on an interval or on the circle of length 2 pi."""

    def __init__(
        self,
        coefficients: CoefficientTriple,
        boundary: str,
        geometry: Optional[str] = None,
        alpha: float = 0.0,
        beta: float = 1.0,
    ):
        """
        Args:
            coefficients: the triple K, Q, G.
            boundary: one of ``dirichlet``, ``neumann``, ``periodic``.
            geometry: ``interval`` or ``circle``; inferred from the boundary
                when omitted.
            alpha: left end of the interval (ignored on the circle).
            beta: right end of the interval (ignored on the circle).
        """
        boundary = boundary.lower()
        if boundary not in BOUNDARIES:
            raise ValueError(f"Boundary must be one of {BOUNDARIES}, got '{boundary}'.")
        if geometry is None:
            geometry = "circle" if boundary == "periodic" else "interval"
        if geometry not in ("interval", "circle"):
            raise ValueError(f"Unknown geometry '{geometry}'.")
        if (geometry == "circle") != (boundary == "periodic"):
            raise ValueError(
                "Periodic boundary conditions are used if and only if the "
                "geometry is the circle."
            )
        if geometry == "circle":
            alpha, beta = 0.0, 2 * np.pi
        if not alpha < beta:
            raise ValueError(f"Interval must satisfy alpha < beta, got [{alpha}, {beta}].")
        self.coefficients = coefficients
        self.boundary = boundary
        self.geometry = geometry
        self.alpha = float(alpha)
        self.beta = float(beta)
        if self.periodic:
            self._check_periodicity()

    @classmethod
    def from_preset(
        cls, preset: str, boundary: str, alpha: float = 0.0, beta: float = 1.0
    ) -> "SLProblem":
        """Problem with coefficients from :meth:`CoefficientTriple.from_preset`."""
        return cls(CoefficientTriple.from_preset(preset), boundary, alpha=alpha, beta=beta)

    @property
    def periodic(self) -> bool:
        """True on the circle."""
        return self.geometry == "circle"

    @property
    def length(self) -> float:
        """Length of the domain."""
        return self.beta - self.alpha

    def _check_periodicity(self):
        ends = np.array([self.alpha, self.beta])
        for name, func in (
            ("K", self.coefficients.stiffness),
            ("Q", self.coefficients.potential),
            ("G", self.coefficients.weight),
        ):
            left, right = _evaluate(func, ends)
            if abs(left - right) > PERIODICITY_TOLERANCE * max(1.0, abs(left), abs(right)):
                raise ValueError(f"Coefficient {name} is not 2 pi periodic.")

    def __repr__(self):
        return (
            f"SLProblem(geometry={self.geometry}, boundary={self.boundary}, "
            f"domain=[{self.alpha:g}, {self.beta:g}])"
        )


class Discretization(NamedTuple):
    """Finite difference discretization of an SLProblem."""

    grid: np.ndarray
    stiffness: sparse.csr_matrix
    mass: np.ndarray
    free: np.ndarray
    pitch: float


def discretize(problem: SLProblem, grid_size: int) -> Discretization:
    """Conservative second order finite differences.

    K is sampled at cell midpoints, Q and G at the nodes, and the mass is
    lumped with trapezoid weights. On an interval the grid has
    ``grid_size + 1`` nodes, on the circle ``grid_size`` nodes.
    """
    if grid_size < MIN_GRID_SIZE:
        raise ValueError(f"grid_size must be at least {MIN_GRID_SIZE}, got {grid_size}.")
    coefficients = problem.coefficients
    pitch = problem.length / grid_size
    if problem.periodic:
        grid = problem.alpha + pitch * np.arange(grid_size)
        midpoints = grid + pitch / 2
    else:
        grid = np.linspace(problem.alpha, problem.beta, grid_size + 1)
        midpoints = (grid[:-1] + grid[1:]) / 2

    k_mid = _evaluate(coefficients.stiffness, midpoints)
    k_nodes = _evaluate(coefficients.stiffness, grid)
    q_nodes = _evaluate(coefficients.potential, grid)
    g_nodes = _evaluate(coefficients.weight, grid)
    if np.any(k_mid <= 0) or np.any(k_nodes <= 0):
        raise CoefficientDomainError("Stiffness K must be positive on the domain.")
    if np.any(g_nodes <= 0):
        raise CoefficientDomainError("Weight G must be positive on the domain.")
    if not (np.all(np.isfinite(k_mid)) and np.all(np.isfinite(q_nodes))):
        raise CoefficientDomainError("Coefficients must be finite on the domain.")

    if problem.periodic:
        weights = np.full(grid_size, pitch)
        diagonal = (k_mid + np.roll(k_mid, 1)) / pitch + q_nodes * weights
        offdiagonal = -k_mid / pitch
        stiffness = sparse.diags(
            [diagonal, offdiagonal[:-1], offdiagonal[:-1]], [0, 1, -1], format="lil"
        )
        stiffness[0, grid_size - 1] = offdiagonal[-1]
        stiffness[grid_size - 1, 0] = offdiagonal[-1]
        free = np.arange(grid_size)
    else:
        weights = np.full(grid_size + 1, pitch)
        weights[[0, -1]] = pitch / 2
        diagonal = q_nodes * weights
        diagonal[:-1] += k_mid / pitch
        diagonal[1:] += k_mid / pitch
        offdiagonal = -k_mid / pitch
        stiffness = sparse.diags([diagonal, offdiagonal, offdiagonal], [0, 1, -1], format="lil")
        if problem.boundary == "dirichlet":
            free = np.arange(1, grid_size)
        else:
            free = np.arange(grid_size + 1)
    return Discretization(grid, stiffness.tocsr(), g_nodes * weights, free, pitch)


def _fd_derivative(values: np.ndarray, pitch: float, periodic: bool) -> np.ndarray:
    """Fourth order finite difference derivative along the last axis."""
    values = np.asarray(values, dtype=float)
    if periodic:
        return (
            -np.roll(values, -2, axis=-1)
            + 8 * np.roll(values, -1, axis=-1)
            - 8 * np.roll(values, 1, axis=-1)
            + np.roll(values, 2, axis=-1)
        ) / (12 * pitch)
    result = np.empty_like(values)
    result[..., 2:-2] = (
        -values[..., 4:] + 8 * values[..., 3:-1] - 8 * values[..., 1:-3] + values[..., :-4]
    ) / (12 * pitch)
    head = values[..., :5]
    tail = values[..., -5:][..., ::-1]
    one_sided_edge = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12 * pitch)
    one_sided_next = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12 * pitch)
    result[..., 0] = head @ one_sided_edge
    result[..., 1] = head @ one_sided_next
    result[..., -1] = -(tail @ one_sided_edge)
    result[..., -2] = -(tail @ one_sided_next)
    return result


class CombinationSpec:
    """Coefficients a_m..a_n of Y = sum a_j V_j (1-based indices)."""

    def __init__(self, m: int, n: int, coefficients: Sequence[float]):
        coefficients = np.asarray(coefficients, dtype=float)
        if m < 1 or n < m:
            raise ValueError(f"Indices must satisfy 1 <= m <= n, got m={m}, n={n}.")
        if len(coefficients) != n - m + 1:
            raise ValueError(
                f"Expected {n - m + 1} coefficients for indices {m}..{n}, "
                f"got {len(coefficients)}."
            )
        if coefficients[0] == 0 or coefficients[-1] == 0:
            raise ValueError("The extreme coefficients a_m and a_n must be nonzero.")
        self.m = m
        self.n = n
        self.coefficients = coefficients

    @classmethod
    def single(cls, index: int) -> "CombinationSpec":
        """The eigenfunction V_index alone."""
        return cls(index, index, [1.0])

    def __repr__(self):
        return f"CombinationSpec(m={self.m}, n={self.n}, a={np.round(self.coefficients, 6)})"


def random_combination(rng: np.random.Generator, n_max: int) -> CombinationSpec:
    """Random indices 1 <= m <= n <= n_max and uniform coefficients in [-1, 1]."""
    m = int(rng.integers(1, n_max + 1))
    n = int(rng.integers(m, n_max + 1))
    while True:
        coefficients = rng.uniform(-1.0, 1.0, n - m + 1)
        if coefficients[0] * coefficients[-1] != 0:
            return CombinationSpec(m, n, coefficients)


class SLSpectrum:
    """The lowest eigenpairs of an SLProblem tabulated on the grid."""

    def __init__(
        self,
        problem: SLProblem,
        discretization: Discretization,
        eigenvalues: np.ndarray,
        eigenfunctions: np.ndarray,
    ):
        self.problem = problem
        self.discretization = discretization
        self.grid = discretization.grid
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.eigenfunctions = np.asarray(eigenfunctions, dtype=float)
        self._derivatives: Dict[int, np.ndarray] = {0: self.eigenfunctions}
        self._splines: Dict[int, CubicSpline] = {}
        self._validate()

    @property
    def count(self) -> int:
        """Number of eigenpairs."""
        return len(self.eigenvalues)

    @property
    def pitch(self) -> float:
        """Grid pitch h."""
        return self.discretization.pitch

    @property
    def quadrature_weights(self) -> np.ndarray:
        """Weights w_i G(x_i) of the discrete L2(G dx) inner product."""
        return self.discretization.mass

    def _validate(self):
        if np.any(np.diff(self.eigenvalues) < 0):
            raise SpectrumInvariantError("Eigenvalues are not sorted.")
        gaps = np.diff(self.eigenvalues)
        scales = DEGENERACY_TOLERANCE * np.maximum(1.0, np.abs(self.eigenvalues[1:]))
        if self.problem.periodic:
            # lambda_1 < lambda_2 <= lambda_3 < lambda_4 <= lambda_5 < ...
            strict = gaps[0::2] <= scales[0::2]
            if np.any(strict):
                index = 2 * int(np.flatnonzero(strict)[0]) + 1
                raise SpectrumInvariantError(
                    f"Circle eigenvalues {index} and {index + 1} coincide; "
                    "multiplicity exceeds 2."
                )
        elif np.any(gaps <= scales):
            index = int(np.flatnonzero(gaps <= scales)[0]) + 1
            raise SimplicityError(
                f"Interval eigenvalues {index} and {index + 1} are not simple: "
                f"{self.eigenvalues[index - 1]!r}, {self.eigenvalues[index]!r}."
            )
        verdict = oscillation_check(self)
        if not verdict.passed:
            raise SpectrumInvariantError(
                f"Oscillation invariant violated: observed {verdict.observed}, "
                f"expected {verdict.expected}."
            )

    def derivative_table(self, order: int) -> np.ndarray:
        """Tabulated order-th derivatives of all eigenfunctions."""
        if order not in self._derivatives:
            previous = self.derivative_table(order - 1)
            self._derivatives[order] = _fd_derivative(
                previous, self.pitch, self.problem.periodic
            )
        return self._derivatives[order]

    def combination_tables(
        self, combo: CombinationSpec, factors: Optional[np.ndarray] = None
    ) -> Tuple[np.ndarray, List[np.ndarray]]:
        """Values and first three derivatives of sum a_j f_j V_j."""
        if combo.n > self.count:
            raise ValueError(
                f"Combination uses index {combo.n} but only {self.count} eigenpairs exist."
            )
        weights = np.array(combo.coefficients)
        if factors is not None:
            weights = weights * np.asarray(factors, dtype=float)
        rows = slice(combo.m - 1, combo.n)
        tables = [weights @ self.derivative_table(order)[rows] for order in range(4)]
        return tables[0], tables[1:]

    def combination(self, combo: CombinationSpec) -> np.ndarray:
        """Tabulated Y = sum a_j V_j."""
        return self.combination_tables(combo)[0]

    def evaluate(self, index: int, points) -> np.ndarray:
        """Cubic spline evaluation of V_index (1-based) at arbitrary points."""
        if index not in self._splines:
            values = self.eigenfunctions[index - 1]
            grid = self.grid
            bc_type = "not-a-knot"
            if self.problem.periodic:
                grid = np.append(grid, self.problem.beta)
                values = np.append(values, values[0])
                bc_type = "periodic"
            self._splines[index] = CubicSpline(grid, values, bc_type=bc_type)
        points = np.asarray(points, dtype=float)
        if self.problem.periodic:
            points = self.problem.alpha + np.mod(points - self.problem.alpha, self.problem.length)
        return self._splines[index](points)

    def to_csv(self, path: str):
        """Writes columns index, eigenvalue, sign_changes."""
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["index", "eigenvalue", "sign_changes"])
            for j in range(self.count):
                writer.writerow(
                    [
                        j + 1,
                        repr(float(self.eigenvalues[j])),
                        count_sign_changes(self.eigenfunctions[j], self.problem.periodic),
                    ]
                )

    def __repr__(self):
        return (
            f"SLSpectrum({self.problem!r}, nodes={len(self.grid)}, "
            f"eigenvalues={np.round(self.eigenvalues, 6)})"
        )


def solve_sl(problem: SLProblem, grid_size: int, count: int) -> SLSpectrum:
    """Computes the ``count`` lowest eigenpairs of ``problem``.

    Args:
        problem: the Sturm-Liouville problem.
        grid_size: number of grid cells, at least 64.
        count: number of eigenpairs, at most ``grid_size / 8``.

    Returns:
        SLSpectrum with L2(G dx) normalized eigenfunctions whose first sample
        above the zero tolerance is positive.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}.")
    if grid_size < MIN_GRID_SIZE:
        raise ValueError(f"grid_size must be at least {MIN_GRID_SIZE}, got {grid_size}.")
    if count > grid_size // 8:
        raise ResolutionError(
            f"{count} eigenpairs cannot be resolved on {grid_size} cells; "
            f"at most {grid_size // 8} are allowed."
        )
    discretization = discretize(problem, grid_size)
    free = discretization.free
    stiffness = discretization.stiffness[free][:, free]
    scale = 1.0 / np.sqrt(discretization.mass[free])

    if problem.periodic:
        symmetric = stiffness.toarray() * scale[:, None] * scale[None, :]
        eigenvalues, vectors = eigh(symmetric, subset_by_index=[0, count - 1])
    else:
        diagonal = stiffness.diagonal() * scale**2
        offdiagonal = stiffness.diagonal(1) * scale[:-1] * scale[1:]
        eigenvalues, vectors = eigh_tridiagonal(
            diagonal, offdiagonal, select="i", select_range=(0, count - 1)
        )

    eigenfunctions = np.zeros((count, len(discretization.grid)))
    eigenfunctions[:, free] = (vectors * scale[:, None]).T
    for row in eigenfunctions:
        significant = np.flatnonzero(np.abs(row) > ZERO_TOLERANCE * np.max(np.abs(row)))
        if row[significant[0]] < 0:
            row *= -1
    Log.log(
        f"Solved {problem!r} on {grid_size} cells:",
        np.array2string(eigenvalues, precision=6),
    )
    return SLSpectrum(problem, discretization, eigenvalues, eigenfunctions)


def convergence_ratios(problem: SLProblem, grid_size: int, count: int) -> np.ndarray:
    """Ratios (l(N) - l(2N)) / (l(2N) - l(4N)) per eigenvalue; about 4 for O(h^2)."""
    values = [
        solve_sl(problem, grid_size * factor, count).eigenvalues for factor in (1, 2, 4)
    ]
    numerator = values[0] - values[1]
    denominator = values[1] - values[2]
    with np.errstate(divide="ignore", invalid="ignore"):
        return numerator / denominator


def _field_scale(values: np.ndarray) -> float:
    scale = float(np.max(np.abs(values))) if len(values) else 0.0
    if not np.isfinite(scale) or scale == 0.0:
        raise IdenticallyZeroError("Field vanishes at every sample.")
    return scale


def _snap(values: np.ndarray, tolerance: float) -> np.ndarray:
    signs = np.sign(values)
    signs[np.abs(values) < tolerance * _field_scale(values)] = 0
    return signs


def count_sign_changes(
    field: np.ndarray, periodic: bool = False, tolerance: float = ZERO_TOLERANCE
) -> int:
    """Number of sign changes of a tabulated function.

    Samples with ``|value| < tolerance * max|value|`` are snapped to zero and
    zero runs are skipped. On the circle the count wraps around and is even.
    """
    values = np.asarray(field, dtype=float)
    if len(values) < MIN_GRID_SIZE:
        raise ValueError(f"Field must be tabulated on at least {MIN_GRID_SIZE} points.")
    signs = _snap(values, tolerance)
    signs = signs[signs != 0]
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    if periodic and signs[-1] != signs[0]:
        changes += 1
    return changes


def sign_change_positions(
    grid: np.ndarray, field: np.ndarray, periodic: bool = False, tolerance: float = ZERO_TOLERANCE
) -> np.ndarray:
    """Midpoints of the brackets where the snapped sign changes."""
    grid = np.asarray(grid, dtype=float)
    signs = _snap(np.asarray(field, dtype=float), tolerance)
    nonzero = np.flatnonzero(signs)
    left, right = nonzero[:-1], nonzero[1:]
    flips = signs[left] != signs[right]
    positions = list((grid[left[flips]] + grid[right[flips]]) / 2)
    if periodic and signs[nonzero[-1]] != signs[nonzero[0]]:
        period = len(grid) * (grid[1] - grid[0])
        positions.append((grid[nonzero[-1]] + grid[nonzero[0]] + period) / 2)
    return np.sort(np.asarray(positions))


class ZeroReport(VerificationResult):
    """Zeros of a tabulated combination with their estimated orders."""

    def __init__(self, zero_locations: List[Tuple[float, int]]):
        self.zero_locations = zero_locations
        self.zeros_with_multiplicity = int(sum(order for _, order in zero_locations))
        self.sign_changes = int(sum(order % 2 for _, order in zero_locations))


def _scalar(spline: CubicSpline) -> Callable[[float], float]:
    return lambda t: float(spline(t))


def _touch_location(spline: CubicSpline, grid, values, left: int, right: int) -> float:
    slope = spline.derivative()
    start, stop = grid[left], grid[right]
    if slope(start) * slope(stop) < 0:
        return brentq(_scalar(slope), start, stop, xtol=1e-13)
    run = np.arange(left + 1, right)
    return float(grid[run[np.argmin(np.abs(values[run]))]])


def _hidden_zeros(spline: CubicSpline, grid, index: int, threshold: float) -> List[float]:
    """Zeros between samples of one sign near a local minimum of |Y|."""
    slope = spline.derivative()
    start, stop = grid[index - 1], grid[index + 1]
    if slope(start) * slope(stop) >= 0:
        return []
    turning = brentq(_scalar(slope), start, stop, xtol=1e-13)
    value = float(spline(turning))
    if abs(value) < threshold:
        return [turning]
    if np.sign(value) != np.sign(spline(grid[index])):
        return [
            brentq(_scalar(spline), start, turning, xtol=1e-13),
            brentq(_scalar(spline), turning, stop, xtol=1e-13),
        ]
    return []


def count_zeros_with_multiplicity(
    grid: np.ndarray,
    field: np.ndarray,
    derivative_fields: Sequence[np.ndarray],
    periodic: bool = False,
    tolerance: float = ZERO_TOLERANCE,
) -> ZeroReport:
    """Locates the interior zeros of a tabulated function and their orders.

    The order of a zero is the smallest k with ``|d^k field|`` above
    ``tolerance * max|d^k field|`` there. A maximal zero run counts as one
    location. Zeros at interval endpoints are not interior and are skipped.

    Args:
        grid: sample points (on the circle without the closing point).
        field: tabulated values.
        derivative_fields: tabulated first, second and third derivatives.
        periodic: wrap around on the circle.
        tolerance: relative zero tolerance.

    Returns:
        ZeroReport.

    Raises:
        MultiplicityResolutionError: a zero has order above 3.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(field, dtype=float)
    derivatives = [np.asarray(d, dtype=float) for d in derivative_fields]
    if len(derivatives) < MAX_ZERO_ORDER:
        raise ValueError("Derivative fields up to order 3 are required.")
    derivatives = derivatives[:MAX_ZERO_ORDER]
    threshold = tolerance * _field_scale(values)

    bc_type = "not-a-knot"
    period = None
    if periodic:
        pitch = grid[1] - grid[0]
        period = len(grid) * pitch
        shift = int(np.argmax(np.abs(values)))
        values = np.append(np.roll(values, -shift), values[shift])
        derivatives = [np.append(np.roll(d, -shift), d[shift]) for d in derivatives]
        grid = grid[shift] + pitch * np.arange(len(values))
        bc_type = "periodic"

    spline = CubicSpline(grid, values, bc_type=bc_type)
    derivative_splines = [CubicSpline(grid, d, bc_type=bc_type) for d in derivatives]
    derivative_scales = [max(float(np.max(np.abs(d))), 1e-300) for d in derivatives]

    signs = np.sign(values)
    signs[np.abs(values) < threshold] = 0
    nonzero = np.flatnonzero(signs)
    locations = []
    for left, right in zip(nonzero[:-1], nonzero[1:]):
        if signs[left] != signs[right]:
            locations.append(brentq(_scalar(spline), grid[left], grid[right], xtol=1e-13))
        elif right > left + 1:
            locations.append(_touch_location(spline, grid, values, left, right))

    magnitude = np.abs(values)
    inner = np.arange(1, len(values) - 1)
    minima = inner[
        (signs[inner] != 0)
        & (signs[inner - 1] == signs[inner])
        & (signs[inner + 1] == signs[inner])
        & (magnitude[inner] <= magnitude[inner - 1])
        & (magnitude[inner] < magnitude[inner + 1])
    ]
    for index in minima:
        locations.extend(_hidden_zeros(spline, grid, index, threshold))

    zero_locations = []
    for location in sorted(locations):
        order = None
        for k, (derivative, scale) in enumerate(
            zip(derivative_splines, derivative_scales), start=1
        ):
            if abs(float(derivative(location))) > tolerance * scale:
                order = k
                break
        if order is None:
            raise MultiplicityResolutionError(location, MAX_ZERO_ORDER)
        if period is not None:
            location = grid[0] - shift * pitch + np.mod(location - grid[0] + shift * pitch, period)
        zero_locations.append((float(location), order))
    zero_locations.sort()
    return ZeroReport(zero_locations)


def zero_report(
    spectrum: SLSpectrum, combo: CombinationSpec, factors: Optional[np.ndarray] = None
) -> ZeroReport:
    """ZeroReport of the (optionally reweighted) combination."""
    values, derivatives = spectrum.combination_tables(combo, factors)
    return count_zeros_with_multiplicity(
        spectrum.grid, values, derivatives, periodic=spectrum.problem.periodic
    )


class SturmVerdict(VerificationResult):
    """Zero and sign change bounds for one combination."""

    def __init__(self, combo: CombinationSpec, report: ZeroReport, periodic: bool):
        self.combo = repr(combo)
        self.zeros = report.zeros_with_multiplicity
        self.sign_changes = report.sign_changes
        if periodic:
            self.zero_bound = 2 * (combo.n // 2)
            self.sign_change_bound = 2 * (combo.m // 2)
        else:
            self.zero_bound = combo.n - 1
            self.sign_change_bound = combo.m - 1
        self.zero_bound_holds = self.zeros <= self.zero_bound
        self.sign_change_bound_holds = self.sign_changes >= self.sign_change_bound

    @property
    def passed(self) -> bool:
        """Both bounds hold."""
        return self.zero_bound_holds and self.sign_change_bound_holds


def sturm_bounds_check(spectrum: SLSpectrum, combo: CombinationSpec) -> SturmVerdict:
    """Checks Z <= n-1 and S >= m-1 (interval) or their circle analogues."""
    return SturmVerdict(combo, zero_report(spectrum, combo), spectrum.problem.periodic)


class SturmSuiteResult(VerificationResult):
    """Outcome of a batch of random combinations."""

    def __init__(self, label: str, verdicts: List[SturmVerdict]):
        self.label = label
        self.samples = len(verdicts)
        self.failures = [v.to_dict() for v in verdicts if not v.passed]
        self.max_zero_excess = max((v.zeros - v.zero_bound for v in verdicts), default=0)

    @property
    def passed(self) -> bool:
        """No failures."""
        return not self.failures


def sturm_suite(
    spectrum: SLSpectrum, samples: int, seed: int = 0, label: str = ""
) -> SturmSuiteResult:
    """Runs sturm_bounds_check on random combinations of the available indices."""
    rng = np.random.default_rng(seed)
    verdicts = [
        sturm_bounds_check(spectrum, random_combination(rng, spectrum.count))
        for _ in range(samples)
    ]
    result = SturmSuiteResult(label or repr(spectrum.problem), verdicts)
    Log.log(f"Sturm suite {result.label}: {len(result.failures)} failures of {samples}")
    return result


class OscillationVerdict(VerificationResult):
    """Sign changes of each eigenfunction against the oscillation theorem."""

    def __init__(self, observed: List[int], expected: List[int]):
        self.observed = observed
        self.expected = expected

    @property
    def passed(self) -> bool:
        """Observed counts equal the expected ones."""
        return self.observed == self.expected


def oscillation_check(spectrum: SLSpectrum) -> OscillationVerdict:
    """V_j has j-1 sign changes on an interval, 2 floor(j/2) on the circle."""
    periodic = spectrum.problem.periodic
    observed = [count_sign_changes(row, periodic) for row in spectrum.eigenfunctions]
    if periodic:
        expected = [2 * (j // 2) for j in range(1, spectrum.count + 1)]
    else:
        expected = list(range(spectrum.count))
    return OscillationVerdict(observed, expected)


def y_ell_factors(spectrum: SLSpectrum, combo: CombinationSpec, ell: int) -> np.ndarray:
    """(-lambda_j)^ell on an interval, (lambda_1 - lambda_j)^ell on the circle."""
    if ell < 0:
        raise ValueError(f"ell must be nonnegative, got {ell}.")
    eigenvalues = spectrum.eigenvalues[combo.m - 1 : combo.n]
    if spectrum.problem.periodic:
        return (spectrum.eigenvalues[0] - eigenvalues) ** ell
    return (-eigenvalues) ** ell


def y_ell(spectrum: SLSpectrum, combo: CombinationSpec, ell: int) -> np.ndarray:
    """Tabulated Y_ell; Y_0 is the combination itself."""
    return spectrum.combination_tables(combo, y_ell_factors(spectrum, combo, ell))[0]


def y_ell_zero_report(spectrum: SLSpectrum, combo: CombinationSpec, ell: int) -> ZeroReport:
    """ZeroReport of Y_ell."""
    return zero_report(spectrum, combo, y_ell_factors(spectrum, combo, ell))


def y_ell_recurrence_residual(spectrum: SLSpectrum, combo: CombinationSpec, ell: int) -> float:
    """Relative interior residual of G Y_{ell+1} = (K Y_ell')' - Q Y_ell.

    Uses the same conservative difference quotient as the discretization,
    so the residual is at rounding level on an interval.
    """
    if spectrum.problem.periodic:
        raise ValueError("The three-term relation is stated for interval problems.")
    coefficients = spectrum.problem.coefficients
    grid = spectrum.grid
    pitch = spectrum.pitch
    current = y_ell(spectrum, combo, ell)
    following = y_ell(spectrum, combo, ell + 1)
    k_mid = _evaluate(coefficients.stiffness, (grid[:-1] + grid[1:]) / 2)
    flux = k_mid * np.diff(current) / pitch
    divergence = np.diff(flux) / pitch
    inner = slice(1, -1)
    lhs = _evaluate(coefficients.weight, grid[inner]) * following[inner]
    rhs = divergence - _evaluate(coefficients.potential, grid[inner]) * current[inner]
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(lhs)), 1e-300))


class LiouvilleDeterminant(VerificationResult):
    """U(x) = det[V_i(z_1), ..., V_i(z_k), V_i(x)], i = 1..k+1."""

    def __init__(self, z_points, cofactors, values, positions, pitch):
        self.z_points = np.asarray(z_points, dtype=float)
        self.cofactors = cofactors
        self.values = values
        self.sign_change_positions = positions
        tolerance = 2 * pitch
        self.zeros_at_nodes = len(positions) == len(self.z_points) and all(
            abs(p - z) <= tolerance for p, z in zip(positions, self.z_points)
        )


def liouville_determinant(spectrum: SLSpectrum, z_points: Sequence[float]) -> LiouvilleDeterminant:
    """Tabulates Liouville's determinant on the spectrum grid.

    Args:
        spectrum: an SLSpectrum with at least k+1 eigenpairs.
        z_points: k strictly increasing interior points.

    Raises:
        DegeneratePointsError: all cofactors vanish to tolerance.
    """
    z_points = np.asarray(z_points, dtype=float)
    k = len(z_points)
    if k + 1 > spectrum.count:
        raise ValueError(f"Need {k + 1} eigenfunctions, spectrum has {spectrum.count}.")
    if k and (
        np.any(np.diff(z_points) <= 0)
        or z_points[0] <= spectrum.problem.alpha
        or z_points[-1] >= spectrum.problem.beta
    ):
        raise ValueError("z_points must be strictly increasing interior points.")
    partial = np.array([spectrum.evaluate(i, z_points) for i in range(1, k + 2)]).reshape(
        k + 1, k
    )
    cofactors = last_column_cofactors(partial)
    scale = max(1.0, float(np.max(np.abs(partial), initial=0.0))) ** k
    if np.max(np.abs(cofactors)) <= 1e-12 * scale:
        raise DegeneratePointsError(f"Liouville determinant vanishes for z={z_points}.")
    values = cofactors @ spectrum.eigenfunctions[: k + 1]
    positions = sign_change_positions(spectrum.grid, values, spectrum.problem.periodic)
    return LiouvilleDeterminant(z_points, cofactors, values, positions, spectrum.pitch)
