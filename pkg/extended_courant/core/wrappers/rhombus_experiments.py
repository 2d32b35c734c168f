# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Counterexamples to the extended Courant property on the equilateral rhombus."""

from typing import Dict, List, Optional, Sequence

import numpy as np

from extended_courant.core.courant import (
    VIOLATION,
    ECPReport,
    ProductLiftReport,
    SweepResult,
    circle_spectrum,
    coefficient_sweep,
    default_t_values,
    ecp_check,
    lifted_spectrum,
    product_lift,
    search_max_count,
)
from extended_courant.core.finite_elements import EigenResult, solve_mixed_problem
from extended_courant.core.geometry import EQUILATERAL, RHOMBUS, SQRT3
from extended_courant.core.mixed_inequalities import Comparison, InequalityVerdict
from extended_courant.core.nodal_domains import (
    NodalPartition,
    SampledField,
    count_nodal_domains,
)
from extended_courant.core.sturm_liouville import sign_change_positions
from extended_courant.core.triangle_spectra import (
    CLOSED_FORM_PROBLEMS,
    LAMBDA_UNIT,
    MixedProblemId,
    RhombusFunction,
    RhombusSpectrum,
    enumerate_mixed_spectrum,
    laplacian_residual,
    neumann_boundary_residual,
    phi2_neumann,
    reflect_extend,
    rhombus_spectrum_assemble,
)
from extended_courant.exceptions import ResolutionError
from extended_courant.utils.clustering import cluster_labels, first_positions
from extended_courant.utils.log import Log
from extended_courant.utils.verification_result import VerificationResult

FEM_EQUALITY_TOLERANCE = 1e-3
SEGMENT_SAMPLES = 200
SEGMENT_TOLERANCE = 1e-9
PROBE_LINES = 16
PROBE_SAMPLES = 4001
PROBE_DISTANCE = 1e-3
# probes closer than this to the center height cross both nodal lines at once
PROBE_CENTER_GAP = 0.05
SWEEP_TARGET = 6
CONTROL_BOUND = 4
FIBER_COUNT = 64

# closed form segments of the zero set of 1 + phi2 on the rhombus
NODAL_SEGMENTS = {
    "x = 3/4": (np.array([0.75, 0.0]), np.array([0.75, SQRT3 / 2])),
    "x + sqrt(3) y = 3/2": (np.array([0.375, 3 * SQRT3 / 8]), np.array([1.125, SQRT3 / 8])),
}


def rhombus_columns(outer: str, level: int, count: int, seed: int = 0) -> Dict[str, object]:
    """The four hemiequilateral columns feeding the rhombus with outer letter ``outer``.

    Closed form spectra are used where they exist, extrapolated finite
    elements elsewhere.
    """
    if outer not in ("n", "d"):
        raise ValueError(f"Outer letter must be 'n' or 'd', got '{outer}'.")
    columns: Dict[str, object] = {}
    for legs in ("nn", "nd", "dn", "dd"):
        problem = MixedProblemId("Th", outer + legs)
        if problem in CLOSED_FORM_PROBLEMS:
            columns[problem.label] = enumerate_mixed_spectrum(problem)
        else:
            columns[problem.label] = solve_mixed_problem(problem, level, count, seed)
    return columns


def assembled_spectrum(
    outer: str, level: int, count: int, seed: int = 0, tolerance: float = 1e-4
) -> RhombusSpectrum:
    """Rhombus spectrum merged from its four symmetry classes."""
    return rhombus_spectrum_assemble(rhombus_columns(outer, level, count, seed), tolerance)


def _link(spectrum: RhombusSpectrum, left: int, right: int, relation: str) -> Comparison:
    first, second = spectrum[left], spectrum[right]
    return Comparison(
        f"mu_{left}", f"mu_{right}", relation, first.value, second.value, first.error + second.error
    )


def neumann_ordering(spectrum: RhombusSpectrum) -> InequalityVerdict:
    """0 = nu_1 < nu_2 < nu_3 = nu_4 < nu_5."""
    if spectrum.outer != "n" or len(spectrum) < 5:
        raise ValueError(f"Need at least five Neumann eigenvalues, got {spectrum}.")
    comparisons = [
        Comparison("0", "mu_1", "=", 0.0, spectrum[1].value, spectrum[1].error),
        _link(spectrum, 1, 2, "<"),
        _link(spectrum, 2, 3, "<"),
        _link(spectrum, 3, 4, "="),
        _link(spectrum, 4, 5, "<"),
    ]
    return InequalityVerdict(comparisons)


def dirichlet_ordering(spectrum: RhombusSpectrum) -> InequalityVerdict:
    """delta_4 < delta_5 = delta_6 < delta_7."""
    if spectrum.outer != "d" or len(spectrum) < 7:
        raise ValueError(f"Need at least seven Dirichlet eigenvalues, got {spectrum}.")
    comparisons = [
        _link(spectrum, 4, 5, "<"),
        _link(spectrum, 5, 6, "="),
        _link(spectrum, 6, 7, "<"),
    ]
    return InequalityVerdict(comparisons)


def counterexample_function() -> RhombusFunction:
    """1 + the even extension of phi2 across the short diagonal."""
    extension = reflect_extend(phi2_neumann, 1)
    return RhombusFunction(lambda x, y: 1.0 + extension(x, y), continuous=True)


def _segment_residual(func: RhombusFunction, start: np.ndarray, end: np.ndarray) -> float:
    s = np.linspace(0.0, 1.0, SEGMENT_SAMPLES)[:, None]
    points = start + s * (end - start)
    return float(np.max(np.abs(func(points[:, 0], points[:, 1]))))


def _line_distance(x, y) -> np.ndarray:
    return np.minimum(np.abs(x - 0.75), np.abs(x + SQRT3 * y - 1.5) / 2)


def transversal_probe(func: RhombusFunction, lines: int = PROBE_LINES) -> List[float]:
    """Distance of each sign change on horizontal chords to the nearest closed form nodal line."""
    offsets = []
    for y in np.linspace(0.0, SQRT3 / 2, lines + 2)[1:-1]:
        if abs(y - SQRT3 / 4) < PROBE_CENTER_GAP:
            continue
        # chord between the slanted sides x = y / sqrt(3) and x = 1 + y / sqrt(3)
        x = np.linspace(y / SQRT3, 1 + y / SQRT3, PROBE_SAMPLES)[1:-1]
        positions = sign_change_positions(x, func(x, np.full_like(x, y)))
        offsets.extend(float(d) for d in _line_distance(positions, np.full_like(positions, y)))
    return offsets


class CounterexampleReport(VerificationResult):
    """ECP check of 1 + phi2 on the Neumann rhombus with its closed form nodal lines."""

    def __init__(
        self,
        report: ECPReport,
        segment_residuals: Dict[str, float],
        probe_offsets: List[float],
        eigen_residual: float,
        boundary_residual: float,
    ):
        self.report = report
        self.segment_residuals = segment_residuals
        self.probe_crossings = len(probe_offsets)
        self.max_probe_offset = max(probe_offsets, default=0.0)
        self.eigen_residual = eigen_residual
        self.boundary_residual = boundary_residual

    @property
    def segments_vanish(self) -> bool:
        """1 + phi2 vanishes on both closed form segments."""
        return all(r < SEGMENT_TOLERANCE for r in self.segment_residuals.values())

    @property
    def probe_clean(self) -> bool:
        """Every probed sign change lies on one of the two lines."""
        return self.probe_crossings > 0 and self.max_probe_offset < PROBE_DISTANCE

    @property
    def confirmed(self) -> bool:
        """Four nodal domains against kappa = 3 with the nodal lines where expected."""
        return (
            self.report.verdict == VIOLATION
            and self.report.beta0 == 4
            and self.report.kappa == 3
            and self.segments_vanish
            and self.probe_clean
        )


def counterexample_rhombus_neumann(
    spectrum: RhombusSpectrum, grid: int = 801, tolerance: float = 1e-4
) -> CounterexampleReport:
    """beta0(1 + phi2) = 4 > kappa(nu_3) = 3 on the Neumann rhombus.

    Args:
        spectrum: assembled Neumann rhombus spectrum.
        grid: points along the longest side of the counting grid.
        tolerance: clustering tolerance for kappa.

    Returns:
        CounterexampleReport.
    """
    func = counterexample_function()
    field = SampledField.from_function(RHOMBUS, func, grid)
    report = ecp_check(
        field, [LAMBDA_UNIT], spectrum.values(), tolerance, description="1 + phi2 on the rhombus"
    )
    residuals = {
        name: _segment_residual(func, start, end) for name, (start, end) in NODAL_SEGMENTS.items()
    }
    interior = EQUILATERAL.sample(200, np.random.default_rng(0), margin=0.05)
    result = CounterexampleReport(
        report,
        residuals,
        transversal_probe(func),
        laplacian_residual(phi2_neumann, LAMBDA_UNIT, interior),
        neumann_boundary_residual(),
    )
    Log.log(f"Neumann counterexample: {report.verdict}, segments {residuals}")
    return result


def fem_field(result: EigenResult, index: int, grid: int) -> SampledField:
    """Eigenvector ``index`` (1-based) sampled on the rhombus grid."""
    mesh = result.mesh
    return SampledField.from_fem(
        RHOMBUS, mesh.vertices, mesh.cells, result.vectors[:, index - 1], grid
    )


def fem_kappas(result: EigenResult, tolerance: float = FEM_EQUALITY_TOLERANCE) -> List[int]:
    """Courant index per position of a finite element spectrum."""
    return first_positions(result.best_values(), tolerance)


class SweepExperiment(VerificationResult):
    """Best coefficient sweep of a pair of eigenspaces."""

    def __init__(
        self,
        description: str,
        kappa: int,
        sweep: SweepResult,
        candidate: str,
        partition: Optional[NodalPartition] = None,
    ):
        self.description = description
        self.kappa = kappa
        self.candidate = candidate
        self.max_count = sweep.max_count
        self.argmax_t = sweep.argmax_t
        self.visited = len(sweep.t_values)
        self.unresolved = len(sweep.unresolved)
        self.change_intervals = sweep.change_intervals
        self._partition = partition

    @property
    def violation(self) -> bool:
        """Some resolved member has more nodal domains than kappa."""
        return self.max_count > self.kappa

    def nodal_partition(self) -> Optional[NodalPartition]:
        """Partition of the best member."""
        return self._partition


def _best_partition(u: SampledField, v: SampledField, t: Optional[float]):
    if t is None:
        return None
    try:
        return count_nodal_domains(SampledField.combine([u, v], [1.0, t]))
    except ResolutionError:
        return None


def eigenspace_sweep(
    u: SampledField,
    candidates: Dict[str, SampledField],
    kappa: int,
    description: str,
    t_values: Sequence[float],
    refinements: int = 3,
    target: int = SWEEP_TARGET,
) -> SweepExperiment:
    """Searches u + t v over candidates v until ``target`` nodal domains are found."""
    best = None
    for name, v in candidates.items():
        sweep = search_max_count(u, v, target, t_values, refinements)
        if best is None or sweep.max_count > best[1].max_count:
            best = (name, sweep, v)
        if sweep.max_count >= target:
            break
    name, sweep, v = best
    return SweepExperiment(
        description, kappa, sweep, name, _best_partition(u, v, sweep.argmax_t)
    )


def neumann_sweep(
    result: EigenResult,
    grid: int = 801,
    t_values: Optional[Sequence[float]] = None,
    refinements: int = 3,
) -> SweepExperiment:
    """Sweeps E(nu_2) + t E(nu_5), both in the class (+,-)."""
    kappas = fem_kappas(result)
    u = fem_field(result, 2, grid)
    v = fem_field(result, 5, grid)
    return eigenspace_sweep(
        u,
        {"nu_5": v},
        kappas[4],
        "E(nu_2) + t E(nu_5) on the Neumann rhombus",
        default_t_values() if t_values is None else t_values,
        refinements,
    )


def cluster_members(result: EigenResult, index: int) -> List[int]:
    """1-based positions sharing the finite element cluster of ``index``."""
    labels = cluster_labels(result.best_values(), FEM_EQUALITY_TOLERANCE)
    return [int(i) + 1 for i in np.flatnonzero(labels == labels[index - 1])]


def dirichlet_candidates(result: EigenResult, index: int, grid: int) -> Dict[str, SampledField]:
    """Members of the eigenspace of ``index``: labelled vectors, then their diagonal sums."""
    members = cluster_members(result, index)
    fields = {f"delta_{m}": fem_field(result, m, grid) for m in members}
    for first, second in zip(members, members[1:]):
        for sign in (1, -1):
            fields[f"(delta_{first} {'+' if sign > 0 else '-'} delta_{second})/sqrt2"] = (
                SampledField.combine(
                    [fields[f"delta_{first}"], fields[f"delta_{second}"]],
                    [1 / np.sqrt(2), sign / np.sqrt(2)],
                )
            )
    return fields


def dirichlet_sweep(
    result: EigenResult,
    grid: int = 801,
    t_values: Optional[Sequence[float]] = None,
    refinements: int = 3,
) -> SweepExperiment:
    """Sweeps E(delta_2) + t E(delta_5) where E(delta_5) is two dimensional."""
    kappas = fem_kappas(result)
    return eigenspace_sweep(
        fem_field(result, 2, grid),
        dirichlet_candidates(result, 5, grid),
        kappas[4],
        "E(delta_2) + t E(delta_5) on the Dirichlet rhombus",
        default_t_values() if t_values is None else t_values,
        refinements,
    )


def dirichlet_control(
    result: EigenResult, grid: int = 801, t_values: Optional[Sequence[float]] = None
) -> SweepResult:
    """E(delta_1) + t E(delta_4), which never exceeds four nodal domains."""
    return coefficient_sweep(
        fem_field(result, 1, grid),
        fem_field(result, 4, grid),
        default_t_values() if t_values is None else t_values,
    )


def product_lift_experiment(
    spectrum: RhombusSpectrum,
    counterexample: CounterexampleReport,
    epsilon: float,
    tolerance: float = 1e-4,
) -> ProductLiftReport:
    """Lifts the Neumann counterexample to the product with a circle of length 2 pi epsilon."""
    return product_lift(
        spectrum.values(), counterexample.report, circle_spectrum(FIBER_COUNT), epsilon, tolerance
    )


def lifted_matches_pairwise_sums(base: Sequence[float], epsilon: float) -> bool:
    """Heap merged lifted spectrum equals the sorted table of all sums."""
    fiber = circle_spectrum(FIBER_COUNT)
    lifted = lifted_spectrum(base, fiber, epsilon, len(base))
    brute = np.sort(np.add.outer(np.asarray(base), fiber / epsilon**2).ravel())[: len(base)]
    return bool(np.allclose(lifted, brute, rtol=1e-12, atol=0.0))
