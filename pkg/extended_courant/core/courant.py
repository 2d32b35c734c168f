# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Courant indices, the extended Courant property and related bounds."""

import heapq
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from extended_courant.core.nodal_domains import (
    NodalPartition,
    SampledField,
    certify_band,
    count_nodal_domains,
)
from extended_courant.exceptions import NoMatchingClusterError, ResolutionError
from extended_courant.utils.clustering import first_positions, same_cluster
from extended_courant.utils.log import Log
from extended_courant.utils.verification_result import VerificationResult

CONSISTENT = "consistent"
VIOLATION = "VIOLATION"
INCONCLUSIVE = "inconclusive"
NOT_COLLAPSED = "not collapsed"
MAX_UNCERTAIN_FRACTION = 0.01
# extra halvings of the pitch allowed to certify a violating count
CERTIFY_HALVINGS = 1
DEFAULT_TOLERANCE = 1e-4


class CourantIndex(VerificationResult):
    """Position of the first eigenvalue in the cluster of mu."""

    def __init__(self, kappa: int, eigenvalue: float, tolerance: float):
        self.kappa = kappa
        self.eigenvalue = float(eigenvalue)
        self.tolerance = tolerance


def kappa(
    spectrum: Sequence[float], mu: float, tolerance: float = DEFAULT_TOLERANCE
) -> CourantIndex:
    """min {m : mu_m = mu} on the clustered nondecreasing spectrum.

    Args:
        spectrum: nondecreasing eigenvalues.
        mu: eigenvalue to locate.
        tolerance: relative gap below which eigenvalues are equal.

    Returns:
        CourantIndex with 1-based kappa.
    """
    values = np.asarray(spectrum, dtype=float)
    positions = first_positions(values, tolerance)
    for index, value in enumerate(values):
        if same_cluster(value, mu, tolerance):
            return CourantIndex(positions[index], mu, tolerance)
    raise NoMatchingClusterError(f"Eigenvalue {mu} matches no cluster of the spectrum.")


class ECPReport(VerificationResult):
    """Nodal count of a combination against the Courant index of its top eigenvalue."""

    def __init__(
        self,
        description: str,
        beta0: Optional[int],
        kappa_index: int,
        eigenvalue: float,
        uncertain_fraction: Optional[float],
        note: str = "",
        partition: Optional[NodalPartition] = None,
    ):
        self.description = description
        self.beta0 = beta0
        self.kappa = kappa_index
        self.eigenvalue = float(eigenvalue)
        self.uncertain_fraction = uncertain_fraction
        self.note = note
        self._partition = partition

    @property
    def verdict(self) -> str:
        """VIOLATION iff beta0 > kappa with a zero band under 1% of the domain."""
        if self.beta0 is None:
            return INCONCLUSIVE
        if self.beta0 > self.kappa:
            if self.uncertain_fraction < MAX_UNCERTAIN_FRACTION:
                return VIOLATION
            return INCONCLUSIVE
        return CONSISTENT

    def nodal_partition(self) -> Optional[NodalPartition]:
        """Partition the count came from."""
        return self._partition


def ecp_check(
    field: SampledField,
    participating: Sequence[float],
    spectrum: Sequence[float],
    tolerance: float = DEFAULT_TOLERANCE,
    description: str = "",
) -> ECPReport:
    """Checks beta0(field) <= kappa(max participating eigenvalue).

    Args:
        field: sampled sum of eigenfunctions.
        participating: eigenvalues of the summands.
        spectrum: nondecreasing spectrum of the domain.
        tolerance: clustering tolerance.
        description: label of the combination.

    Returns:
        ECPReport; an unresolved count gives verdict "inconclusive".
    """
    top = max(participating)
    index = kappa(spectrum, top, tolerance).kappa
    try:
        counted = count_nodal_domains(field)
    except ResolutionError as error:
        Log.log(f"{description}: {error}")
        return ECPReport(description, None, index, top, None, note=str(error))
    fraction = counted.uncertain_fraction
    if counted.beta0 > index and fraction >= MAX_UNCERTAIN_FRACTION:
        try:
            fraction = certify_band(field, counted.beta0, MAX_UNCERTAIN_FRACTION, CERTIFY_HALVINGS)
        except ResolutionError as error:
            Log.log(f"{description}: {error}")
            return ECPReport(description, None, index, top, None, note=str(error))
    report = ECPReport(description, counted.beta0, index, top, fraction, partition=counted)
    Log.log(f"{description}: beta0={report.beta0}, kappa={index}, {report.verdict}")
    return report


def courant_sanity(
    fields: Sequence[SampledField],
    eigenvalues: Sequence[float],
    spectrum: Sequence[float],
    tolerance: float = DEFAULT_TOLERANCE,
) -> List[ECPReport]:
    """Single eigenfunctions, whose counts never exceed kappa."""
    return [
        ecp_check(field, [value], spectrum, tolerance, description=f"eigenfunction {i}")
        for i, (field, value) in enumerate(zip(fields, eigenvalues), start=1)
    ]


def default_t_values(count: int = 101) -> np.ndarray:
    """tan(theta) for ``count`` interior angles of (-pi/2, pi/2), t = 0 included for odd counts."""
    theta = -np.pi / 2 + np.pi * np.arange(1, count + 1) / (count + 1)
    return np.tan(theta)


class SweepResult(VerificationResult):
    """Nodal counts of u + t v over a set of t."""

    def __init__(self, t_values, counts, uncertain):
        order = np.argsort(t_values, kind="stable")
        self.t_values = [float(t_values[i]) for i in order]
        self.counts: List[Optional[int]] = [counts[i] for i in order]
        self.uncertain = [uncertain[i] for i in order]

    @property
    def max_count(self) -> int:
        """Largest resolved count, 0 when nothing resolved."""
        return max((c for c in self.counts if c is not None), default=0)

    @property
    def argmax_t(self) -> Optional[float]:
        """First t attaining the largest count."""
        for t, count in zip(self.t_values, self.counts):
            if count is not None and count == self.max_count:
                return t
        return None

    @property
    def unresolved(self) -> List[float]:
        """t values whose count was not stable under refinement."""
        return [t for t, count in zip(self.t_values, self.counts) if count is None]

    @property
    def change_intervals(self) -> List[Tuple[float, float, int, int]]:
        """Consecutive resolved t values whose counts differ."""
        resolved = [(t, c) for t, c in zip(self.t_values, self.counts) if c is not None]
        return [
            (left[0], right[0], left[1], right[1])
            for left, right in zip(resolved, resolved[1:])
            if left[1] != right[1]
        ]

    def merge(self, other: "SweepResult") -> "SweepResult":
        """Union of two sweeps of the same pair."""
        return SweepResult(
            self.t_values + other.t_values,
            self.counts + other.counts,
            self.uncertain + other.uncertain,
        )


def coefficient_sweep(
    u: SampledField, v: SampledField, t_values: Sequence[float]
) -> SweepResult:
    """beta0(u + t v) for every t, None where the count is unresolved."""
    counts: List[Optional[int]] = []
    uncertain: List[Optional[float]] = []
    for t in t_values:
        field = SampledField.combine([u, v], [1.0, t])
        try:
            counted = count_nodal_domains(field)
            counts.append(counted.beta0)
            uncertain.append(counted.uncertain_fraction)
        except ResolutionError:
            counts.append(None)
            uncertain.append(None)
    result = SweepResult(list(t_values), counts, uncertain)
    Log.log(f"Sweep over {len(counts)} values: max beta0 {result.max_count} at {result.argmax_t}")
    return result


def _refinement_points(result: SweepResult, per_interval: int) -> List[float]:
    t_values = result.t_values
    targets = set()
    for index, count in enumerate(result.counts):
        if count is None or count == result.max_count:
            targets.update({index - 1, index})
    for left, right, _, _ in result.change_intervals:
        targets.add(t_values.index(left))
    points: List[float] = []
    for index in sorted(targets):
        if 0 <= index < len(t_values) - 1:
            inner = np.linspace(t_values[index], t_values[index + 1], per_interval + 2)[1:-1]
            points.extend(float(t) for t in inner)
    return points


def search_max_count(
    u: SampledField,
    v: SampledField,
    target: int,
    t_values: Optional[Sequence[float]] = None,
    refinements: int = 3,
    per_interval: int = 8,
) -> SweepResult:
    """Sweeps u + t v, refining the t grid around the best counts until ``target`` is met.

    Args:
        u: first field.
        v: second field on the same grid.
        target: count to reach.
        t_values: initial grid, ``default_t_values()`` when omitted.
        refinements: maximal number of refinement rounds.
        per_interval: new points inserted in each refined interval.

    Returns:
        SweepResult over all visited t.
    """
    result = coefficient_sweep(u, v, default_t_values() if t_values is None else t_values)
    for round_index in range(refinements):
        if result.max_count >= target:
            break
        points = _refinement_points(result, per_interval)
        if not points:
            break
        Log.log(f"Refinement round {round_index + 1}: {len(points)} new t values")
        result = result.merge(coefficient_sweep(u, v, points))
    return result


def lifted_spectrum(
    base: Sequence[float], fiber: Sequence[float], epsilon: float, count: int
) -> np.ndarray:
    """``count`` smallest sums base_i + fiber_j / epsilon^2 of nondecreasing spectra."""
    base = np.asarray(base, dtype=float)
    fiber = np.asarray(fiber, dtype=float) / epsilon**2
    heap = [(base[0] + fiber[j], 0, j) for j in range(len(fiber))]
    heapq.heapify(heap)
    values = []
    while heap and len(values) < count:
        value, i, j = heapq.heappop(heap)
        values.append(value)
        if i + 1 < len(base):
            heapq.heappush(heap, (base[i + 1] + fiber[j], i + 1, j))
    return np.array(values)


def circle_spectrum(count: int) -> np.ndarray:
    """0, 1, 1, 4, 4, ... on the circle of length 2 pi."""
    modes = np.arange(count) // 2 + np.arange(count) % 2
    return (modes**2).astype(float)


class ProductLiftReport(VerificationResult):
    """Combination report lifted to a collapsing product."""

    def __init__(self, base: ECPReport, epsilon, threshold, lifted_kappa, lifted_values):
        self.base_description = base.description
        self.beta0 = base.beta0
        self.base_kappa = base.kappa
        self.epsilon = float(epsilon)
        self.threshold = float(threshold)
        self.kappa = lifted_kappa
        self.lifted_values = lifted_values
        self._base = base

    @property
    def collapsed(self) -> bool:
        """epsilon below the threshold."""
        return self.epsilon < self.threshold

    @property
    def verdict(self) -> str:
        """Base verdict carried by the lifted kappa, or 'not collapsed'."""
        if not self.collapsed:
            return NOT_COLLAPSED
        if self.beta0 is None:
            return INCONCLUSIVE
        if self.beta0 > self.kappa:
            if self._base.uncertain_fraction < MAX_UNCERTAIN_FRACTION:
                return VIOLATION
            return INCONCLUSIVE
        return CONSISTENT


def product_lift(
    base_spectrum: Sequence[float],
    report: ECPReport,
    fiber_spectrum: Sequence[float],
    epsilon: float,
    tolerance: float = DEFAULT_TOLERANCE,
) -> ProductLiftReport:
    """Lifts a combination u(x) to u(x) * 1 on the product with a fiber scaled by epsilon.

    Args:
        base_spectrum: nondecreasing spectrum of the base domain.
        report: ECP report of the combination on the base.
        fiber_spectrum: nondecreasing fiber spectrum, first eigenvalue 0.
        epsilon: fiber scale.
        tolerance: clustering tolerance.

    Returns:
        ProductLiftReport with the threshold sqrt(mu_2(N) / mu_m).
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}.")
    fiber = np.asarray(fiber_spectrum, dtype=float)
    if len(fiber) < 2 or fiber[0] != 0:
        raise ValueError("Fiber spectrum needs at least two values starting at 0.")
    threshold = np.sqrt(fiber[1] / report.eigenvalue) if report.eigenvalue > 0 else np.inf
    # every sum up to mu is present once all pairs are merged
    lifted = lifted_spectrum(base_spectrum, fiber, epsilon, len(base_spectrum) * len(fiber))
    lifted_index = kappa(lifted, report.eigenvalue, tolerance).kappa
    result = ProductLiftReport(
        report, epsilon, threshold, lifted_index, lifted[: len(base_spectrum)]
    )
    Log.log(f"Product lift at epsilon={epsilon}: threshold {threshold:.4f}, {result.verdict}")
    return result


class SphereBounds(VerificationResult):
    """Nodal bounds for spherical harmonics of degree k on the d-sphere."""

    def __init__(self, d: int, k: int):
        self.d = d
        self.k = k
        self.courant = int(comb(d + k - 1, d, exact=True) + comb(d + k - 2, d, exact=True) + 1)
        self.leydold = k * (k - 1) + 2 if d == 2 else None
        self.effective = self.courant if self.leydold is None else min(self.courant, self.leydold)
        self.eigenvalue = k * (k + d - 1)
        self.multiplicity = int(comb(d + k, d, exact=True) - comb(d + k - 2, d, exact=True))


def sphere_bounds(d: int, k: int) -> SphereBounds:
    """Courant bound of the k-th spherical harmonic eigenvalue, and Leydold's bound for d = 2."""
    if d < 1 or k < 0:
        raise ValueError(f"Need d >= 1 and k >= 0, got d={d}, k={k}.")
    return SphereBounds(d, k)
