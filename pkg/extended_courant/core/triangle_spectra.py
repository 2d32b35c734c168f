# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Closed form spectra of the equilateral and hemiequilateral triangles."""

import csv
import itertools
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from extended_courant.core.geometry import (
    DIAGONAL_D,
    DIAGONAL_M,
    EQUILATERAL,
    RHOMBUS,
    SQRT3,
    Reflection,
)
from extended_courant.exceptions import InconsistentBoundaryError, UnsupportedProblemError
from extended_courant.utils.clustering import first_positions
from extended_courant.utils.log import Log

LAMBDA_UNIT = 16 * np.pi**2 / 9
DEFAULT_CUTOFF = 400.0
SYMMETRY_TOLERANCE = 1e-9
SIDE_LETTERS = {"n": "neumann", "d": "dirichlet"}
# boundary letter to reflection parity
EPSILON = {"n": 1, "d": -1}
DOMAINS = ("Th", "Te")

Symmetry = Tuple[int, int]
SYMMETRY_CLASSES: Tuple[Symmetry, ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def symmetry_label(symmetry: Union[Symmetry, str]) -> str:
    """'(+,-)' style label, or 'mixed'."""
    if isinstance(symmetry, str):
        return symmetry
    return "(" + ",".join("+" if s > 0 else "-" for s in symmetry) + ")"


class LatticePair:
    """Integer pair (m, n) indexing the closed form eigenvalues."""

    def __init__(self, m: int, n: int):
        if int(m) != m or int(n) != n or m < 0 or n < 0:
            raise ValueError(f"Lattice pair needs nonnegative integers, got ({m}, {n}).")
        self.m = int(m)
        self.n = int(n)

    @property
    def multiple(self) -> int:
        """m^2 + mn + n^2."""
        return self.m**2 + self.m * self.n + self.n**2

    def as_tuple(self) -> Tuple[int, int]:
        """(m, n)."""
        return self.m, self.n

    def __eq__(self, other):
        return isinstance(other, LatticePair) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f"LatticePair({self.m}, {self.n})"


def lambda_hat(pair: Union[LatticePair, Tuple[int, int]]) -> float:
    """16 pi^2 / 9 (m^2 + mn + n^2)."""
    if not isinstance(pair, LatticePair):
        pair = LatticePair(*pair)
    return LAMBDA_UNIT * pair.multiple


class MixedProblemId:
    """Triangle with one boundary letter per side.

    Sides of the hemiequilateral triangle are numbered 1, 2, 3 in decreasing
    order of length; the letters are written in that order, e.g. ``"ndn"``.

    Attr:
        domain (str): "Th" or "Te".
        sides (str): three letters among "n" and "d".
    """

    def __init__(self, domain: str, sides: str):
        if domain not in DOMAINS:
            raise ValueError(f"Domain must be one of {DOMAINS}, got '{domain}'.")
        sides = sides.lower()
        if len(sides) != 3 or any(letter not in SIDE_LETTERS for letter in sides):
            raise ValueError(f"Expected three letters among 'n' and 'd', got '{sides}'.")
        self.domain = domain
        self.sides = sides

    @classmethod
    def parse(cls, text: str) -> "MixedProblemId":
        """From 'Th:nnd'."""
        domain, _, sides = text.partition(":")
        return cls(domain, sides)

    @property
    def label(self) -> str:
        """'Th:nnd' style label."""
        return f"{self.domain}:{self.sides}"

    @property
    def outer(self) -> str:
        """Letter of side 1."""
        return self.sides[0]

    @property
    def symmetry(self) -> Symmetry:
        """Rhombus class (sigma, tau) this problem feeds under reflection."""
        return EPSILON[self.sides[1]], EPSILON[self.sides[2]]

    def boundary(self) -> Dict[int, str]:
        """Side tag to 'dirichlet' or 'neumann'."""
        return {tag + 1: SIDE_LETTERS[letter] for tag, letter in enumerate(self.sides)}

    def __eq__(self, other):
        return isinstance(other, MixedProblemId) and self.label == other.label

    def __hash__(self):
        return hash(self.label)

    def __repr__(self):
        return f"MixedProblemId('{self.label}')"


# admissible lattice windows of the closed form problems
_WINDOWS: Dict[str, Callable[[int, int], bool]] = {
    "Th:nnn": lambda m, n: 0 <= m <= n,
    "Th:ndn": lambda m, n: 0 <= m < n,
    "Th:dnd": lambda m, n: 1 <= m <= n,
    "Th:ddd": lambda m, n: 1 <= m < n,
    "Te:nnn": lambda m, n: True,
    "Te:ddd": lambda m, n: m >= 1 and n >= 1,
}
CLOSED_FORM_PROBLEMS = tuple(MixedProblemId.parse(label) for label in _WINDOWS)


class SpectrumEntry:
    """One eigenvalue of a closed form problem with its lattice pairs."""

    def __init__(self, multiple: int, pairs: Sequence[LatticePair]):
        self.multiple = multiple
        self.value = LAMBDA_UNIT * multiple
        self.pairs = sorted(pairs, key=LatticePair.as_tuple)
        self.multiplicity = len(self.pairs)

    def __repr__(self):
        pairs = ", ".join(str(p.as_tuple()) for p in self.pairs)
        return f"SpectrumEntry({self.multiple} x 16pi^2/9, pairs=[{pairs}])"


class MixedSpectrum:
    """Sorted closed form spectrum below a cutoff."""

    def __init__(self, problem: MixedProblemId, entries: List[SpectrumEntry], cutoff: float):
        self.problem = problem
        self.entries = sorted(entries, key=lambda entry: entry.multiple)
        self.cutoff = cutoff

    def values(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity."""
        return np.array(
            [entry.value for entry in self.entries for _ in range(entry.multiplicity)]
        )

    def multiples(self) -> List[int]:
        """Eigenvalues as multiples of 16 pi^2 / 9, repeated by multiplicity."""
        return [entry.multiple for entry in self.entries for _ in range(entry.multiplicity)]

    @property
    def complete_below(self) -> float:
        """Every eigenvalue up to this value is listed."""
        return self.cutoff

    def to_csv(self, path: str):
        """Writes value, m, n, multiplicity, symmetry class and index rows."""
        symmetry = symmetry_label(self.problem.symmetry) if self.problem.domain == "Th" else ""
        with open(path, "w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file)
            writer.writerow(["value", "multiple", "m", "n", "multiplicity", "symmetry", "kappa"])
            kappa = 1
            for entry in self.entries:
                for pair in entry.pairs:
                    writer.writerow(
                        [
                            repr(entry.value),
                            entry.multiple,
                            pair.m,
                            pair.n,
                            entry.multiplicity,
                            symmetry,
                            kappa,
                        ]
                    )
                kappa += entry.multiplicity

    def __len__(self):
        return sum(entry.multiplicity for entry in self.entries)

    def __repr__(self):
        return f"MixedSpectrum({self.problem.label}, multiples={self.multiples()})"


def enumerate_mixed_spectrum(
    problem: Union[MixedProblemId, str], cutoff: float = DEFAULT_CUTOFF
) -> MixedSpectrum:
    """All closed form eigenvalues up to ``cutoff`` with their multiplicities.

    Args:
        problem: one of the problems in ``CLOSED_FORM_PROBLEMS``.
        cutoff: largest eigenvalue kept.

    Returns:
        MixedSpectrum sorted by value.
    """
    if isinstance(problem, str):
        problem = MixedProblemId.parse(problem)
    window = _WINDOWS.get(problem.label)
    if window is None:
        raise UnsupportedProblemError(
            f"No closed form spectrum for {problem.label}; "
            f"supported: {[p.label for p in CLOSED_FORM_PROBLEMS]}."
        )
    if cutoff < 0:
        raise ValueError(f"Cutoff must be nonnegative, got {cutoff}.")
    # m^2 + mn + n^2 >= max(m, n)^2
    bound = int(np.floor(np.sqrt(cutoff / LAMBDA_UNIT))) + 1
    grouped: Dict[int, List[LatticePair]] = {}
    for m, n in itertools.product(range(bound + 1), repeat=2):
        pair = LatticePair(m, n)
        if window(m, n) and LAMBDA_UNIT * pair.multiple <= cutoff:
            grouped.setdefault(pair.multiple, []).append(pair)
    entries = [SpectrumEntry(multiple, pairs) for multiple, pairs in grouped.items()]
    Log.log(f"{problem.label}: {len(entries)} distinct eigenvalues below {cutoff}")
    return MixedSpectrum(problem, entries, cutoff)


def phi2_neumann(x, y) -> np.ndarray:
    """Second Neumann eigenfunction of the equilateral triangle, eigenvalue 16 pi^2 / 9."""
    a = 2 * np.pi * np.asarray(x, dtype=float) / 3
    b = 2 * np.pi * np.asarray(y, dtype=float) / SQRT3
    return 2 * np.cos(a) * (np.cos(a) + np.cos(b)) - 1


def laplacian_residual(
    func: Callable, eigenvalue: float, points: np.ndarray, step: float = 5e-3
) -> float:
    """max |Delta f + lambda f| / (lambda max |f|) with a fourth order stencil."""
    x, y = points[:, 0], points[:, 1]
    weights = (-1.0, 16.0, -30.0, 16.0, -1.0)
    laplacian = np.zeros(len(points))
    for shift, weight in zip(range(-2, 3), weights):
        laplacian += weight * (func(x + shift * step, y) + func(x, y + shift * step))
    laplacian /= 12 * step**2
    values = func(x, y)
    residual = np.max(np.abs(laplacian + eigenvalue * values))
    return float(residual / (eigenvalue * np.max(np.abs(values))))


def neumann_boundary_residual(
    func: Callable = phi2_neumann, samples: int = 100, step: float = 1e-5
) -> float:
    """Largest normal derivative on the equilateral triangle boundary, relative to max |f|."""
    vertices = EQUILATERAL.vertices
    per_side = int(np.ceil(samples / 3))
    worst = 0.0
    scale = np.max(np.abs(func(vertices[:, 0], vertices[:, 1])))
    for start, end in zip(vertices, np.roll(vertices, -1, axis=0)):
        tangent = (end - start) / np.linalg.norm(end - start)
        normal = np.array([tangent[1], -tangent[0]])
        t = np.linspace(0, 1, per_side + 2)[1:-1, None]
        points = start + t * (end - start)
        forward = points + step * normal
        backward = points - step * normal
        derivative = (func(forward[:, 0], forward[:, 1]) - func(backward[:, 0], backward[:, 1])) / (
            2 * step
        )
        worst = max(worst, float(np.max(np.abs(derivative))))
    return worst / max(scale, 1.0)


class RhombusFunction:
    """Function on the equilateral rhombus with an optional symmetry class.

    Attr:
        evaluator (callable): f(x, y) vectorized.
        symmetry (tuple or str or None): (sigma, tau), "mixed", or None when unknown.
        continuous (bool): False for an odd extension of a trace that does not vanish.
    """

    def __init__(
        self,
        evaluator: Callable,
        symmetry: Optional[Union[Symmetry, str]] = None,
        continuous: bool = True,
    ):
        self.evaluator = evaluator
        self.symmetry = symmetry
        self.continuous = continuous

    def __call__(self, x, y) -> np.ndarray:
        return np.asarray(self.evaluator(x, y), dtype=float)

    def pullback(self, reflection: Reflection) -> "RhombusFunction":
        """f composed with a reflection."""

        def evaluator(x, y):
            rx, ry = reflection.apply_xy(x, y)
            return self(rx, ry)

        return RhombusFunction(evaluator, continuous=self.continuous)

    def _parity(self, points: np.ndarray, reflection: Reflection) -> Optional[int]:
        values = self(points[:, 0], points[:, 1])
        mirrored = self.pullback(reflection)(points[:, 0], points[:, 1])
        scale = max(float(np.max(np.abs(values))), 1e-300)
        if np.max(np.abs(mirrored - values)) <= SYMMETRY_TOLERANCE * scale:
            return 1
        if np.max(np.abs(mirrored + values)) <= SYMMETRY_TOLERANCE * scale:
            return -1
        return None

    def detect_symmetry(self, samples: int = 1000, seed: int = 0) -> Union[Symmetry, str]:
        """(sigma, tau) with D*f = sigma f and M*f = tau f on random samples, else 'mixed'."""
        points = RHOMBUS.sample(samples, np.random.default_rng(seed), margin=1e-9)
        # stay off M where an odd extension may jump
        points = points[np.abs(DIAGONAL_M.signed_distance(points[:, 0], points[:, 1])) > 1e-9]
        sigma = self._parity(points, DIAGONAL_D)
        tau = self._parity(points, DIAGONAL_M)
        if sigma is None or tau is None:
            return "mixed"
        return sigma, tau

    def __add__(self, other: "RhombusFunction") -> "RhombusFunction":
        return RhombusFunction(
            lambda x, y: self(x, y) + other(x, y),
            continuous=self.continuous and other.continuous,
        )

    def scaled(self, factor: float) -> "RhombusFunction":
        """factor * f."""
        return RhombusFunction(
            lambda x, y: factor * self(x, y), self.symmetry, continuous=self.continuous
        )

    def __repr__(self):
        return (
            f"RhombusFunction(symmetry={symmetry_label(self.symmetry or 'unknown')}, "
            f"continuous={self.continuous})"
        )


def _below_short_diagonal(x, y) -> np.ndarray:
    return SQRT3 * np.asarray(x) + np.asarray(y) <= SQRT3 + 1e-12


def reflect_extend(func: Callable, tau: int, trace_samples: int = 200) -> RhombusFunction:
    """Extends f from the lower triangle across the short diagonal with parity tau.

    Args:
        func: f(x, y) on the closed lower equilateral triangle.
        tau: +1 for the even extension, -1 for the odd one.
        trace_samples: points on the short diagonal used to detect a jump.

    Returns:
        RhombusFunction equal to f below the short diagonal and tau f(M p) above it.
    """
    if tau not in (1, -1):
        raise ValueError(f"tau must be +1 or -1, got {tau}.")

    def evaluator(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        lower = _below_short_diagonal(x, y)
        mx, my = DIAGONAL_M.apply_xy(x, y)
        return np.where(lower, func(x, y), tau * np.asarray(func(mx, my), dtype=float))

    continuous = True
    if tau == -1:
        s = np.linspace(0, 1, trace_samples)
        trace = func(1 - s / 2, s * SQRT3 / 2)
        interior = EQUILATERAL.sample(trace_samples, np.random.default_rng(0))
        scale = max(float(np.max(np.abs(func(interior[:, 0], interior[:, 1])))), 1e-300)
        continuous = bool(np.max(np.abs(trace)) <= SYMMETRY_TOLERANCE * scale)
    extension = RhombusFunction(evaluator, continuous=continuous)
    if not continuous:
        Log.log("Odd extension of a nonvanishing trace jumps across the short diagonal.")
    extension.symmetry = extension.detect_symmetry()
    return extension


def symmetry_project(func: RhombusFunction) -> Dict[Symmetry, RhombusFunction]:
    """Components f_{sigma,tau} = (f + sigma D*f + tau M*f + sigma tau D*M*f) / 4."""
    d_pull = func.pullback(DIAGONAL_D)
    m_pull = func.pullback(DIAGONAL_M)
    dm_pull = m_pull.pullback(DIAGONAL_D)
    components = {}
    for sigma, tau in SYMMETRY_CLASSES:

        def evaluator(x, y, sigma=sigma, tau=tau):
            return 0.25 * (
                func(x, y) + sigma * d_pull(x, y) + tau * m_pull(x, y) + sigma * tau * dm_pull(x, y)
            )

        components[(sigma, tau)] = RhombusFunction(
            evaluator, symmetry=(sigma, tau), continuous=func.continuous
        )
    return components


class RhombusEntry:
    """Rhombus eigenvalue with the mixed problem and symmetry class it came from."""

    def __init__(self, value: float, problem: MixedProblemId, index: int, error: float = 0.0):
        self.value = float(value)
        self.problem = problem
        self.symmetry = problem.symmetry
        self.index = index
        self.error = float(error)

    def __repr__(self):
        return (
            f"RhombusEntry({self.value:.6g}, {symmetry_label(self.symmetry)}, "
            f"{self.problem.label} #{self.index})"
        )


class RhombusSpectrum:
    """Merged rhombus spectrum with symmetry labels and Courant indices."""

    def __init__(
        self, outer: str, entries: List[RhombusEntry], complete_below: float, tolerance: float
    ):
        self.outer = outer
        self.entries = sorted(entries, key=lambda e: (e.value, SYMMETRY_CLASSES.index(e.symmetry)))
        self.complete_below = complete_below
        self.tolerance = tolerance
        self.kappas = first_positions(self.values(), tolerance) if self.entries else []

    def values(self) -> np.ndarray:
        """Sorted eigenvalues."""
        return np.array([entry.value for entry in self.entries])

    def errors(self) -> np.ndarray:
        """Error estimates, zero for closed form entries."""
        return np.array([entry.error for entry in self.entries])

    def symmetries(self) -> List[Symmetry]:
        """Symmetry class per entry."""
        return [entry.symmetry for entry in self.entries]

    def __getitem__(self, position: int) -> RhombusEntry:
        """Entry at 1-based position."""
        if position < 1 or position > len(self.entries):
            raise IndexError(f"Position {position} outside 1..{len(self.entries)}.")
        return self.entries[position - 1]

    def __len__(self):
        return len(self.entries)

    def to_csv(self, path: str):
        """Writes position, value, symmetry, source problem and kappa rows."""
        with open(path, "w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file)
            writer.writerow(["position", "value", "symmetry", "problem", "index", "kappa"])
            for position, (entry, kappa) in enumerate(zip(self.entries, self.kappas), start=1):
                writer.writerow(
                    [
                        position,
                        repr(entry.value),
                        symmetry_label(entry.symmetry),
                        entry.problem.label,
                        entry.index,
                        kappa,
                    ]
                )

    def __repr__(self):
        values = ", ".join(f"{v:.4f}" for v in self.values())
        return f"RhombusSpectrum(outer='{self.outer}', values=[{values}])"


def _column_values(column) -> Tuple[np.ndarray, np.ndarray, float]:
    """Values, error estimates and completeness bound of a spectrum column."""
    if isinstance(column, MixedSpectrum):
        values = column.values()
        return values, np.zeros(len(values)), column.complete_below
    if hasattr(column, "best_values"):
        values = np.asarray(column.best_values(), dtype=float)
        errors = getattr(column, "error_estimates", None)
        errors = np.zeros(len(values)) if errors is None else np.asarray(errors, dtype=float)
        return values, errors, float(values[-1])
    values = np.sort(np.asarray(column, dtype=float))
    return values, np.zeros(len(values)), float(values[-1])


def rhombus_spectrum_assemble(
    columns: Mapping[Union[MixedProblemId, str], object], tolerance: float = 1e-4
) -> RhombusSpectrum:
    """Merges the four hemiequilateral columns sharing an outer letter.

    Args:
        columns: problem id to MixedSpectrum, solver result (``best_values``) or value array.
        tolerance: relative gap below which eigenvalues count as equal.

    Returns:
        RhombusSpectrum truncated where every column is still complete.
    """
    parsed = {
        (MixedProblemId.parse(key) if isinstance(key, str) else key): column
        for key, column in columns.items()
    }
    outer_letters = {problem.outer for problem in parsed}
    if len(outer_letters) != 1:
        raise InconsistentBoundaryError(
            f"Columns mix outer letters {sorted(outer_letters)}; one is required."
        )
    if any(problem.domain != "Th" for problem in parsed):
        raise ValueError("Rhombus columns must be hemiequilateral problems.")
    symmetries = sorted(problem.symmetry for problem in parsed)
    if symmetries != sorted(SYMMETRY_CLASSES):
        raise ValueError(f"Need one column per symmetry class, got {symmetries}.")

    entries: List[RhombusEntry] = []
    complete_below = np.inf
    for problem, column in parsed.items():
        values, errors, column_bound = _column_values(column)
        complete_below = min(complete_below, column_bound)
        entries.extend(
            RhombusEntry(value, problem, index, error)
            for index, (value, error) in enumerate(zip(values, errors), start=1)
        )
    entries = [entry for entry in entries if entry.value <= complete_below]
    outer = outer_letters.pop()
    Log.log(f"Assembled {len(entries)} rhombus eigenvalues below {complete_below:.4f}")
    return RhombusSpectrum(outer, entries, complete_below, tolerance)
