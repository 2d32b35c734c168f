# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Linear finite elements for mixed Dirichlet/Neumann Laplace eigenproblems."""

import csv
from typing import List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.optimize import linear_sum_assignment
from scipy.sparse.linalg import splu

from extended_courant.core.geometry import DIAGONAL_D, DIAGONAL_M, Reflection
from extended_courant.core.mesh import TriangleMesh, reference_mesh
from extended_courant.core.triangle_spectra import MixedProblemId, Symmetry, symmetry_label
from extended_courant.exceptions import ConvergenceError, FactorizationError, PairingError
from extended_courant.utils.clustering import cluster_labels
from extended_courant.utils.log import Log
from extended_courant.utils.richardson import extrapolate_h2

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
KINDS = (DIRICHLET, NEUMANN)
LETTERS = {"d": DIRICHLET, "n": NEUMANN}

RESIDUAL_TOLERANCE = 1e-8
MAX_ITERATIONS = 500
EXTRA_BLOCK = 5
PAIRING_THRESHOLD = 0.9
PAIRING_CLUSTER_TOLERANCE = 1e-2
MULTIPLICITY_TOLERANCE = 1e-4


class BCAssignment:
    """Side tag to boundary condition.

    Attr:
        sides (dict): tag -> "dirichlet" or "neumann".
    """

    def __init__(self, sides: Mapping[int, str]):
        for tag, kind in sides.items():
            if kind not in KINDS:
                raise ValueError(f"Side {tag}: condition must be one of {KINDS}, got '{kind}'.")
        self.sides = {int(tag): kind for tag, kind in sorted(sides.items())}

    @classmethod
    def from_letters(cls, letters: str) -> "BCAssignment":
        """'ndn' assigns sides 1, 2, 3."""
        try:
            return cls({tag: LETTERS[letter] for tag, letter in enumerate(letters.lower(), 1)})
        except KeyError as error:
            raise ValueError(f"Boundary letters must be 'n' or 'd', got '{letters}'.") from error

    @classmethod
    def uniform(cls, tags: Sequence[int], kind: str) -> "BCAssignment":
        """Same condition on every side."""
        return cls({tag: kind for tag in tags})

    @property
    def dirichlet_tags(self) -> Tuple[int, ...]:
        """Tags carrying the Dirichlet condition."""
        return tuple(tag for tag, kind in self.sides.items() if kind == DIRICHLET)

    @property
    def all_neumann(self) -> bool:
        """True without any Dirichlet side."""
        return not self.dirichlet_tags

    def check_total(self, mesh: TriangleMesh):
        """Raises ValueError unless every tag of the mesh has a condition."""
        missing = sorted(set(mesh.tags) - set(self.sides))
        if missing:
            raise ValueError(f"No boundary condition for sides {missing} of {mesh}.")

    def __eq__(self, other):
        return isinstance(other, BCAssignment) and self.sides == other.sides

    def __repr__(self):
        letters = "".join(kind[0] for kind in self.sides.values())
        return f"BCAssignment('{letters}')"


class AssembledSystem:
    """Stiffness and mass matrices with the free degrees of freedom.

    Attr:
        mesh (TriangleMesh): discretized domain.
        bc (BCAssignment): boundary conditions.
        stiffness (sparse.csr_matrix): full stiffness matrix A.
        mass (sparse.csr_matrix): full consistent mass matrix B.
        free (np.ndarray): unconstrained vertex indices.
    """

    def __init__(self, mesh, bc, stiffness, mass, free):
        self.mesh = mesh
        self.bc = bc
        self.stiffness = stiffness
        self.mass = mass
        self.free = free
        self._reduced = None

    def reduced(self) -> Tuple[sparse.csc_matrix, sparse.csc_matrix]:
        """A and B restricted to the free degrees of freedom."""
        if self._reduced is None:
            select = sparse.eye(self.mesh.n_vertices, format="csr")[self.free]
            self._reduced = (
                (select @ self.stiffness @ select.T).tocsc(),
                (select @ self.mass @ select.T).tocsc(),
            )
        return self._reduced

    def expand(self, reduced_vectors: np.ndarray) -> np.ndarray:
        """Full vertex vectors, zero at constrained vertices."""
        full = np.zeros((self.mesh.n_vertices,) + reduced_vectors.shape[1:])
        full[self.free] = reduced_vectors
        return full

    def __repr__(self):
        return f"AssembledSystem({self.mesh}, {self.bc}, free={len(self.free)})"


def assemble(mesh: TriangleMesh, bc: BCAssignment) -> AssembledSystem:
    """Linear element stiffness and mass matrices.

    Args:
        mesh: conforming mesh.
        bc: condition for every side tag; vertices touching a Dirichlet side are constrained.

    Returns:
        AssembledSystem.
    """
    bc.check_total(mesh)
    cells = mesh.cells
    corners = [mesh.vertices[cells[:, k]] for k in range(3)]
    # edge opposite each corner
    opposite = [corners[2] - corners[1], corners[0] - corners[2], corners[1] - corners[0]]
    area = mesh.signed_areas()

    local_stiffness = np.empty((len(cells), 3, 3))
    for i in range(3):
        for j in range(3):
            local_stiffness[:, i, j] = np.sum(opposite[i] * opposite[j], axis=1) / (4 * area)
    local_mass = (area / 12)[:, None, None] * (np.ones((3, 3)) + np.eye(3))

    rows = np.repeat(cells, 3, axis=1).ravel()
    cols = np.tile(cells, (1, 3)).ravel()
    shape = (mesh.n_vertices, mesh.n_vertices)
    stiffness = sparse.coo_matrix((local_stiffness.ravel(), (rows, cols)), shape=shape).tocsr()
    mass = sparse.coo_matrix((local_mass.ravel(), (rows, cols)), shape=shape).tocsr()

    constrained = mesh.tagged_vertices(bc.dirichlet_tags)
    free = np.setdiff1d(np.arange(mesh.n_vertices), constrained)
    system = AssembledSystem(mesh, bc, stiffness, mass, free)
    Log.log(f"Assembled {system}")
    return system


class EigenResult:
    """Lowest eigenpairs of an assembled system.

    Attr:
        eigenvalues (np.ndarray): nondecreasing.
        vectors (np.ndarray): (nv, k) B-orthonormal vertex values.
        system (AssembledSystem): the discretization.
        residuals (np.ndarray): relative residual per pair.
        iterations (int): subspace iterations used.
        extrapolated (np.ndarray or None): Richardson values from a coarser level.
        error_estimates (np.ndarray or None): |extrapolated - eigenvalues|.
        symmetries (list or None): rhombus class per vector.
    """

    def __init__(self, eigenvalues, vectors, system, residuals, iterations):
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)
        self.vectors = vectors
        self.system = system
        self.residuals = residuals
        self.iterations = iterations
        self.extrapolated: Optional[np.ndarray] = None
        self.error_estimates: Optional[np.ndarray] = None
        self.symmetries: Optional[List[Union[Symmetry, str]]] = None

    @property
    def mesh(self) -> TriangleMesh:
        """Mesh of the discretization."""
        return self.system.mesh

    @property
    def level(self) -> int:
        """Mesh level."""
        return self.system.mesh.level

    @property
    def count(self) -> int:
        """Number of eigenpairs."""
        return len(self.eigenvalues)

    def best_values(self) -> np.ndarray:
        """Extrapolated eigenvalues when available, else the discrete ones."""
        return self.eigenvalues if self.extrapolated is None else self.extrapolated

    def gram(self) -> np.ndarray:
        """V^T B V."""
        return self.vectors.T @ (self.system.mass @ self.vectors)

    def multiplicities(self, tolerance: float = MULTIPLICITY_TOLERANCE) -> List[int]:
        """Cluster sizes of the best values, one per cluster."""
        labels = cluster_labels(self.best_values(), tolerance)
        return [int(c) for c in np.bincount(labels)]

    def to_csv(self, path: str):
        """Writes index, eigenvalue, extrapolated and error estimate rows."""
        with open(path, "w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file)
            writer.writerow(["index", "eigenvalue", "extrapolated", "error_estimate", "symmetry"])
            for index in range(self.count):
                extrapolated = "" if self.extrapolated is None else self.extrapolated[index]
                error = "" if self.error_estimates is None else self.error_estimates[index]
                symmetry = "" if self.symmetries is None else symmetry_label(self.symmetries[index])
                writer.writerow(
                    [
                        index + 1,
                        repr(float(self.eigenvalues[index])),
                        extrapolated if extrapolated == "" else repr(float(extrapolated)),
                        error if error == "" else repr(float(error)),
                        symmetry,
                    ]
                )

    def __repr__(self):
        values = ", ".join(f"{v:.6g}" for v in self.best_values())
        return f"EigenResult({self.mesh.domain}, {self.system.bc}, level={self.level}, [{values}])"


def _normalize_signs(vectors: np.ndarray) -> np.ndarray:
    # largest entry positive
    picks = vectors[np.argmax(np.abs(vectors), axis=0), np.arange(vectors.shape[1])]
    return vectors * np.where(picks < 0, -1.0, 1.0)


def solve_lowest(
    system: AssembledSystem,
    k: int,
    seed: int = 0,
    tol: float = RESIDUAL_TOLERANCE,
    maxiter: int = MAX_ITERATIONS,
) -> EigenResult:
    """Lowest ``k`` eigenpairs by shift-invert subspace iteration.

    Args:
        system: assembled matrices.
        k: number of eigenpairs, at most a quarter of the free degrees of freedom.
        seed: seed of the random start block.
        tol: bound on ||A v - lambda B v|| / ||B v|| for every pair.
        maxiter: iteration cap.

    Returns:
        EigenResult with B-orthonormal full-length vectors.
    """
    stiffness, mass = system.reduced()
    size = stiffness.shape[0]
    if not 1 <= k <= size // 4:
        raise ValueError(f"k must be in 1..{size // 4} for {size} free unknowns, got {k}.")
    # shift keeps the all-Neumann operator definite
    shift = -1.0 if system.bc.all_neumann else 0.0
    try:
        factor = splu(
            (stiffness - shift * mass).tocsc(),
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )
    except RuntimeError as error:
        raise FactorizationError(f"Sparse factorization failed for {system}: {error}") from error

    block = min(k + EXTRA_BLOCK, size)
    block_vectors = np.random.default_rng(seed).standard_normal((size, block))
    residuals = np.full(k, np.inf)
    for iteration in range(1, maxiter + 1):
        images = factor.solve(mass @ block_vectors)
        images /= np.linalg.norm(images, axis=0)
        projected_stiffness = images.T @ (stiffness @ images)
        projected_mass = images.T @ (mass @ images)
        ritz_values, ritz_vectors = eigh(
            0.5 * (projected_stiffness + projected_stiffness.T),
            0.5 * (projected_mass + projected_mass.T),
        )
        block_vectors = images @ ritz_vectors
        values = ritz_values[:k]
        vectors = block_vectors[:, :k]
        weighted = mass @ vectors
        residuals = np.linalg.norm(stiffness @ vectors - weighted * values, axis=0)
        residuals /= np.linalg.norm(weighted, axis=0)
        if np.all(residuals < tol):
            break
    else:
        raise ConvergenceError(
            f"Subspace iteration did not converge in {maxiter} iterations for {system}.",
            residuals=residuals,
        )
    Log.log(f"Converged in {iteration} iterations, max residual {np.max(residuals):.2e}")
    full = _normalize_signs(system.expand(vectors))
    return EigenResult(values, full, system, residuals, iteration)


def extrapolate(coarse: EigenResult, fine: EigenResult) -> EigenResult:
    """Richardson extrapolation of eigenvalues on consecutive mesh levels.

    Eigenpairs are matched by the B-correlation of the fine eigenvectors with the
    prolonged coarse ones.

    Args:
        coarse: result on level l.
        fine: result on level l + 1 with the same boundary conditions and count.

    Returns:
        ``fine`` with ``extrapolated`` and ``error_estimates`` set.
    """
    if fine.mesh.level != coarse.mesh.level + 1 or fine.mesh.domain != coarse.mesh.domain:
        raise ValueError(f"{fine} is not the refinement of {coarse}.")
    if fine.system.bc != coarse.system.bc or fine.count != coarse.count:
        raise ValueError("Extrapolation needs the same problem and eigenpair count.")

    prolonged = fine.mesh.prolong(coarse.vectors)
    mass = fine.system.mass
    overlap = fine.vectors.T @ (mass @ prolonged)
    norms = np.sqrt(np.einsum("ij,ij->j", prolonged, mass @ prolonged))
    correlation = np.abs(overlap) / norms[None, :]
    rows, cols = linear_sum_assignment(-correlation)

    clusters = cluster_labels(fine.eigenvalues, PAIRING_CLUSTER_TOLERANCE)
    for i, j in zip(rows, cols):
        if correlation[i, j] >= PAIRING_THRESHOLD:
            continue
        members = clusters == clusters[i]
        if members[-1]:
            # the cluster may continue past the computed block
            Log.log(f"Pairing of eigenpair {i + 1} not verifiable at the block edge.")
            continue
        captured = np.sqrt(np.sum(overlap[members, j] ** 2)) / norms[j]
        if captured < PAIRING_THRESHOLD:
            raise PairingError(
                f"Eigenpair {i + 1} of {fine} correlates at most {correlation[i, j]:.3f} "
                f"with the coarse level; eigenvalues may have crossed."
            )

    order = np.argsort(rows)
    fine.extrapolated = extrapolate_h2(coarse.eigenvalues[cols[order]], fine.eigenvalues)
    fine.error_estimates = np.abs(fine.extrapolated - fine.eigenvalues)
    Log.log(f"Extrapolated {fine}")
    return fine


def label_symmetry_classes(
    result: EigenResult,
    reflections: Tuple[Reflection, Reflection] = (DIAGONAL_D, DIAGONAL_M),
    tolerance: float = PAIRING_CLUSTER_TOLERANCE,
) -> EigenResult:
    """Rotates near-degenerate eigenvectors into reflection classes and labels them.

    Within each eigenvalue cluster the commuting reflections are diagonalized
    jointly, so every returned vector is even or odd under both.
    """
    mass = result.system.mass
    perm_d, perm_m = (result.mesh.symmetry_permutation(r) for r in reflections)
    vectors = result.vectors.copy()
    clusters = cluster_labels(result.eigenvalues, tolerance)
    for label in np.unique(clusters):
        members = np.flatnonzero(clusters == label)
        block = vectors[:, members]
        weighted = mass @ block
        parity = weighted.T @ block[perm_d] + 2 * (weighted.T @ block[perm_m])
        _, rotation = eigh(0.5 * (parity + parity.T))
        # keep each rotated vector at the position it overlaps most
        positions, columns = linear_sum_assignment(-np.abs(rotation))
        vectors[:, members[positions]] = (block @ rotation)[:, columns]
    vectors = _normalize_signs(vectors)

    symmetries: List[Union[Symmetry, str]] = []
    weighted = mass @ vectors
    for index in range(result.count):
        sigma = float(weighted[:, index] @ vectors[perm_d, index])
        tau = float(weighted[:, index] @ vectors[perm_m, index])
        if max(abs(abs(sigma) - 1), abs(abs(tau) - 1)) > 1e-3:
            symmetries.append("mixed")
        else:
            symmetries.append((int(np.sign(sigma)), int(np.sign(tau))))
    result.vectors = vectors
    result.symmetries = symmetries
    return result


def solve_extrapolated(
    domain: str, bc: BCAssignment, level: int, count: int, seed: int = 0
) -> EigenResult:
    """Solves on ``level - 1`` and ``level`` and extrapolates."""
    if level < 1:
        raise ValueError(f"Extrapolation needs level >= 1, got {level}.")
    coarse_mesh = reference_mesh(domain, level - 1)
    fine_mesh = coarse_mesh.refine()
    with Log.section(f"fem {domain} {bc} level {level}"):
        coarse = solve_lowest(assemble(coarse_mesh, bc), count, seed)
        fine = solve_lowest(assemble(fine_mesh, bc), count, seed)
    return extrapolate(coarse, fine)


def solve_mixed_problem(
    problem: Union[MixedProblemId, str], level: int, count: int, seed: int = 0
) -> EigenResult:
    """Extrapolated eigenvalues of a mixed triangle problem."""
    if isinstance(problem, str):
        problem = MixedProblemId.parse(problem)
    return solve_extrapolated(
        problem.domain, BCAssignment.from_letters(problem.sides), level, count, seed
    )


def solve_rhombus(boundary: str, level: int, count: int, seed: int = 0) -> EigenResult:
    """Extrapolated rhombus eigenpairs with symmetry labels, boundary 'n' or 'd'."""
    bc = BCAssignment.uniform((1, 2, 3, 4), LETTERS[boundary])
    return label_symmetry_classes(solve_extrapolated("Rhombus", bc, level, count, seed))
