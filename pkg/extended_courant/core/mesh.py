# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Tagged triangle meshes with uniform midpoint refinement."""

from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from extended_courant.core.geometry import (
    EQUILATERAL,
    HEMIEQUILATERAL,
    RHOMBUS,
    RHOMBUS_CENTER,
    UNIT_SQUARE,
    Reflection,
)
from extended_courant.utils.log import Log

MAX_LEVEL = 9
MIN_CELL_AREA = 1e-14
MESH_DOMAINS = ("Th", "Te", "Rhombus", "Square")


def _edge_keys(lo: np.ndarray, hi: np.ndarray, n_vertices: int) -> np.ndarray:
    return lo.astype(np.int64) * n_vertices + hi.astype(np.int64)


class TriangleMesh:
    """Conforming triangle mesh whose boundary edges carry side tags.

    Attr:
        vertices (np.ndarray): (nv, 2) coordinates.
        cells (np.ndarray): (nc, 3) counterclockwise vertex indices.
        boundary (np.ndarray): (nb, 3) rows (i, j, tag).
        domain (str): name of the meshed polygon.
        level (int): number of refinements applied to the reference mesh.
        parents (np.ndarray or None): (nv - nv_coarse, 2) edge endpoints of the
            vertices added by the last refinement.
    """

    def __init__(
        self,
        vertices,
        cells,
        boundary,
        domain: str = "",
        level: int = 0,
        parents: Optional[np.ndarray] = None,
    ):
        self.vertices = np.asarray(vertices, dtype=float).reshape(-1, 2)
        self.cells = np.asarray(cells, dtype=np.int64).reshape(-1, 3)
        self.boundary = np.asarray(boundary, dtype=np.int64).reshape(-1, 3)
        self.domain = domain
        self.level = level
        self.parents = parents
        self._validate()

    @property
    def n_vertices(self) -> int:
        """Number of vertices."""
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        """Number of cells."""
        return len(self.cells)

    def signed_areas(self) -> np.ndarray:
        """Signed cell areas, positive for counterclockwise cells."""
        p0, p1, p2 = (self.vertices[self.cells[:, k]] for k in range(3))
        e1, e2 = p1 - p0, p2 - p0
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def _cell_edges(self) -> Tuple[np.ndarray, np.ndarray]:
        # edges (0,1), (1,2), (2,0) of every cell
        first = self.cells
        second = np.roll(self.cells, -1, axis=1)
        return np.minimum(first, second), np.maximum(first, second)

    def _validate(self):
        areas = self.signed_areas()
        if np.any(areas < 0):
            raise ValueError(f"Cells {np.flatnonzero(areas < 0)[:5]} are clockwise.")
        if np.any(areas <= MIN_CELL_AREA):
            raise ValueError(f"Cells {np.flatnonzero(areas <= MIN_CELL_AREA)[:5]} are degenerate.")
        lo, hi = self._cell_edges()
        keys, counts = np.unique(
            _edge_keys(lo.ravel(), hi.ravel(), self.n_vertices), return_counts=True
        )
        if np.any(counts > 2):
            raise ValueError("Mesh is not conforming: an edge is shared by more than two cells.")
        boundary_keys = np.sort(
            _edge_keys(
                np.minimum(self.boundary[:, 0], self.boundary[:, 1]),
                np.maximum(self.boundary[:, 0], self.boundary[:, 1]),
                self.n_vertices,
            )
        )
        if not np.array_equal(boundary_keys, keys[counts == 1]):
            raise ValueError("Every boundary edge must carry exactly one side tag.")

    @property
    def tags(self) -> Tuple[int, ...]:
        """Side tags present on the boundary."""
        return tuple(int(tag) for tag in np.unique(self.boundary[:, 2]))

    def tagged_vertices(self, tags) -> np.ndarray:
        """Vertices on edges with any of the given tags."""
        mask = np.isin(self.boundary[:, 2], list(tags))
        return np.unique(self.boundary[mask, :2])

    def side_lengths(self) -> dict:
        """Total edge length per side tag."""
        lengths = np.linalg.norm(
            self.vertices[self.boundary[:, 0]] - self.vertices[self.boundary[:, 1]], axis=1
        )
        return {tag: float(lengths[self.boundary[:, 2] == tag].sum()) for tag in self.tags}

    def refine(self) -> "TriangleMesh":
        """Uniform 4-way midpoint refinement."""
        nv = self.n_vertices
        lo, hi = self._cell_edges()
        keys, cell_to_edge = np.unique(_edge_keys(lo.ravel(), hi.ravel(), nv), return_inverse=True)
        cell_to_edge = cell_to_edge.reshape(-1, 3) + nv
        parents = np.stack([keys // nv, keys % nv], axis=1)
        vertices = np.vstack([self.vertices, 0.5 * self.vertices[parents].sum(axis=1)])

        v0, v1, v2 = self.cells.T
        m01, m12, m20 = cell_to_edge.T
        cells = np.vstack(
            [
                np.stack([v0, m01, m20], axis=1),
                np.stack([v1, m12, m01], axis=1),
                np.stack([v2, m20, m12], axis=1),
                np.stack([m01, m12, m20], axis=1),
            ]
        )

        a, b, tag = self.boundary.T
        mid = nv + np.searchsorted(keys, _edge_keys(np.minimum(a, b), np.maximum(a, b), nv))
        boundary = np.vstack(
            [np.stack([a, mid, tag], axis=1), np.stack([mid, b, tag], axis=1)]
        )
        return TriangleMesh(vertices, cells, boundary, self.domain, self.level + 1, parents)

    def prolong(self, coarse_values: np.ndarray) -> np.ndarray:
        """Linear interpolation of values on the previous level to this mesh."""
        if self.parents is None:
            raise ValueError("Mesh has no parent level to prolong from.")
        coarse_values = np.asarray(coarse_values, dtype=float)
        n_coarse = self.n_vertices - len(self.parents)
        if coarse_values.shape[0] != n_coarse:
            raise ValueError(
                f"Expected {n_coarse} coarse values, got {coarse_values.shape[0]}."
            )
        midpoints = 0.5 * (coarse_values[self.parents[:, 0]] + coarse_values[self.parents[:, 1]])
        return np.concatenate([coarse_values, midpoints], axis=0)

    def symmetry_permutation(self, reflection: Reflection, tolerance: float = 1e-9) -> np.ndarray:
        """perm with vertices[perm[i]] == reflection(vertices[i])."""
        distances, perm = cKDTree(self.vertices).query(reflection(self.vertices))
        if np.max(distances) > tolerance:
            raise ValueError(f"Mesh is not invariant under reflection {reflection.name}.")
        return perm

    def dump(self, path: str):
        """Writes the 'nv nc nb' text format."""
        with open(path, "w", encoding="utf-8") as file:
            file.write(f"{self.n_vertices} {self.n_cells} {len(self.boundary)}\n")
            for x, y in self.vertices:
                file.write(f"{float(x)!r} {float(y)!r}\n")
            for i, j, k in self.cells:
                file.write(f"{i} {j} {k}\n")
            for i, j, tag in self.boundary:
                file.write(f"{i} {j} {tag}\n")

    @classmethod
    def load(cls, path: str, domain: str = "", level: int = 0) -> "TriangleMesh":
        """Reads the 'nv nc nb' text format."""
        with open(path, "r", encoding="utf-8") as file:
            lines = [line.split() for line in file if line.strip()]
        n_vertices, n_cells, n_boundary = (int(v) for v in lines[0])
        body = lines[1:]
        if len(body) != n_vertices + n_cells + n_boundary:
            raise ValueError(f"Mesh file {path} does not match its header.")
        vertices = [[float(v) for v in row] for row in body[:n_vertices]]
        cells = [[int(v) for v in row] for row in body[n_vertices : n_vertices + n_cells]]
        boundary = [[int(v) for v in row] for row in body[n_vertices + n_cells :]]
        return cls(vertices, cells, boundary, domain, level)

    def __repr__(self):
        return (
            f"TriangleMesh(domain='{self.domain}', level={self.level}, "
            f"vertices={self.n_vertices}, cells={self.n_cells})"
        )


def _fan_mesh(corners: np.ndarray, center: np.ndarray, domain: str) -> TriangleMesh:
    """Cells joining each polygon side to an interior point; side k is tagged k + 1."""
    count = len(corners)
    vertices = np.vstack([corners, center])
    cells = [[k, (k + 1) % count, count] for k in range(count)]
    boundary = [[k, (k + 1) % count, k + 1] for k in range(count)]
    return TriangleMesh(vertices, cells, boundary, domain)


def _level_zero(domain: str) -> TriangleMesh:
    if domain == "Th":
        # tags follow decreasing side length: hypotenuse, long leg, short leg
        boundary = [[2, 0, 1], [0, 1, 2], [1, 2, 3]]
        return TriangleMesh(HEMIEQUILATERAL.vertices, [[0, 1, 2]], boundary, "Th")
    if domain == "Te":
        # bottom, left, then the side lying on the short diagonal
        boundary = [[0, 1, 1], [2, 0, 2], [1, 2, 3]]
        return TriangleMesh(EQUILATERAL.vertices, [[0, 1, 2]], boundary, "Te")
    if domain == "Rhombus":
        return _fan_mesh(RHOMBUS.vertices, RHOMBUS_CENTER, "Rhombus")
    if domain == "Square":
        return _fan_mesh(UNIT_SQUARE.vertices, np.array([0.5, 0.5]), "Square")
    raise ValueError(f"Unknown mesh domain '{domain}', expected one of {MESH_DOMAINS}.")


def reference_mesh(domain: str, level: int) -> TriangleMesh:
    """Reference mesh of a domain refined ``level`` times.

    Args:
        domain: one of Th, Te, Rhombus, Square.
        level: number of uniform refinements, at most 9.

    Returns:
        TriangleMesh with 4**level times the level-0 cell count.
    """
    if not 0 <= level <= MAX_LEVEL:
        raise ValueError(f"Mesh level must be in 0..{MAX_LEVEL}, got {level}.")
    mesh = _level_zero(domain)
    for _ in range(level):
        mesh = mesh.refine()
    Log.log(f"{mesh}")
    return mesh
