# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Polygons and reflections of the equilateral rhombus and its triangles."""

from typing import Dict, Sequence, Tuple

import numpy as np

SQRT3 = np.sqrt(3.0)
RHOMBUS_CENTER = np.array([0.75, SQRT3 / 4])


class Reflection:
    """Reflection across the line through ``point`` with direction ``direction``."""

    def __init__(self, name: str, point: Sequence[float], direction: Sequence[float]):
        direction = np.asarray(direction, dtype=float)
        direction = direction / np.linalg.norm(direction)
        self.name = name
        self.point = np.asarray(point, dtype=float)
        self.direction = direction
        self.matrix = 2 * np.outer(direction, direction) - np.eye(2)

    def __call__(self, points) -> np.ndarray:
        """Reflected points, shape preserved (last axis of length 2)."""
        points = np.asarray(points, dtype=float)
        return self.point + (points - self.point) @ self.matrix.T

    def apply_xy(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        """Reflects coordinate arrays."""
        reflected = self(np.stack([np.asarray(x, float), np.asarray(y, float)], axis=-1))
        return reflected[..., 0], reflected[..., 1]

    def signed_distance(self, x, y) -> np.ndarray:
        """Distance to the mirror line, signed by side."""
        normal = np.array([-self.direction[1], self.direction[0]])
        return (np.asarray(x) - self.point[0]) * normal[0] + (
            np.asarray(y) - self.point[1]
        ) * normal[1]


# long diagonal through the acute vertices, short diagonal through the obtuse ones
DIAGONAL_D = Reflection("D", (0.0, 0.0), (SQRT3 / 2, 0.5))
DIAGONAL_M = Reflection("M", (1.0, 0.0), (-0.5, SQRT3 / 2))


class Polygon:
    """Convex polygon with counterclockwise vertices."""

    def __init__(self, name: str, vertices: Sequence[Sequence[float]]):
        self.name = name
        self.vertices = np.asarray(vertices, dtype=float)
        edges = np.roll(self.vertices, -1, axis=0) - self.vertices
        signed_area = 0.5 * np.sum(
            self.vertices[:, 0] * np.roll(self.vertices[:, 1], -1)
            - np.roll(self.vertices[:, 0], -1) * self.vertices[:, 1]
        )
        if signed_area <= 0:
            raise ValueError(f"Polygon '{name}' must be counterclockwise.")
        self.area = float(signed_area)
        self._normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
        self._normals /= np.linalg.norm(self._normals, axis=1)[:, None]

    def signed_distances(self, x, y) -> np.ndarray:
        """Inward distances to each side, stacked on the last axis."""
        x = np.asarray(x, dtype=float)[..., None]
        y = np.asarray(y, dtype=float)[..., None]
        outward = (x - self.vertices[:, 0]) * self._normals[:, 0] + (
            y - self.vertices[:, 1]
        ) * self._normals[:, 1]
        return -outward

    def contains(self, x, y, margin: float = 0.0) -> np.ndarray:
        """Half-plane test; ``margin > 0`` keeps points strictly inside."""
        return np.all(self.signed_distances(x, y) >= margin, axis=-1)

    def bounding_box(self) -> Tuple[float, float, float, float]:
        """xmin, xmax, ymin, ymax."""
        low = self.vertices.min(axis=0)
        high = self.vertices.max(axis=0)
        return float(low[0]), float(high[0]), float(low[1]), float(high[1])

    def outline(self) -> np.ndarray:
        """Closed vertex loop."""
        return np.vstack([self.vertices, self.vertices[:1]])

    def sample(self, count: int, rng: np.random.Generator, margin: float = 0.0) -> np.ndarray:
        """Uniform random points by rejection in the bounding box."""
        xmin, xmax, ymin, ymax = self.bounding_box()
        points = np.empty((0, 2))
        while len(points) < count:
            batch = rng.uniform([xmin, ymin], [xmax, ymax], size=(2 * count, 2))
            keep = self.contains(batch[:, 0], batch[:, 1], margin)
            points = np.vstack([points, batch[keep]])
        return points[:count]


RHOMBUS = Polygon("rhombus", [(0.0, 0.0), (1.0, 0.0), (1.5, SQRT3 / 2), (0.5, SQRT3 / 2)])
# lower half of the rhombus below the short diagonal
EQUILATERAL = Polygon("Te", [(0.0, 0.0), (1.0, 0.0), (0.5, SQRT3 / 2)])
# sides of lengths 1, sqrt(3)/2, 1/2 in that order starting from the hypotenuse
HEMIEQUILATERAL = Polygon("Th", [(0.0, 0.0), (SQRT3 / 2, 0.0), (SQRT3 / 2, 0.5)])
UNIT_SQUARE = Polygon("square", [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])

POLYGONS: Dict[str, Polygon] = {
    "rhombus": RHOMBUS,
    "te": EQUILATERAL,
    "th": HEMIEQUILATERAL,
    "square": UNIT_SQUARE,
}


def polygon(name: str) -> Polygon:
    """Polygon by case-insensitive name."""
    try:
        return POLYGONS[name.lower()]
    except KeyError as error:
        raise ValueError(f"Unknown domain '{name}', expected one of {list(POLYGONS)}.") from error
