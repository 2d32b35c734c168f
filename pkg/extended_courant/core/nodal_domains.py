# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Nodal domain counting on sampled fields."""

import functools
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from matplotlib import tri as mtri
from scipy import ndimage
from scipy.spatial import cKDTree

from extended_courant.core.geometry import Polygon, polygon
from extended_courant.exceptions import IdenticallyZeroError, ResolutionError
from extended_courant.utils.log import Log

DEFAULT_RESOLUTION = 801
INSIDE_MARGIN = 1e-9
# zero band half width in units of h * |grad f|
BAND_FACTOR = 3.0
RESOLUTION_FACTOR = 0.1
# sign components are 4-connected
FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


@functools.lru_cache(maxsize=8)
def _grid(domain: Polygon, resolution: int):
    """Pitch, axes, coordinates and inside mask of a sampling grid."""
    xmin, xmax, ymin, ymax = domain.bounding_box()
    pitch = max(xmax - xmin, ymax - ymin) / (resolution - 1)
    x = xmin + pitch * np.arange(int(round((xmax - xmin) / pitch)) + 1)
    y = ymin + pitch * np.arange(int(round((ymax - ymin) / pitch)) + 1)
    grid_x, grid_y = np.meshgrid(x, y)
    mask = domain.contains(grid_x, grid_y, INSIDE_MARGIN)
    for array in (x, y, grid_x, grid_y, mask):
        array.setflags(write=False)
    return pitch, x, y, grid_x, grid_y, mask


class SampledField:
    """Function values on the grid points strictly inside a polygon.

    The grid covers the polygon's bounding box with ``resolution`` points
    along its longest side.

    Attr:
        domain (Polygon): sampled polygon.
        resolution (int): points along the longest bounding box side.
        pitch (float): grid spacing h.
        x (np.ndarray): grid abscissae.
        y (np.ndarray): grid ordinates.
        mask (np.ndarray): (ny, nx) points inside the domain.
        values (np.ndarray): (ny, nx) samples, zero outside the mask.
    """

    def __init__(
        self,
        domain: Union[Polygon, str],
        evaluator: Callable,
        resolution: int = DEFAULT_RESOLUTION,
        values: Optional[np.ndarray] = None,
        components=None,
    ):
        if resolution < 3:
            raise ValueError(f"Resolution must be at least 3, got {resolution}.")
        self.domain = polygon(domain) if isinstance(domain, str) else domain
        self.evaluator = evaluator
        self.resolution = resolution
        self.pitch, self.x, self.y, grid_x, grid_y, self.mask = _grid(self.domain, resolution)
        if values is None:
            values = np.zeros(self.mask.shape)
            values[self.mask] = np.asarray(
                evaluator(grid_x[self.mask], grid_y[self.mask]), dtype=float
            )
        self.values = values
        if not np.all(np.isfinite(self.values[self.mask])):
            raise ValueError("Sampled values must be finite.")
        self._components = components
        self._refined: Optional["SampledField"] = None

    @classmethod
    def from_function(
        cls, domain: Union[Polygon, str], func: Callable, resolution: int = DEFAULT_RESOLUTION
    ) -> "SampledField":
        """Samples a vectorized f(x, y)."""
        return cls(domain, func, resolution)

    @classmethod
    def from_fem(
        cls,
        domain: Union[Polygon, str],
        vertices: np.ndarray,
        cells: np.ndarray,
        vertex_values: np.ndarray,
        resolution: int = DEFAULT_RESOLUTION,
    ) -> "SampledField":
        """Samples a piecewise linear field given by its vertex values."""
        triangulation = mtri.Triangulation(vertices[:, 0], vertices[:, 1], cells)
        interpolator = mtri.LinearTriInterpolator(triangulation, vertex_values)
        nearest = cKDTree(vertices)

        def evaluator(x, y):
            values = np.ma.filled(interpolator(x, y), np.nan)
            missing = np.isnan(values)
            if np.any(missing):
                # points on the boundary within rounding of the triangulation
                _, index = nearest.query(np.stack([x[missing], y[missing]], axis=1))
                values[missing] = vertex_values[index]
            return values

        return cls(domain, evaluator, resolution)

    @classmethod
    def combine(
        cls, fields: Sequence["SampledField"], coefficients: Sequence[float]
    ) -> "SampledField":
        """Linear combination of fields sampled on one grid."""
        first = fields[0]
        for field in fields[1:]:
            if field.domain is not first.domain or field.resolution != first.resolution:
                raise ValueError("Combined fields must share domain and resolution.")
        coefficients = [float(c) for c in coefficients]

        def evaluator(x, y):
            return sum(c * f.evaluator(x, y) for c, f in zip(coefficients, fields))

        values = sum(c * f.values for c, f in zip(coefficients, fields))
        return cls(
            first.domain,
            evaluator,
            first.resolution,
            values=values,
            components=(list(fields), coefficients),
        )

    def refined(self) -> "SampledField":
        """Same field at pitch h / 2."""
        if self._refined is None:
            if self._components is not None:
                fields, coefficients = self._components
                self._refined = SampledField.combine([f.refined() for f in fields], coefficients)
            else:
                self._refined = SampledField(
                    self.domain, self.evaluator, 2 * self.resolution - 1
                )
        return self._refined

    def scaled(self, factor: float) -> "SampledField":
        """factor * field."""
        return SampledField.combine([self], [factor])

    @property
    def shape(self):
        """(ny, nx)."""
        return self.mask.shape

    def __repr__(self):
        return (
            f"SampledField({self.domain.name}, {self.shape[1]}x{self.shape[0]}, "
            f"pitch={self.pitch:.3g})"
        )


class NodalPartition:
    """Sign components of a sampled field.

    Attr:
        labels (np.ndarray): -1 outside, 0 in the zero band, 1..beta0 per component.
        beta0 (int): number of nodal domains.
        positive (int): components where the field is positive.
        negative (int): components where the field is negative.
        uncertain_fraction (float): zero band share of the inside points.
        field (SampledField): the counted field.
    """

    def __init__(self, labels, positive, negative, uncertain_fraction, field):
        self.labels = labels
        self.positive = positive
        self.negative = negative
        self.beta0 = positive + negative
        self.uncertain_fraction = uncertain_fraction
        self.field = field

    def component_signs(self) -> List[int]:
        """+1 or -1 per component label 1..beta0."""
        return [1] * self.positive + [-1] * self.negative

    def to_pgm(self, path: str):
        """Writes the labels as an ASCII graymap, 0 outside and 1 on the zero band."""
        raster = np.flipud(self.labels + 1)
        height, width = raster.shape
        with open(path, "w", encoding="ascii") as file:
            file.write(f"P2\n{width} {height}\n{max(int(raster.max()), 1)}\n")
            for row in raster:
                file.write(" ".join(str(int(v)) for v in row) + "\n")

    def __repr__(self):
        return (
            f"NodalPartition(beta0={self.beta0}, positive={self.positive}, "
            f"negative={self.negative}, uncertain_fraction={self.uncertain_fraction:.4f})"
        )


def _neighbour_spread(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Largest |difference| to an inside 4-neighbour along each axis, shape (2, ...)."""
    spread = np.zeros((2,) + values.shape)
    for axis in (0, 1):
        step = np.abs(np.diff(values, axis=axis))
        both = mask[:-1, :] & mask[1:, :] if axis == 0 else mask[:, :-1] & mask[:, 1:]
        step = np.where(both, step, 0.0)
        if axis == 0:
            spread[0, :-1, :] = np.maximum(spread[0, :-1, :], step)
            spread[0, 1:, :] = np.maximum(spread[0, 1:, :], step)
        else:
            spread[1, :, :-1] = np.maximum(spread[1, :, :-1], step)
            spread[1, :, 1:] = np.maximum(spread[1, :, 1:], step)
    return np.where(mask, spread, 0.0)


def partition(field: SampledField) -> NodalPartition:
    """Sign components of one grid, without the refinement check."""
    inside = field.values[field.mask]
    scale = float(np.max(np.abs(inside))) if inside.size else 0.0
    if scale == 0.0:
        raise IdenticallyZeroError(f"{field} vanishes identically.")
    spread = _neighbour_spread(field.values, field.mask)
    # h * |grad f| from the axis differences
    gradient_step = np.hypot(spread[0], spread[1])
    if np.max(gradient_step) >= RESOLUTION_FACTOR * scale:
        raise ResolutionError(
            f"Grid pitch {field.pitch:.3g} too coarse: h |grad f| reaches "
            f"{np.max(gradient_step) / scale:.3f} of max |f|."
        )
    threshold = BAND_FACTOR * ndimage.maximum_filter(gradient_step, size=3)
    band = field.mask & (np.abs(field.values) < threshold)
    positive_mask = field.mask & ~band & (field.values > 0)
    negative_mask = field.mask & ~band & (field.values < 0)
    positive_labels, positive = ndimage.label(positive_mask, structure=FOUR_CONNECTED)
    negative_labels, negative = ndimage.label(negative_mask, structure=FOUR_CONNECTED)

    labels = np.full(field.shape, -1, dtype=np.int64)
    labels[field.mask] = 0
    labels[positive_mask] = positive_labels[positive_mask]
    labels[negative_mask] = positive + negative_labels[negative_mask]
    uncertain = float(band.sum()) / float(field.mask.sum())
    return NodalPartition(labels, int(positive), int(negative), uncertain, field)


def count_nodal_domains(field: SampledField, check_refinement: bool = True) -> NodalPartition:
    """Counts nodal domains; the count must agree with a recount at pitch h / 2.

    Args:
        field: sampled field.
        check_refinement: recount on the refined grid.

    Returns:
        NodalPartition on the given grid.
    """
    result = partition(field)
    if check_refinement:
        finer = partition(field.refined())
        if finer.beta0 != result.beta0:
            raise ResolutionError(
                f"Nodal count {result.beta0} at pitch {field.pitch:.3g} disagrees with "
                f"{finer.beta0} at pitch {field.pitch / 2:.3g}."
            )
        # the count is certified at h / 2
        result.uncertain_fraction = finer.uncertain_fraction
    Log.log(f"{field}: {result}")
    return result


def certify_band(
    field: SampledField, beta0: int, target: float, halvings: int = 1
) -> Optional[float]:
    """Zero band share at pitches h / 4, h / 8, ... until it drops below ``target``.

    The count must stay ``beta0`` on every finer grid, else ResolutionError.
    Returns the last share, or None when ``halvings`` is 0.
    """
    finer = field.refined()
    fraction = None
    for _ in range(halvings):
        finer = finer.refined()
        counted = partition(finer)
        if counted.beta0 != beta0:
            raise ResolutionError(
                f"Nodal count {beta0} disagrees with {counted.beta0} at pitch {finer.pitch:.3g}."
            )
        fraction = counted.uncertain_fraction
        Log.log(f"{finer}: zero band share {fraction:.4f}")
        if fraction < target:
            break
    return fraction
