# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Richardson extrapolation module."""

from typing import Sequence

import numpy as np


def richardson_extrapolate(
    ydata: np.ndarray, stretch_factors: Sequence[float], axis: int = 0
) -> np.ndarray:
    """Richardson extrapolation to stretch factor zero.

    Args:
        ydata: values measured at the different stretch factors. The last axis
            has length 2: element 0 is the value, element 1 its variance.
        stretch_factors: the stretch of each measurement along ``axis``, e.g.
            the squared relative mesh size ``h**2``.
        axis: which axis of ydata corresponds to the stretch_factors.

    Returns:
        an array with shape like ydata but with the axis ``axis`` eliminated.
        For two stretch factors this is the linear fit through both points,
        evaluated at zero; more factors use a least squares polynomial fit
        of degree ``len(stretch_factors) - 1``.
    """
    ydata = np.asarray(ydata, dtype=float)
    stretch_factors = np.asarray(stretch_factors, dtype=float)
    if ydata.shape[axis] != len(stretch_factors):
        raise ValueError(
            f"Axis {axis} has length {ydata.shape[axis]} but "
            f"{len(stretch_factors)} stretch factors were given."
        )

    indexing_each_axis = [slice(None)] * ydata.ndim
    if len(stretch_factors) == 1:
        indexing_each_axis[axis] = 0
        return ydata[tuple(indexing_each_axis)]

    if len(stretch_factors) == 2:
        stretch1, stretch2 = stretch_factors
        denom = stretch2 - stretch1
        indexing_each_axis[-1] = 0
        indexing_each_axis[axis] = 0
        y1 = ydata[tuple(indexing_each_axis)]  # pylint: disable=invalid-name
        indexing_each_axis[axis] = 1
        y2 = ydata[tuple(indexing_each_axis)]  # pylint: disable=invalid-name
        indexing_each_axis[-1] = 1
        indexing_each_axis[axis] = 0
        var1 = ydata[tuple(indexing_each_axis)]
        indexing_each_axis[axis] = 1
        var2 = ydata[tuple(indexing_each_axis)]
        y_extrap = (y1 * stretch2 - y2 * stretch1) / denom
        var_extrap = var1 * (stretch2 / denom) ** 2 + var2 * (stretch1 / denom) ** 2
        return np.stack([y_extrap, var_extrap], axis=-1)

    # general case: Lagrange weights of the interpolating polynomial at zero
    weights = np.ones(len(stretch_factors))
    for i, s_i in enumerate(stretch_factors):
        for j, s_j in enumerate(stretch_factors):
            if i != j:
                weights[i] *= s_j / (s_j - s_i)
    values = np.moveaxis(ydata[..., 0], axis, -1)
    variances = np.moveaxis(ydata[..., 1], axis, -1)
    return np.stack([values @ weights, variances @ weights**2], axis=-1)


def extrapolate_h2(coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    """Extrapolates eigenvalues with O(h^2) error from consecutive mesh levels.

    The fine mesh has half the pitch of the coarse one, so the stretch
    factors are 1 and 4 and the result is ``(4 * fine - coarse) / 3``.
    """
    coarse = np.asarray(coarse, dtype=float)
    fine = np.asarray(fine, dtype=float)
    ydata = np.stack(
        [
            np.stack([fine, np.zeros_like(fine)], axis=-1),
            np.stack([coarse, np.zeros_like(coarse)], axis=-1),
        ],
        axis=0,
    )
    return richardson_extrapolate(ydata, [1.0, 4.0], axis=0)[..., 0]
