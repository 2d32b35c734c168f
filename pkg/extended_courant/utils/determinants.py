# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Determinant helpers shared by the Slater and Liouville constructions."""

import numpy as np


def last_column_cofactors(partial: np.ndarray) -> np.ndarray:
    """Cofactors of the missing last column of a square matrix.

    Args:
        partial: array of shape (k+1, k). Row i holds the i-th function
            evaluated at the k fixed points.

    Returns:
        vector ``c`` of length k+1 such that, for any column ``v``,
        ``det([partial | v]) == c @ v``.
    """
    partial = np.asarray(partial, dtype=float)
    rows, cols = partial.shape
    if rows != cols + 1:
        raise ValueError(f"Expected shape (k+1, k), got {partial.shape}.")
    if cols == 0:
        return np.ones(1)
    cofactors = np.empty(rows)
    for j in range(rows):
        minor = np.delete(partial, j, axis=0)
        # (j + cols) is the parity of (row j, column k) in 0-based indexing
        cofactors[j] = (-1) ** (j + cols) * np.linalg.det(minor)
    return cofactors


def vandermonde_product(points: np.ndarray) -> np.ndarray:
    """Product of pairwise differences x_i - x_j over i < j.

    Args:
        points: array of shape (..., n).
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[-1]
    result = np.ones(points.shape[:-1])
    for i in range(n):
        for j in range(i + 1, n):
            result = result * (points[..., i] - points[..., j])
    return result
