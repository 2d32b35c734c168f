# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Eigenvalue clustering."""

from typing import List, Sequence

import numpy as np


def same_cluster(first: float, second: float, tolerance: float) -> bool:
    """Relative gap test, absolute below magnitude one."""
    scale = max(1.0, abs(first), abs(second))
    return abs(second - first) <= tolerance * scale


def cluster_labels(values: Sequence[float], tolerance: float) -> np.ndarray:
    """Cluster id per entry of a nondecreasing sequence.

    Consecutive values whose relative gap is within ``tolerance`` share a
    cluster.
    """
    values = np.asarray(values, dtype=float)
    if np.any(np.diff(values) < 0):
        raise ValueError("Cluster labels need a nondecreasing sequence.")
    labels = np.zeros(len(values), dtype=int)
    for index in range(1, len(values)):
        joined = same_cluster(values[index - 1], values[index], tolerance)
        labels[index] = labels[index - 1] + (0 if joined else 1)
    return labels


def first_positions(values: Sequence[float], tolerance: float) -> List[int]:
    """1-based position of the first member of each entry's cluster."""
    labels = cluster_labels(values, tolerance)
    positions = []
    for index, label in enumerate(labels):
        if index == 0 or label != labels[index - 1]:
            start = index + 1
        positions.append(start)
    return positions
