# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""SVG rendering of nodal partitions."""

from typing import Optional

import matplotlib

matplotlib.use("Agg")

# pylint: disable=wrong-import-position
import numpy as np
from matplotlib.figure import Figure

POSITIVE_COLOR = "#d95f02"
NEGATIVE_COLOR = "#1b9e77"
BAND_COLOR = "#9e9e9e"
# fixed ids and no timestamp keep the bytes reproducible
SVG_SETTINGS = {"svg.hashsalt": "extended-courant", "svg.fonttype": "none"}


def emit_svg(partition, outline: np.ndarray, path: str, title: Optional[str] = None) -> str:
    """Draws each nodal domain by sign, the zero band in gray and the domain outline.

    Args:
        partition (NodalPartition): counted field.
        outline: closed polygon vertex loop.
        path: output file.
        title: optional caption.

    Returns:
        path
    """
    field = partition.field
    labels = partition.labels
    signs = partition.component_signs()
    figure = Figure(figsize=(6, 6 * len(field.y) / len(field.x) + 0.3))
    axes = figure.add_subplot(1, 1, 1)
    with matplotlib.rc_context(SVG_SETTINGS):
        for label, sign in enumerate(signs, start=1):
            axes.contourf(
                field.x,
                field.y,
                (labels == label).astype(float),
                levels=[0.5, 1.5],
                colors=[POSITIVE_COLOR if sign > 0 else NEGATIVE_COLOR],
            )
        if np.any(labels == 0):
            axes.contourf(
                field.x,
                field.y,
                (labels == 0).astype(float),
                levels=[0.5, 1.5],
                colors=[BAND_COLOR],
            )
        axes.plot(outline[:, 0], outline[:, 1], color="black", linewidth=1.0)
        axes.set_aspect("equal")
        axes.set_axis_off()
        if title:
            axes.set_title(title)
        figure.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    return path
