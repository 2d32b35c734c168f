# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Class for configuration settings."""

import json
from typing import Any, Dict, Optional

from extended_courant.utils.log import Log

FORMATS = ("json", "csv", "svg")
MAX_MESH_LEVEL = 9


# pylint: disable=too-many-instance-attributes,too-many-arguments,too-many-locals
class RunConfig:
    """Class for configuration settings.

    Attr:
        command (str or NoneType): Verification to run, filled in by the runner.
        grid (int): Points along the longest side of the nodal counting grid.
        sl_grid (int): Cells of the one dimensional Sturm-Liouville discretization.
        sl_count (int): Number of Sturm-Liouville eigenpairs computed.
        mesh_level (int): Finest finite element mesh level; level - 1 is used for extrapolation.
        tol (float): Relative tolerance under which eigenvalues form one cluster.
        seed (int): Seed of every randomized check.
        out (str): Output directory for reports and artifacts.
        formats (tuple of str): Requested artifact formats among 'json', 'csv', 'svg'.
        sturm_samples (int): Random combinations per boundary condition and potential.
        gelfand_samples (int): Random simplex points for the nonvanishing check.
        collinearity_samples (int): Random vectors b per particle number.
        sweep_points (int): Initial number of coefficients t in a sweep.
        sweep_refinements (int): Maximal number of refinement rounds of a sweep.
        epsilon (float): Fiber scale of the collapsing product.
        d (int): Sphere dimension for the bound calculator.
        k (int): Spherical harmonic degree for the bound calculator.
        eigen_count (int): Eigenpairs per finite element problem.
        inequality_depth (int): Largest index i of the mixed problem inequalities.
    """

    def __init__(
        self,
        command: Optional[str] = None,
        grid=801,
        sl_grid=1024,
        sl_count=8,
        mesh_level=7,
        tol=1e-4,
        seed=0,
        out="reports",
        formats=("json",),
        sturm_samples=500,
        gelfand_samples=10000,
        collinearity_samples=100,
        sweep_points=101,
        sweep_refinements=3,
        epsilon=0.01,
        d=2,
        k=3,
        eigen_count=8,
        inequality_depth=4,
    ):
        """The constructor for the RunConfig class."""
        self.command = command
        self.grid = grid
        self.sl_grid = sl_grid
        self.sl_count = sl_count
        self.mesh_level = mesh_level
        self.tol = tol
        self.seed = seed
        self.out = out
        self.formats = tuple(formats) if formats else ("json",)
        self.sturm_samples = sturm_samples
        self.gelfand_samples = gelfand_samples
        self.collinearity_samples = collinearity_samples
        self.sweep_points = sweep_points
        self.sweep_refinements = sweep_refinements
        self.epsilon = epsilon
        self.d = d
        self.k = k
        self.eigen_count = eigen_count
        self.inequality_depth = inequality_depth
        self.validate()

    @classmethod
    def from_json_file(cls, path: Optional[str] = None, **overrides) -> "RunConfig":
        """Settings from a JSON object file; keyword overrides that are not None win."""
        settings: Dict[str, Any] = {}
        if path:
            with open(path, "r", encoding="utf-8") as file:
                settings = json.load(file)
            if not isinstance(settings, dict):
                raise ValueError(f"Config file {path} must hold a JSON object.")
            unknown = sorted(set(settings) - set(cls().to_dict()))
            if unknown:
                raise ValueError(f"Unknown config keys {unknown} in {path}.")
        settings.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**settings)

    def to_dict(self) -> Dict[str, Any]:
        """Settings echoed into reports."""
        settings = dict(vars(self))
        settings["formats"] = list(self.formats)
        return settings

    def validate(self):
        """Validates the configuration settings."""
        for name in ("tol", "epsilon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}.")

        for name in (
            "grid",
            "sl_grid",
            "sl_count",
            "sturm_samples",
            "gelfand_samples",
            "collinearity_samples",
            "sweep_points",
            "eigen_count",
        ):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value}.")

        if self.grid < 3:
            raise ValueError(f"grid must be at least 3, got {self.grid}.")

        if not isinstance(self.mesh_level, int) or not 1 <= self.mesh_level <= MAX_MESH_LEVEL:
            raise ValueError(f"mesh_level must be in 1..{MAX_MESH_LEVEL}, got {self.mesh_level}.")

        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed}.")

        if self.sweep_refinements < 0:
            raise ValueError(
                f"sweep_refinements must be nonnegative, got {self.sweep_refinements}."
            )

        if not 1 <= self.inequality_depth <= 4:
            raise ValueError(f"inequality_depth must be in 1..4, got {self.inequality_depth}.")

        if self.d < 1 or self.k < 0:
            raise ValueError(f"Sphere bounds need d >= 1 and k >= 0, got d={self.d}, k={self.k}.")

        unknown = [fmt for fmt in self.formats if fmt not in FORMATS]
        if unknown:
            raise ValueError(f"Unknown formats {unknown}, expected a subset of {FORMATS}.")

        Log.log("Configuration settings are valid.")
