# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Exceptions raised by the verification lab."""


class ExtendedCourantError(Exception):
    """Base class for errors raised by this package."""


class CoefficientDomainError(ExtendedCourantError):
    """A coefficient that must be positive was sampled non-positive."""


class ResolutionError(ExtendedCourantError):
    """The sampling grid or mesh cannot resolve the requested quantity."""


class IdenticallyZeroError(ExtendedCourantError):
    """The field vanishes to tolerance at every sample."""


class SimplicityError(ExtendedCourantError):
    """Two interval eigenvalues are closer than the degeneracy tolerance."""


class SpectrumInvariantError(ExtendedCourantError):
    """A computed spectrum violates an oscillation or ordering invariant."""


class MultiplicityResolutionError(ExtendedCourantError):
    """A zero has estimated order above the resolvable cap."""

    def __init__(self, location: float, max_order: int = 3):
        super().__init__(
            f"Zero at x={location:.12g} has order greater than {max_order}; "
            "refine the grid instead of guessing."
        )
        self.location = location
        self.max_order = max_order


class DegeneratePointsError(ExtendedCourantError):
    """A determinant built from the given points is identically zero."""


class SolverAccuracyError(ExtendedCourantError):
    """A quantity that is nonzero in exact arithmetic came out degenerate."""


class UnsupportedProblemError(ExtendedCourantError):
    """The mixed problem has no closed-form spectrum."""


class InconsistentBoundaryError(ExtendedCourantError):
    """Spectra to be merged do not share the outer boundary letter."""


class ConvergenceError(ExtendedCourantError):
    """The iterative eigensolver hit its iteration cap."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class FactorizationError(ExtendedCourantError):
    """Sparse factorization of the shifted operator broke down."""


class PairingError(ExtendedCourantError):
    """Eigenpairs of consecutive mesh levels could not be matched."""


class NoMatchingClusterError(ExtendedCourantError):
    """An eigenvalue does not belong to any cluster of the spectrum."""
