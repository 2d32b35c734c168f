# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Numerical verification of Courant's nodal domain theorem and its extended form."""

from .core.extended_courant_config import RunConfig
from .core.sturm_liouville import SLProblem, solve_sl
from .core.slater import SlaterBasis
from .core.nodal_domains import SampledField, count_nodal_domains
from .core.courant import ecp_check, kappa, sphere_bounds
from .core.triangle_spectra import enumerate_mixed_spectrum
from .core.finite_elements import solve_mixed_problem, solve_rhombus
from .core.wrappers.verification_runner import COMMANDS, VerificationRunner, run
from .utils.log import Log
from .utils.verification_result import Verdict
