# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Named verification commands and the suite that reproduces all of them."""

import math
import os
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from extended_courant.core.courant import (
    INCONCLUSIVE as ECP_INCONCLUSIVE,
    NOT_COLLAPSED,
    VIOLATION,
    courant_sanity,
    default_t_values,
    sphere_bounds,
)
from extended_courant.core.extended_courant_config import RunConfig
from extended_courant.core.finite_elements import solve_mixed_problem, solve_rhombus
from extended_courant.core.geometry import EQUILATERAL, RHOMBUS
from extended_courant.core.mixed_inequalities import ALL_PROBLEMS, verify_inequalities
from extended_courant.core.slater import (
    SlaterBasis,
    collinearity_check,
    hermite_closed_form_check,
    property_p_check,
    sign_change_structure,
    simplex_nonvanishing_check,
    slater_eval,
)
from extended_courant.core.sturm_liouville import (
    BOUNDARIES,
    SLProblem,
    SturmVerdict,
    convergence_ratios,
    liouville_determinant,
    oscillation_check,
    random_combination,
    solve_sl,
    sturm_suite,
    y_ell_recurrence_residual,
    y_ell_zero_report,
)
from extended_courant.core.triangle_spectra import (
    LAMBDA_UNIT,
    enumerate_mixed_spectrum,
    laplacian_residual,
    neumann_boundary_residual,
    phi2_neumann,
)
from extended_courant.core.wrappers import rhombus_experiments as rhombus
from extended_courant.core.wrappers.report_envelope import ReportEnvelope
from extended_courant.exceptions import ExtendedCourantError
from extended_courant.utils.log import Log
from extended_courant.utils.report_io import write_json, write_rows
from extended_courant.utils.svg_plot import emit_svg
from extended_courant.utils.verification_result import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    VIOLATION_CONFIRMED,
    Verdict,
)

SL_PRESETS = ("sine", "mathieu:10")
CONVERGENCE_WINDOW = (3.5, 4.5)
RECURRENCE_TOLERANCE = 1e-6
Y_ELL_SAMPLES = 20
GELFAND_PARTICLES = (2, 3, 4)
HERMITE_PARTICLES = (2, 3, 4, 5)
SLAB_SAMPLES = 10
TRIANGLE_TABLES = {
    "Th:nnn": [0, 1, 3, 4, 7, 9],
    "Th:ndn": [1, 4, 7, 9],
    "Th:dnd": [3, 7, 12, 13, 19, 21],
    "Th:ddd": [7, 13, 19, 21],
}
# first four eigenvalues of the mixed problems without closed form
FEM_REFERENCE = {
    "Th:nnd": (7.16, 37.49, 90.06, 120.87),
    "Th:ndd": (47.63, 110.36, 189.52, 224.68),
}
FEM_REFERENCE_TOLERANCE = 0.01
FEM_CLOSED_FORM_TOLERANCE = 0.005
# cheap levels suffice to place nu_2 below nu_3
COUNTEREXAMPLE_LEVEL = 5
COUNTEREXAMPLE_COUNT = 4
SPHERE_TABLE_DEGREES = range(0, 21)
RESIDUAL_TOLERANCE = 1e-6


def _status_of(verdict: str) -> str:
    """Maps an ECP verdict of an expected violation to a report status."""
    if verdict == VIOLATION:
        return VIOLATION_CONFIRMED
    if verdict == ECP_INCONCLUSIVE:
        return INCONCLUSIVE
    return FAIL


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "-" for c in text.lower()).strip("-")


# pylint: disable=too-many-public-methods
class VerificationRunner:
    """Runs named verifications and collects their verdicts.

    Attr:
        config (RunConfig): run settings.
        verdicts (list): verdicts in execution order.
        artifacts (list): files written besides the report.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.verdicts: List[Verdict] = []
        self.artifacts: List[str] = []
        self._cache: Dict[Tuple, object] = {}
        self._prefix = ""

    @property
    def commands(self) -> Dict[str, Callable[[], None]]:
        """Command name to method, in reproduction order."""
        return {
            "sl1d-verify": self.sl1d_verify,
            "gelfand-verify": self.gelfand_verify,
            "triangle-tables": self.triangle_tables,
            "fem-tables": self.fem_tables,
            "inequalities": self.inequalities,
            "rhombus-neumann-counterexample": self.rhombus_neumann_counterexample,
            "rhombus-neumann-sweep": self.rhombus_neumann_sweep,
            "rhombus-dirichlet-sweep": self.rhombus_dirichlet_sweep,
            "product-lift": self.product_lift,
            "sphere-bounds": self.sphere_bounds,
            "reproduce-all": self.reproduce_all,
        }

    def run(self, command: str) -> ReportEnvelope:
        """Runs one command and writes its report.

        Raises:
            ValueError: unknown command.
        """
        if command not in self.commands:
            raise ValueError(f"Unknown command '{command}', expected one of {list(self.commands)}.")
        Log.reset_timings()
        self.config.command = command
        with Log.section(command):
            self.commands[command]()
        envelope = ReportEnvelope(
            command, self.config.to_dict(), self.verdicts, Log.timings, self.artifacts
        )
        path = envelope.write(self.config.out)
        Log.log(f"Report written to {path}")
        return envelope

    # helpers

    def _record(self, verdict: Verdict) -> Verdict:
        if self._prefix:
            verdict.check = f"{self._prefix}/{verdict.check}"
        self.verdicts.append(verdict)
        Log.log(f"{verdict.check}: {verdict.status}")
        return verdict

    def _guarded(self, check: str, func: Callable[[], Verdict]) -> Optional[Verdict]:
        """Runs a check; package errors become a failed verdict."""
        try:
            return self._record(func())
        except ExtendedCourantError as error:
            return self._record(
                Verdict(check, FAIL, {"error": type(error).__name__, "message": str(error)})
            )

    def _wants(self, fmt: str) -> bool:
        return fmt in self.config.formats

    def _artifact(self, name: str) -> str:
        os.makedirs(self.config.out, exist_ok=True)
        path = os.path.join(self.config.out, name)
        self.artifacts.append(path)
        return path

    def _cached(self, key: Tuple, factory: Callable[[], object]):
        if key not in self._cache:
            self._cache[key] = factory()
        return self._cache[key]

    def _t_values(self) -> np.ndarray:
        return default_t_values(self.config.sweep_points)

    def _neumann_spectrum(self):
        level = min(self.config.mesh_level, COUNTEREXAMPLE_LEVEL)
        return self._cached(
            ("assembled", "n", level),
            lambda: rhombus.assembled_spectrum(
                "n", level, COUNTEREXAMPLE_COUNT, self.config.seed, self.config.tol
            ),
        )

    def _counterexample(self):
        return self._cached(
            ("counterexample", self.config.grid),
            lambda: rhombus.counterexample_rhombus_neumann(
                self._neumann_spectrum(), self.config.grid, self.config.tol
            ),
        )

    def _mixed(self, label: str):
        return self._cached(
            ("mixed", label, self.config.mesh_level),
            lambda: solve_mixed_problem(
                label, self.config.mesh_level, self.config.eigen_count, self.config.seed
            ),
        )

    def _rhombus(self, boundary: str):
        return self._cached(
            ("rhombus", boundary, self.config.mesh_level),
            lambda: solve_rhombus(
                boundary, self.config.mesh_level, self.config.eigen_count, self.config.seed
            ),
        )

    # commands

    def sl1d_verify(self):
        """Sturm bounds, oscillation counts and the Y_ell family in one dimension."""
        config = self.config
        for preset in SL_PRESETS:
            for boundary in BOUNDARIES:
                label = f"{preset} {boundary}"
                problem = SLProblem.from_preset(preset, boundary, 0.0, np.pi)
                spectrum = solve_sl(problem, config.sl_grid, config.sl_count)
                if self._wants("csv"):
                    spectrum.to_csv(self._artifact(f"sl1d-{_slug(label)}.csv"))
                oscillation = oscillation_check(spectrum)
                self._record(
                    Verdict.from_bool(
                        f"oscillation {label}", oscillation.passed, oscillation.to_dict()
                    )
                )
                self._guarded(
                    f"sturm {label}",
                    lambda spectrum=spectrum, label=label: self._sturm_verdict(spectrum, label),
                )
                if boundary == "periodic":
                    self._guarded(
                        f"rolle cascade {label}",
                        lambda spectrum=spectrum, label=label: self._rolle_verdict(
                            spectrum, label
                        ),
                    )
                if boundary == "dirichlet":
                    self._guarded(
                        f"y_ell {label}",
                        lambda spectrum=spectrum, label=label: self._y_ell_verdict(
                            spectrum, label
                        ),
                    )
                    self._guarded(
                        f"liouville {label}",
                        lambda spectrum=spectrum, label=label: self._liouville_verdict(
                            spectrum, label
                        ),
                    )
        problem = SLProblem.from_preset("sine", "dirichlet", 0.0, np.pi)
        ratios = convergence_ratios(problem, config.sl_grid, min(4, config.sl_count))
        low, high = CONVERGENCE_WINDOW
        self._record(
            Verdict.from_bool(
                "convergence sine dirichlet",
                bool(np.all((ratios >= low) & (ratios <= high))),
                {"ratios": ratios},
            )
        )

    def _sturm_verdict(self, spectrum, label: str) -> Verdict:
        suite = sturm_suite(spectrum, self.config.sturm_samples, self.config.seed, label)
        return Verdict.from_bool(f"sturm {label}", suite.passed, suite.to_dict())

    def _y_ell_verdict(self, spectrum, label: str) -> Verdict:
        rng = np.random.default_rng(self.config.seed)
        residuals = []
        failures = []
        for _ in range(Y_ELL_SAMPLES):
            combo = random_combination(rng, spectrum.count)
            for ell in (0, 1, 2):
                residuals.append(y_ell_recurrence_residual(spectrum, combo, ell))
                bounds = SturmVerdict(combo, y_ell_zero_report(spectrum, combo, ell + 1), False)
                if not bounds.passed:
                    failures.append({"ell": ell + 1, **bounds.to_dict()})
        worst = max(residuals)
        return Verdict.from_bool(
            f"y_ell {label}",
            worst < RECURRENCE_TOLERANCE and not failures,
            {"max_recurrence_residual": worst, "bound_failures": failures},
        )

    def _rolle_verdict(self, spectrum, label: str) -> Verdict:
        """On the circle Y_ell keeps at least as many zeros as Y, ell = 1..4."""
        rng = np.random.default_rng(self.config.seed)
        failures = []
        for _ in range(Y_ELL_SAMPLES):
            combo = random_combination(rng, spectrum.count)
            base = y_ell_zero_report(spectrum, combo, 0).zeros_with_multiplicity
            for ell in range(1, 5):
                zeros = y_ell_zero_report(spectrum, combo, ell).zeros_with_multiplicity
                if zeros < base:
                    failures.append(
                        {"combo": repr(combo), "ell": ell, "zeros": zeros, "base": base}
                    )
        return Verdict.from_bool(
            f"rolle cascade {label}",
            not failures,
            {"samples": Y_ELL_SAMPLES, "failures": failures},
        )

    def _liouville_verdict(self, spectrum, label: str) -> Verdict:
        problem = spectrum.problem
        k = min(3, spectrum.count - 1)
        z_points = problem.alpha + problem.length * np.arange(1, k + 1) / (k + 1.5)
        determinant = liouville_determinant(spectrum, z_points)
        return Verdict.from_bool(
            f"liouville {label}",
            determinant.zeros_at_nodes,
            {
                "z_points": determinant.z_points,
                "sign_change_positions": determinant.sign_change_positions,
            },
        )

    def gelfand_verify(self):
        """Slater determinants of sine, Hermite and computed bases."""
        config = self.config
        rng = np.random.default_rng(config.seed)
        self._record(
            Verdict.from_bool(
                "slater value sine-2 at (0.25, 0.5)",
                math.isclose(slater_eval(SlaterBasis.sine(2), (0.25, 0.5)), -2.0, rel_tol=1e-12),
                {"value": slater_eval(SlaterBasis.sine(2), (0.25, 0.5)), "expected": -2.0},
            )
        )
        mathieu = solve_sl(
            SLProblem.from_preset("mathieu:10", "dirichlet", 0.0, np.pi), config.sl_grid, 4
        )
        bases = [SlaterBasis.sine(n) for n in GELFAND_PARTICLES]
        bases.append(SlaterBasis.from_spectrum(mathieu, 3))
        for basis in bases:
            self._guarded(
                f"nonvanishing {basis.name}",
                lambda basis=basis: self._nonvanishing(basis),
            )
            self._guarded(
                f"property p {basis.name}", lambda basis=basis: self._slabs(basis, rng)
            )
        for n in GELFAND_PARTICLES:
            basis = SlaterBasis.sine(n)
            self._guarded(
                f"collinearity {basis.name}",
                lambda basis=basis: self._collinearity(basis, rng),
            )
        for n in HERMITE_PARTICLES:
            verdict = hermite_closed_form_check(n, seed=config.seed)
            self._record(Verdict.from_bool(f"hermite {n}", verdict.holds, verdict.to_dict()))

    def _nonvanishing(self, basis: SlaterBasis) -> Verdict:
        verdict = simplex_nonvanishing_check(basis, self.config.gelfand_samples, self.config.seed)
        return Verdict.from_bool(f"nonvanishing {basis.name}", verdict.holds, verdict.to_dict())

    def _interior_points(self, basis: SlaterBasis, rng: np.random.Generator) -> np.ndarray:
        low, high = basis.window
        while True:
            c = np.sort(rng.uniform(low, high, basis.n - 1))
            gaps = np.diff(np.concatenate([[low], c, [high]]))
            if np.min(gaps) > 0.05 * (high - low):
                return c

    def _slabs(self, basis: SlaterBasis, rng: np.random.Generator) -> Verdict:
        failures = []
        for _ in range(SLAB_SAMPLES):
            c = self._interior_points(basis, rng)
            zeros = property_p_check(basis, c)
            slabs = sign_change_structure(basis, c)
            if not (zeros.holds and slabs.holds):
                failures.append({"property_p": zeros.to_dict(), "slabs": slabs.to_dict()})
        return Verdict.from_bool(
            f"property p {basis.name}",
            not failures,
            {"samples": SLAB_SAMPLES, "failures": failures},
        )

    def _collinearity(self, basis: SlaterBasis, rng: np.random.Generator) -> Verdict:
        verdicts = [
            collinearity_check(basis, rng.standard_normal(basis.n))
            for _ in range(self.config.collinearity_samples)
        ]
        collinear = [v.sin_angle for v in verdicts if not v.trivial]
        return Verdict.from_bool(
            f"collinearity {basis.name}",
            all(v.holds for v in verdicts),
            {
                "samples": len(verdicts),
                "collinear_cases": len(collinear),
                "max_sin_angle": max(collinear, default=0.0),
                "failures": [v.to_dict() for v in verdicts if not v.holds],
            },
        )

    def triangle_tables(self):
        """Closed form hemiequilateral tables and the second equilateral Neumann eigenfunction."""
        for label, expected in TRIANGLE_TABLES.items():
            spectrum = enumerate_mixed_spectrum(label)
            observed = spectrum.multiples()[: len(expected)]
            self._record(
                Verdict.from_bool(
                    f"table {label}",
                    observed == expected,
                    {"observed": observed, "expected": expected},
                )
            )
            if self._wants("csv"):
                spectrum.to_csv(self._artifact(f"triangle-{_slug(label)}.csv"))
        equilateral = enumerate_mixed_spectrum("Te:nnn")
        self._record(
            Verdict.from_bool(
                "equilateral neumann multiplicities",
                equilateral.multiples()[:6] == [0, 1, 1, 3, 4, 4],
                {"multiples": equilateral.multiples()[:6]},
            )
        )
        if self._wants("csv"):
            equilateral.to_csv(self._artifact("triangle-te-nnn.csv"))
            enumerate_mixed_spectrum("Te:ddd").to_csv(self._artifact("triangle-te-ddd.csv"))
        points = EQUILATERAL.sample(200, np.random.default_rng(self.config.seed), margin=0.05)
        eigen_residual = laplacian_residual(phi2_neumann, LAMBDA_UNIT, points)
        boundary_residual = neumann_boundary_residual()
        self._record(
            Verdict.from_bool(
                "phi2 neumann eigenfunction",
                eigen_residual < RESIDUAL_TOLERANCE and boundary_residual < RESIDUAL_TOLERANCE,
                {"laplacian_residual": eigen_residual, "boundary_residual": boundary_residual},
            )
        )

    def fem_tables(self):
        """Extrapolated finite element eigenvalues against tables and closed forms."""
        for label, reference in FEM_REFERENCE.items():
            self._guarded(
                f"fem {label}",
                lambda label=label, reference=reference: self._fem_against(
                    label, np.array(reference), FEM_REFERENCE_TOLERANCE
                ),
            )
        for label in TRIANGLE_TABLES:
            exact = enumerate_mixed_spectrum(label).values()[:4]
            self._guarded(
                f"fem {label}",
                lambda label=label, exact=exact: self._fem_against(
                    label, exact, FEM_CLOSED_FORM_TOLERANCE
                ),
            )

    def _fem_against(self, label: str, reference: np.ndarray, tolerance: float) -> Verdict:
        result = self._mixed(label)
        if self._wants("csv"):
            result.to_csv(self._artifact(f"fem-{_slug(label)}.csv"))
        computed = result.best_values()[: len(reference)]
        # zero reference values are compared absolutely
        deviation = np.abs(computed - reference) / np.maximum(np.abs(reference), 1.0)
        return Verdict.from_bool(
            f"fem {label}",
            bool(np.all(deviation <= tolerance)),
            {
                "computed": computed,
                "reference": reference,
                "relative_deviation": deviation,
                "error_estimates": result.error_estimates[: len(reference)],
            },
        )

    def inequalities(self):
        """Monotone chains and the first eigenvalue chain of the eight mixed problems."""
        columns = {}
        for sides in ALL_PROBLEMS:
            label = f"Th:{sides}"
            if label in TRIANGLE_TABLES:
                columns[label] = enumerate_mixed_spectrum(label)
            else:
                columns[label] = self._mixed(label)
        verdict = verify_inequalities(columns, self.config.inequality_depth)
        self._record(
            Verdict(
                "mixed problem inequalities",
                verdict.status,
                {
                    "checked": len(verdict.comparisons),
                    "violations": verdict.violations,
                    "unresolved": verdict.unresolved,
                    "comparisons": verdict.comparisons,
                },
            )
        )

    def rhombus_neumann_counterexample(self):
        """1 + phi2 has four nodal domains while kappa(nu_3) = 3."""
        spectrum = self._neumann_spectrum()
        if self._wants("csv"):
            spectrum.to_csv(self._artifact("rhombus-neumann-spectrum.csv"))
        ordering = rhombus.neumann_ordering(spectrum)
        self._record(
            Verdict(
                "neumann ordering",
                ordering.status,
                {"comparisons": ordering.comparisons, "values": spectrum.values()[:6]},
            )
        )
        result = self._counterexample()
        report = result.report
        if result.confirmed:
            status = VIOLATION_CONFIRMED
        elif report.verdict == ECP_INCONCLUSIVE:
            status = INCONCLUSIVE
        else:
            # a violation without the expected nodal lines is not the counterexample
            status = FAIL
        self._record(
            Verdict(
                "neumann counterexample",
                status,
                {
                    "beta0": report.beta0,
                    "kappa": report.kappa,
                    "uncertain_fraction": report.uncertain_fraction,
                    "segment_residuals": result.segment_residuals,
                    "probe_crossings": result.probe_crossings,
                    "max_probe_offset": result.max_probe_offset,
                    "eigen_residual": result.eigen_residual,
                    "boundary_residual": result.boundary_residual,
                },
            )
        )
        if self._wants("svg") and report.nodal_partition() is not None:
            emit_svg(
                report.nodal_partition(),
                RHOMBUS.outline(),
                self._artifact("rhombus-neumann-counterexample.svg"),
                title="1 + phi2: four nodal domains",
            )

    def _sweep_verdict(self, check: str, experiment) -> Verdict:
        status = VIOLATION_CONFIRMED if experiment.violation else INCONCLUSIVE
        return Verdict(check, status, experiment.to_dict())

    def _sweep_svg(self, experiment, name: str):
        if (
            self._wants("svg")
            and experiment.nodal_partition() is not None
            and experiment.argmax_t is not None
        ):
            emit_svg(
                experiment.nodal_partition(),
                RHOMBUS.outline(),
                self._artifact(name),
                title=f"{experiment.max_count} nodal domains at t = {experiment.argmax_t:.6g}",
            )

    def _courant_sanity(self, result, grid: int) -> Verdict:
        count = min(6, result.count)
        fields = [rhombus.fem_field(result, i, grid) for i in range(1, count + 1)]
        values = result.best_values()
        reports = courant_sanity(fields, values[:count], values, rhombus.FEM_EQUALITY_TOLERANCE)
        if any(r.verdict == VIOLATION for r in reports):
            status = FAIL
        elif any(r.beta0 is None for r in reports):
            status = INCONCLUSIVE
        else:
            status = PASS
        return Verdict(
            "courant sanity",
            status,
            {"beta0": [r.beta0 for r in reports], "kappa": [r.kappa for r in reports]},
        )

    def rhombus_neumann_sweep(self):
        """Sweeps E(nu_2) + t E(nu_5) for six nodal domains."""
        result = self._rhombus("n")
        if self._wants("csv"):
            result.to_csv(self._artifact("fem-rhombus-neumann.csv"))
        self._guarded("courant sanity", lambda: self._courant_sanity(result, self.config.grid))
        symmetries = result.symmetries
        self._record(
            Verdict.from_bool(
                "nu_2 and nu_5 share the class (+,-)",
                symmetries[1] == (1, -1) and symmetries[4] == (1, -1),
                {"symmetries": [str(s) for s in symmetries]},
            )
        )
        experiment = rhombus.neumann_sweep(
            result, self.config.grid, self._t_values(), self.config.sweep_refinements
        )
        self._record(self._sweep_verdict("neumann sweep", experiment))
        self._sweep_svg(experiment, "rhombus-neumann-sweep.svg")

    def rhombus_dirichlet_sweep(self):
        """Sweeps E(delta_2) + t E(delta_5) and the E(delta_1) + t E(delta_4) control."""
        level = self.config.mesh_level
        spectrum = self._cached(
            ("assembled", "d", level),
            lambda: rhombus.assembled_spectrum(
                "d", level, self.config.eigen_count, self.config.seed, self.config.tol
            ),
        )
        if self._wants("csv"):
            spectrum.to_csv(self._artifact("rhombus-dirichlet-spectrum.csv"))
        ordering = rhombus.dirichlet_ordering(spectrum)
        self._record(
            Verdict(
                "dirichlet ordering",
                ordering.status,
                {"comparisons": ordering.comparisons, "values": spectrum.values()[:8]},
            )
        )
        result = self._rhombus("d")
        if self._wants("csv"):
            result.to_csv(self._artifact("fem-rhombus-dirichlet.csv"))
        members = rhombus.cluster_members(result, 5)
        self._record(
            Verdict.from_bool(
                "finite element delta_5 = delta_6",
                members == [5, 6],
                {"cluster": members, "values": result.best_values()},
            )
        )
        experiment = rhombus.dirichlet_sweep(
            result, self.config.grid, self._t_values(), self.config.sweep_refinements
        )
        self._record(self._sweep_verdict("dirichlet sweep", experiment))
        self._sweep_svg(experiment, "rhombus-dirichlet-sweep.svg")
        control = rhombus.dirichlet_control(result, self.config.grid, self._t_values())
        self._record(
            Verdict.from_bool(
                "dirichlet negative control",
                control.max_count <= rhombus.CONTROL_BOUND,
                {
                    "max_count": control.max_count,
                    "unresolved": len(control.unresolved),
                    "bound": rhombus.CONTROL_BOUND,
                },
            )
        )

    def product_lift(self):
        """Lifts the Neumann counterexample to a collapsing product with a circle."""
        spectrum = self._neumann_spectrum()
        counterexample = self._counterexample()
        epsilon = self.config.epsilon
        lifted = rhombus.product_lift_experiment(
            spectrum, counterexample, epsilon, self.config.tol
        )
        details = {
            "epsilon": epsilon,
            "threshold": lifted.threshold,
            "expected_threshold": 3 / (4 * np.pi),
            "beta0": lifted.beta0,
            "base_kappa": lifted.base_kappa,
            "lifted_kappa": lifted.kappa,
            "verdict": lifted.verdict,
        }
        if lifted.verdict == NOT_COLLAPSED:
            status = PASS
            details["note"] = "not collapsed: epsilon is above the threshold"
        else:
            status = _status_of(lifted.verdict)
        self._record(Verdict("product lift", status, details))
        self._record(
            Verdict.from_bool(
                "lifted spectrum equals pairwise sums",
                rhombus.lifted_matches_pairwise_sums(spectrum.values(), epsilon),
            )
        )

    def sphere_bounds(self):
        """Courant and Leydold bounds for spherical harmonics."""
        config = self.config
        bounds = sphere_bounds(config.d, config.k)
        self._record(Verdict(f"sphere bounds d={config.d} k={config.k}", PASS, bounds.to_dict()))
        mismatches = []
        for k in SPHERE_TABLE_DEGREES:
            table = sphere_bounds(2, k)
            binomial = math.comb(k + 1, 2) + math.comb(k, 2) + 1
            expected_courant = k * k + 1 if k >= 1 else 1
            if (
                table.courant != binomial
                or table.courant != expected_courant
                or table.leydold != k * (k - 1) + 2
            ):
                mismatches.append(table.to_dict())
        self._record(
            Verdict.from_bool(
                "sphere bounds table d=2",
                not mismatches,
                {"degrees": len(SPHERE_TABLE_DEGREES), "mismatches": mismatches},
            )
        )
        if self._wants("csv"):
            write_rows(
                self._artifact("sphere-bounds.csv"),
                ["d", "k", "courant", "leydold", "effective", "eigenvalue", "multiplicity"],
                [
                    (t.d, t.k, t.courant, t.leydold, t.effective, t.eigenvalue, t.multiplicity)
                    for t in (sphere_bounds(config.d, k) for k in SPHERE_TABLE_DEGREES)
                ],
            )

    def reproduce_all(self):
        """Every other command in order; fails iff any of them fails."""
        for command, method in self.commands.items():
            if command == "reproduce-all":
                continue
            self._prefix = command
            with Log.section(command):
                method()
        self._prefix = ""
        if self._wants("json"):
            write_json(
                self._artifact("reproduce-all-verdicts.json"),
                [verdict.to_dict() for verdict in self.verdicts],
            )


COMMANDS = tuple(VerificationRunner(RunConfig()).commands)


def run(command: str, config: Optional[RunConfig] = None) -> Tuple[int, ReportEnvelope]:
    """Runs ``command`` and returns its exit code with the report envelope.

    Args:
        command: one of ``COMMANDS``.
        config: run settings, defaults when omitted.

    Returns:
        (0 when every verdict passed or confirmed a violation else 1, envelope)
    """
    envelope = VerificationRunner(config or RunConfig()).run(command)
    return envelope.exit_code, envelope
