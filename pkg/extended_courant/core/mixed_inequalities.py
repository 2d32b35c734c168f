# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Inequalities between eigenvalues of the eight hemiequilateral mixed problems."""

import itertools
from typing import Dict, List, Mapping, Tuple, Union

import numpy as np

from extended_courant.core.triangle_spectra import MixedProblemId, MixedSpectrum
from extended_courant.utils.log import Log
from extended_courant.utils.verification_result import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    VerificationResult,
)

HOLDS = "holds"
VIOLATED = "violated"
UNRESOLVED = "inconclusive"
MAX_DEPTH = 4
EQUALITY_TOLERANCE = 1e-4

ALL_PROBLEMS = tuple("".join(letters) for letters in itertools.product("nd", repeat=3))

# strict chains in the index i, one letter triple per link
MONOTONE_CHAINS: Tuple[Tuple[str, ...], ...] = (
    ("nnn", "ndn", "ndd"),
    ("nnn", "nnd", "ndd"),
    ("dnn", "dnd", "ddd"),
    ("dnn", "ddn", "ddd"),
)

# first eigenvalues across boundary conditions; '=' links are identities
FIRST_EIGENVALUE_CHAIN: Tuple[Tuple[str, int], ...] = (
    ("nnn", 1),
    ("nnd", 1),
    ("ndn", 1),
    ("dnn", 1),
    ("ndd", 1),
    ("dnd", 1),
    ("ddn", 1),
    ("ddd", 1),
)
FIRST_EIGENVALUE_IDENTITIES = ((("ndn", 1), ("nnn", 2)),)


class Comparison(VerificationResult):
    """One checked relation between two eigenvalues."""

    def __init__(self, left: str, right: str, relation, left_value, right_value, error):
        self.left = left
        self.right = right
        self.relation = relation
        self.left_value = float(left_value)
        self.right_value = float(right_value)
        self.error = float(error)
        self.margin = float(right_value - left_value)
        if relation == "<":
            if self.margin > self.error:
                self.status = HOLDS
            elif self.margin < -self.error:
                self.status = VIOLATED
            else:
                self.status = UNRESOLVED
        else:
            scale = max(1.0, abs(left_value), abs(right_value))
            tolerance = max(self.error, EQUALITY_TOLERANCE * scale)
            self.status = HOLDS if abs(self.margin) <= tolerance else VIOLATED


class InequalityVerdict(VerificationResult):
    """All comparisons with an overall status."""

    def __init__(self, comparisons: List[Comparison]):
        self.comparisons = comparisons

    @property
    def violations(self) -> List[str]:
        """Comparisons that fail beyond their error estimates."""
        return [
            f"{c.left} {c.relation} {c.right}" for c in self.comparisons if c.status == VIOLATED
        ]

    @property
    def unresolved(self) -> List[str]:
        """Comparisons whose margin is below the error estimate."""
        return [
            f"{c.left} {c.relation} {c.right}" for c in self.comparisons if c.status == UNRESOLVED
        ]

    @property
    def status(self) -> str:
        """fail on any violation, inconclusive on any unresolved margin, else pass."""
        if self.violations:
            return FAIL
        if self.unresolved:
            return INCONCLUSIVE
        return PASS


def _column(column) -> Tuple[np.ndarray, np.ndarray]:
    if isinstance(column, MixedSpectrum):
        values = column.values()
        return values, np.zeros(len(values))
    values = np.asarray(column.best_values(), dtype=float)
    errors = column.error_estimates
    return values, (np.zeros(len(values)) if errors is None else np.asarray(errors, dtype=float))


def verify_inequalities(
    columns: Mapping[Union[MixedProblemId, str], object], i_max: int = MAX_DEPTH
) -> InequalityVerdict:
    """Checks the monotone chains for i = 1..i_max and the first eigenvalue chain.

    Args:
        columns: all eight hemiequilateral problems, closed form spectra or
            extrapolated solver results.
        i_max: deepest index checked, at most 4.

    Returns:
        InequalityVerdict; a margin below the combined error estimate is
        reported as inconclusive, never as a violation.
    """
    if not 1 <= i_max <= MAX_DEPTH:
        raise ValueError(f"i_max must be in 1..{MAX_DEPTH}, got {i_max}.")
    table: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}
    for key, column in columns.items():
        problem = MixedProblemId.parse(key) if isinstance(key, str) else key
        if problem.domain != "Th":
            raise ValueError(f"Inequalities concern hemiequilateral problems, got {problem}.")
        table[problem.sides] = _column(column)
    missing = sorted(set(ALL_PROBLEMS) - set(table))
    if missing:
        raise ValueError(f"Missing columns {missing}.")
    for sides, (values, _) in table.items():
        if len(values) < i_max:
            raise ValueError(f"Column {sides} has {len(values)} values, need {i_max}.")

    def compare(left, right, relation):
        left_values, left_errors = table[left[0]]
        right_values, right_errors = table[right[0]]
        return Comparison(
            f"{left[0]}_{left[1]}",
            f"{right[0]}_{right[1]}",
            relation,
            left_values[left[1] - 1],
            right_values[right[1] - 1],
            left_errors[left[1] - 1] + right_errors[right[1] - 1],
        )

    comparisons = []
    for chain in MONOTONE_CHAINS:
        for i in range(1, i_max + 1):
            for lower, upper in zip(chain, chain[1:]):
                comparisons.append(compare((lower, i), (upper, i), "<"))
    for lower, upper in zip(FIRST_EIGENVALUE_CHAIN, FIRST_EIGENVALUE_CHAIN[1:]):
        comparisons.append(compare(lower, upper, "<"))
    for left, right in FIRST_EIGENVALUE_IDENTITIES:
        comparisons.append(compare(left, right, "="))
    ground = table["nnn"][0][0]
    comparisons.append(Comparison("0", "nnn_1", "=", 0.0, ground, table["nnn"][1][0]))

    verdict = InequalityVerdict(comparisons)
    Log.log(f"Inequalities: {len(comparisons)} checked, status {verdict.status}")
    return verdict
