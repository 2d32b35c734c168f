# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Verification results"""

import inspect
import pprint
from collections import OrderedDict
from typing import Any, Dict, Optional

import numpy as np

PASS = "pass"
FAIL = "fail"
VIOLATION_CONFIRMED = "violation_confirmed"
INCONCLUSIVE = "inconclusive"
STATUSES = (PASS, FAIL, VIOLATION_CONFIRMED, INCONCLUSIVE)


def to_plain(value: Any) -> Any:
    """Converts numpy and nested containers to JSON friendly values."""
    if isinstance(value, VerificationResult):
        return value.to_dict()
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


class VerificationResult:
    """Base class for verification results.

    Public, non-callable attributes are the result's fields.
    """

    def _fields(self) -> "OrderedDict[str, Any]":
        result = OrderedDict()
        for name, value in inspect.getmembers(self):
            if (
                not name.startswith("_")
                and not inspect.ismethod(value)
                and not inspect.isfunction(value)
                and hasattr(self, name)
            ):
                result[name] = value
        return result

    def to_dict(self) -> Dict[str, Any]:
        """Fields as plain Python values."""
        return {name: to_plain(value) for name, value in self._fields().items()}

    def __str__(self) -> str:
        return pprint.pformat(dict(self._fields()), indent=4)

    def __repr__(self):
        key_value_pairs = [f"{name}: {value}" for name, value in self._fields().items()]
        return f"{self.__class__.__name__}({key_value_pairs})"


class Verdict(VerificationResult):
    """A named check with its status and supporting details."""

    def __init__(self, check: str, status: str, details: Optional[Dict[str, Any]] = None):
        """
        Args:
            check: name of the check.
            status: one of pass, fail, violation_confirmed, inconclusive.
            details: JSON friendly supporting data.
        """
        if status not in STATUSES:
            raise ValueError(f"Verdict status must be one of {STATUSES}, got '{status}'.")
        self.check = check
        self.status = status
        self.details = to_plain(details or {})

    @classmethod
    def from_bool(cls, check: str, passed: bool, details=None) -> "Verdict":
        """pass or fail."""
        return cls(check, PASS if passed else FAIL, details)

    @property
    def ok(self) -> bool:
        """True for pass and violation_confirmed."""
        return self.status in (PASS, VIOLATION_CONFIRMED)
