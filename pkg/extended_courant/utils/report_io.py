# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Deterministic JSON and CSV report writing."""

import csv
import json
import math
from typing import Any, Iterable, Sequence

from extended_courant.utils.verification_result import to_plain

SIGNIFICANT_DIGITS = 12


def round_floats(value: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Rounds every float of a nested structure to ``digits`` significant digits.

    NaN and infinities become the strings "nan", "inf" and "-inf".
    """
    value = to_plain(value)
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {key: round_floats(item, digits) for key, item in value.items()}
    if isinstance(value, list):
        return [round_floats(item, digits) for item in value]
    return value


def dumps(payload: Any) -> str:
    """Sorted keys, rounded floats, trailing newline."""
    return json.dumps(round_floats(payload), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_json(path: str, payload: Any) -> str:
    """Writes ``dumps(payload)`` to path."""
    with open(path, "w", encoding="utf-8") as file:
        file.write(dumps(payload))
    return path


def write_rows(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV table with a header row; floats written with repr."""
    with open(path, "w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return path
