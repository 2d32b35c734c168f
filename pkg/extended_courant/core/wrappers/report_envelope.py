# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Report envelope written by every command."""

import datetime
import os
from typing import Dict, List, Optional

from extended_courant.utils.report_io import dumps, write_json
from extended_courant.utils.verification_result import (
    PASS,
    VIOLATION_CONFIRMED,
    Verdict,
    VerificationResult,
)

SCHEMA_VERSION = "1"


class ReportEnvelope(VerificationResult):
    """Verdicts of one command run with the configuration that produced them.

    Attr:
        schema_version (str): always "1".
        command (str): the command run.
        config (dict): configuration echo.
        verdicts (list): Verdict objects in execution order.
        timings (dict): seconds per logged section.
        artifacts (list): files written besides the report.
    """

    def __init__(
        self,
        command: str,
        config: Dict,
        verdicts: Optional[List[Verdict]] = None,
        timings: Optional[Dict[str, float]] = None,
        artifacts: Optional[List[str]] = None,
    ):
        self.schema_version = SCHEMA_VERSION
        self.command = command
        self.config = config
        self.verdicts = list(verdicts or [])
        self.timings = dict(timings or {})
        self.artifacts = list(artifacts or [])

    @property
    def exit_code(self) -> int:
        """0 when every verdict passed or confirmed a violation, else 1."""
        return 0 if all(v.status in (PASS, VIOLATION_CONFIRMED) for v in self.verdicts) else 1

    def verdicts_json(self) -> str:
        """Deterministic JSON of the verdicts alone."""
        return dumps([verdict.to_dict() for verdict in self.verdicts])

    def write(self, out_dir: str) -> str:
        """Writes ``<command>-<timestamp>.json`` without overwriting earlier reports."""
        os.makedirs(out_dir, exist_ok=True)
        stamp = datetime.datetime.now(datetime.timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
        path = os.path.join(out_dir, f"{self.command}-{stamp}.json")
        suffix = 1
        while os.path.exists(path):
            path = os.path.join(out_dir, f"{self.command}-{stamp}-{suffix}.json")
            suffix += 1
        return write_json(path, self.to_dict())
