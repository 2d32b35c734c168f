# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Logger."""

import time
from contextlib import contextmanager
from typing import Dict


class Log:
    """Logger.

    Messages are printed only when ``Log.VERBOSE`` is set. Elapsed times of
    named sections are accumulated in ``Log.timings``.
    """

    VERBOSE = False
    timings: Dict[str, float] = {}

    @staticmethod
    def log(*args):
        """Log arguments."""
        if Log.VERBOSE:
            print(*args)

    @staticmethod
    @contextmanager
    def section(name: str):
        """Times a named section and logs its boundaries."""
        Log.log(f"[{name}] started")
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            Log.timings[name] = Log.timings.get(name, 0.0) + elapsed
            Log.log(f"[{name}] finished in {elapsed:.3f} s")

    @staticmethod
    def reset_timings():
        """Clears recorded section timings."""
        Log.timings = {}
