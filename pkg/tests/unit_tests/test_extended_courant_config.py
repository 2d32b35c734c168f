# This code is part of extended-courant.
#
# This code is licensed under the Apache License, Version 2.0. You may
# obtain a copy of this license in the LICENSE.txt file in the root directory
# of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.

"""Unit tests for RunConfig."""
import json
import os
import tempfile
import unittest

from extended_courant.core.extended_courant_config import RunConfig


class TestRunConfig(unittest.TestCase):
    """Defaults, validation and JSON files."""

    def test_defaults(self):
        """Default settings are valid and echoed as plain values."""
        settings = RunConfig().to_dict()
        self.assertEqual(settings["mesh_level"], 7)
        self.assertEqual(settings["formats"], ["json"])
        self.assertAlmostEqual(settings["epsilon"], 0.01)

    def test_invalid_settings(self):
        """Out of range settings raise ValueError."""
        for settings in (
            {"tol": 0.0},
            {"grid": 2},
            {"mesh_level": 10},
            {"seed": -1},
            {"inequality_depth": 5},
            {"d": 0},
            {"formats": ("json", "png")},
            {"sl_count": 1.5},
        ):
            with self.assertRaises(ValueError, msg=str(settings)):
                RunConfig(**settings)

    def test_json_file_and_overrides(self):
        """File values apply and non-None overrides win."""
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "config.json")
            with open(path, "w", encoding="utf-8") as file:
                json.dump({"grid": 401, "seed": 7}, file)
            config = RunConfig.from_json_file(path, seed=3, grid=None)
        self.assertEqual(config.grid, 401)
        self.assertEqual(config.seed, 3)

    def test_unknown_keys(self):
        """Unknown keys and non-object files are refused."""
        with tempfile.TemporaryDirectory() as folder:
            path = os.path.join(folder, "config.json")
            with open(path, "w", encoding="utf-8") as file:
                json.dump({"gird": 401}, file)
            with self.assertRaises(ValueError):
                RunConfig.from_json_file(path)
            with open(path, "w", encoding="utf-8") as file:
                json.dump([1, 2], file)
            with self.assertRaises(ValueError):
                RunConfig.from_json_file(path)


if __name__ == "__main__":
    unittest.main()
