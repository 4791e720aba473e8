import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import config
from equations import ParamKind


class TestSettings(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()
        config.settings.reload()

    def write_config(self, text):
        path = self.tmp / "pnegprep.toml"
        path.write_text(text, encoding="utf-8")
        return str(path)

    def test_singleton(self):
        self.assertIs(config.Settings(), config.settings)

    def test_toml_sections(self):
        path = self.write_config('[solver]\nmax_iterations = 40\nmultistart_count = 3\n\n'
                                 '[run]\nparam = "entries"\nunitarity_weight = 2.5\njobs = 2\n')
        with patch.dict(os.environ, {config.CONFIG_ENV: path}):
            s = config.settings.reload()
        opts = s.solver_options()
        self.assertEqual(opts.max_iterations, 40)
        self.assertEqual(opts.multistart_count, 3)
        param = s.parametrization()
        self.assertEqual(param.kind, ParamKind.ENTRIES)
        self.assertEqual(param.unitarity_weight, 2.5)
        self.assertEqual(s.get_status()["source"], path)
        self.assertEqual(s.run["jobs"], 2)

    def test_flags_override_file(self):
        path = self.write_config('[solver]\nmax_iterations = 40\n')
        with patch.dict(os.environ, {config.CONFIG_ENV: path}):
            s = config.settings.reload()
        self.assertEqual(s.solver_options(max_iterations=7, cost_tol=None).max_iterations, 7)
        self.assertEqual(s.parametrization(kind=ParamKind.ANGLES).kind, ParamKind.ANGLES)

    def test_broken_file_keeps_defaults(self):
        path = self.write_config('[solver\nmax_iterations = ')
        with patch.dict(os.environ, {config.CONFIG_ENV: path}):
            with self.assertLogs("config", level="WARNING"):
                s = config.settings.reload()
        self.assertEqual(s.source, "defaults")
        self.assertEqual(s.solver_options().max_iterations, 500)

    def test_log_level_from_env(self):
        with patch.dict(os.environ, {config.LOG_ENV: "debug", config.CONFIG_ENV: str(self.tmp / "none.toml")}):
            self.assertEqual(config.settings.reload().log_level, "DEBUG")

    def test_unknown_log_level_ignored(self):
        with patch.dict(os.environ, {config.LOG_ENV: "chatty", config.CONFIG_ENV: str(self.tmp / "none.toml")}):
            with self.assertLogs("config", level="WARNING"):
                s = config.settings.reload()
        self.assertEqual(s.log_level, "WARNING")


if __name__ == '__main__':
    unittest.main()
