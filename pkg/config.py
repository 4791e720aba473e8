import os
import logging

import toml
from dotenv import load_dotenv

from equations import ParamKind, Parametrization
from solver import SolverOptions

logger = logging.getLogger("config")

LOG_ENV = "PNEGPREP_LOG"
CONFIG_ENV = "PNEGPREP_CONFIG"
DEFAULT_CONFIG_FILE = "pnegprep.toml"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class Settings:
    """
    Process-wide settings.
    Precedence: defaults < pnegprep.toml < environment < CLI flags (applied by callers).
    """
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Settings, cls).__new__(cls)
            cls._instance._init_state()
        return cls._instance

    def _init_state(self):
        self.log_level = "WARNING"
        self.solver = {}
        self.run = {"param": ParamKind.ANGLES, "unitarity_weight": 1.0, "jobs": 1}
        self.source = "defaults"
        self._load_state()

    def _load_state(self):
        load_dotenv()
        path = os.environ.get(CONFIG_ENV, DEFAULT_CONFIG_FILE)
        if os.path.exists(path):
            try:
                data = toml.load(path)
                self.solver.update(data.get("solver", {}))
                self.run.update(data.get("run", {}))
                self.source = path
            except (toml.TomlDecodeError, OSError) as e:
                logger.warning(f"Config Load Error ({path}): {e}")

        level = os.environ.get(LOG_ENV, self.log_level).upper()
        if level not in LOG_LEVELS:
            logger.warning(f"{LOG_ENV}={level!r} is not a log level, keeping {self.log_level}")
        else:
            self.log_level = level

    def reload(self):
        self._init_state()
        return self

    def solver_options(self, **overrides) -> SolverOptions:
        merged = dict(self.solver)
        merged.update({k: v for k, v in overrides.items() if v is not None})
        return SolverOptions.from_dict(merged)

    def parametrization(self, kind=None, unitarity_weight=None) -> Parametrization:
        return Parametrization(
            kind=kind or self.run.get("param", ParamKind.ANGLES),
            unitarity_weight=float(unitarity_weight if unitarity_weight is not None
                                   else self.run.get("unitarity_weight", 1.0)),
        )

    def get_status(self) -> dict:
        return {"source": self.source, "log_level": self.log_level, "solver": dict(self.solver), "run": dict(self.run)}


def configure_logging(level: str = None):
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.WARNING),
        format='%(levelname)s: %(message)s',
    )


# Global Instance
settings = Settings()
