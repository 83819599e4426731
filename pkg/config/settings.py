import os
from pathlib import Path
from typing import List, Dict
import yaml
from dotenv import load_dotenv
load_dotenv()


def _env_flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


class Config:
    # Project Paths
    BASE_DIR = Path(__file__).parent.parent
    CONFIG_DIR = BASE_DIR / "config"
    DATA_DIR = Path(os.getenv("UTILITY_DATA_DIR", str(BASE_DIR / "data")))
    LOGS_DIR = Path(os.getenv("UTILITY_LOGS_DIR", str(BASE_DIR / "logs")))

    # Logging
    LOG_LEVEL = os.getenv("UTILITY_LOG_LEVEL", "WARNING").upper()
    LOG_TO_FILE = _env_flag("UTILITY_LOG_TO_FILE", "false")
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    # Concurrency (grid partitions, sweep points)
    MAX_WORKERS = int(os.getenv("UTILITY_MAX_WORKERS", "1"))

    # Distribution validation
    NORMALIZATION_TOL = 1e-9    # accepted deviation of an input sum from 1
    SUM_TOL = 1e-12             # stored Pmf sums to 1 within this
    FAIRNESS_TOL = 1e-9
    MIN_ATOMS = 2

    # Solver
    BETA_TOL = 1e-12
    OMEGA_XTOL = 1e-12
    MAX_BISECTION_ITER = 200
    MAX_BRACKET_DOUBLINGS = 64

    # Oracle caps
    GRID_STEP_DEFAULT = 1e-2
    GRID_STEP_MIN = 1e-4
    GRID_STEP_MAX = 1e-1
    GRID_MAX_ALPHABET = 4
    ENUM_MAX_ALPHABET = 3
    ENUM_MAX_N = 12
    REFINE_STEP = 0.5
    REFINE_TOL = 1e-12
    REFINE_MAX_ITER = 100_000
    REFINE_SMOOTHING = 1e-9     # mass mixed into zero entries of a seed

    # Verification thresholds
    VERIFY_N = 8
    VERIFY_REFINED_LINF = 1e-4
    VERIFY_KL_GAP = 1e-8
    VERIFY_PROPERTY_PAIRS = 1000
    RANDOM_SEED = int(os.getenv("UTILITY_RANDOM_SEED", "20180101"))

    # Output
    CSV_FLOAT_FORMAT = "%.17g"
    RANGE_DECIMALS = 12

    @classmethod
    def _load_yaml(cls) -> Dict:
        with open(cls.CONFIG_DIR / "reference_distributions.yaml", 'r') as f:
            return yaml.safe_load(f)

    @classmethod
    def load_reference_distributions(cls) -> List[Dict]:
        """Load the named reference distributions from YAML configuration"""
        return cls._load_yaml()['reference_distributions']

    @classmethod
    def load_figure_sweeps(cls) -> List[Dict]:
        """Load figure sweep definitions (which distributions, axis, range)"""
        return cls._load_yaml()['figures']

    @classmethod
    def ensure_directories(cls):
        """Create necessary directories"""
        for directory in [cls.DATA_DIR, cls.LOGS_DIR]:
            directory.mkdir(parents=True, exist_ok=True)
