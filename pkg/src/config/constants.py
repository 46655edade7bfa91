"""
Configuration constants loaded from environment variables.

Usage:
    from src.config.constants import ENGINE_DEFAULTS

    beta = ENGINE_DEFAULTS["beta"]
    anchors = ENGINE_DEFAULTS["anchors"]
    pp_max = anchors["pp_max"]

Every key can be overridden from a `.env` file at the project root (see
`.env.template`). Unset keys fall back to smoothing 0.1, delta 1e-4 and anchors
1 / 0.9 / 1 / 0.8.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load .env file from project root
project_root = Path(__file__).parent.parent.parent
dotenv_path = project_root / ".env"
load_dotenv(dotenv_path)


def _float_env(name: str, default: float) -> float:
    raw = os.getenv(name)
    return float(raw) if raw not in (None, "") else default


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw not in (None, "") else default


def get_engine_defaults() -> dict:
    """
    Get truth-discovery engine defaults from environment variables.

    Returns:
        dict: Smoothing, convergence, anchor and random-walk settings
    """
    config = {
        "beta": _float_env("MTD_BETA", 0.1),
        "delta": _float_env("MTD_DELTA", 1e-4),
        "max_outer_iters": _int_env("MTD_MAX_ITERS", 100),
        "anchors": {
            "pp_max": _float_env("MTD_PP_MAX", 1.0),
            "np_max": _float_env("MTD_NP_MAX", 0.9),
            "pc_max": _float_env("MTD_PC_MAX", 1.0),
            "nc_max": _float_env("MTD_NC_MAX", 0.8),
        },
        "walk": {
            "tol": _float_env("MTD_WALK_TOL", 1e-8),
            "max_iters": _int_env("MTD_WALK_MAX_ITERS", 10_000),
        },
        "threads": _int_env("MTD_THREADS", 1),
    }

    return config


# Export engine configuration
ENGINE_DEFAULTS = get_engine_defaults()

# Export log level used by the command-line front door
LOG_LEVEL = os.getenv("MTD_LOG_LEVEL", "INFO")
