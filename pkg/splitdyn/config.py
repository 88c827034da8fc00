import os
from dataclasses import dataclass, replace
from typing import Optional

from dotenv import load_dotenv

from .utils import InvalidInput

DEFAULT_TOL = 1e-8
ROOT_MAX_ITER = 500
ITERATE_BIT_CAP = 10 ** 6
DEGREE_CAP = 4096
HEIGHT_MAX_ITERS = 400
BURN_IN = 5
BOOTSTRAP_RESAMPLES = 200
BOOTSTRAP_SUBSAMPLE = 500
MIN_ENERGY_SAMPLES = 100
PREP_BUDGET = (3, 4)
PCF_BUDGET = 30
CLUSTER_RADIUS = 1e-6


@dataclass(frozen=True)
class Settings:
    tol: float = DEFAULT_TOL
    root_max_iter: int = ROOT_MAX_ITER
    bit_cap: int = ITERATE_BIT_CAP
    degree_cap: int = DEGREE_CAP
    height_max_iters: int = HEIGHT_MAX_ITERS
    burn_in: int = BURN_IN
    bootstrap_resamples: int = BOOTSTRAP_RESAMPLES
    budget_m: int = PREP_BUDGET[0]
    budget_n: int = PREP_BUDGET[1]
    threads: int = 1


def _env_value(name: str, cast, default):
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = cast(raw)
    except ValueError:
        raise InvalidInput(f"Error reading {name}: {raw!r} is not a valid {cast.__name__}")
    if value <= 0:
        raise InvalidInput(f"Error reading {name}: must be positive, got {raw!r}")
    return value


def load_settings(env_file: Optional[str] = None, base: Optional[Settings] = None) -> Settings:
    """
    Build settings from defaults and the environment.

    Args:
        env_file: Optional .env file read with python-dotenv before the lookup
        base: Settings to start from (defaults when omitted)

    Returns:
        Settings: resolved values
    """
    if env_file:
        load_dotenv(env_file)
    else:
        load_dotenv()
    settings = base or Settings()
    return replace(
        settings,
        threads=_env_value("SD_THREADS", int, settings.threads),
        tol=_env_value("SD_TOL", float, settings.tol),
        root_max_iter=_env_value("SD_ROOT_MAX_ITER", int, settings.root_max_iter),
        bit_cap=_env_value("SD_BIT_CAP", int, settings.bit_cap),
        degree_cap=_env_value("SD_DEGREE_CAP", int, settings.degree_cap),
        bootstrap_resamples=_env_value("SD_BOOTSTRAP", int, settings.bootstrap_resamples),
    )


__all__ = ['Settings', 'load_settings']
