from __future__ import annotations

import os
from dataclasses import dataclass
from dotenv import load_dotenv


load_dotenv()


def _get_bool(name: str, default: bool) -> bool:
    val = os.getenv(name)
    if val is None:
        return default
    return val.strip().lower() in {"1", "true", "yes", "on"}


def _get_int(name: str, default: int) -> int:
    val = os.getenv(name)
    if not val:
        return default
    try:
        return int(val)
    except Exception:
        return default


def _get_float(name: str, default: float) -> float:
    val = os.getenv(name)
    if not val:
        return default
    try:
        return float(val)
    except Exception:
        return default


@dataclass(frozen=True)
class Settings:
    # Tolerances
    eps_join: float = _get_float("KCURVES_EPS_JOIN", 1e-9)  # joint position/heading gap
    eps_angle: float = _get_float("KCURVES_EPS_ANGLE", 1e-6)  # antiparallel tangent detection
    eps_rel: float = _get_float("KCURVES_EPS_REL", 1e-6)  # relative slack on the curvature bound
    eps_region: float = _get_float("KCURVES_EPS_REGION", 1e-9)  # region boundary membership
    eps_degenerate: float = _get_float("KCURVES_EPS_DEGENERATE", 1e-12)
    length_tol: float = _get_float("KCURVES_LENGTH_TOL", 1e-9)

    # Reduction
    reduce_rel_tol: float = _get_float("KCURVES_REDUCE_REL_TOL", 1e-10)
    reduce_max_iter: int = _get_int("KCURVES_REDUCE_MAX_ITER", 10_000)
    fragment_lambda: float = _get_float("KCURVES_FRAGMENT_LAMBDA", 0.9)

    # Traces
    frame_delta_rel: float = _get_float("KCURVES_FRAME_DELTA_REL", 1e-2)  # delta_frame = max(rel * r, step)
    default_steps: int = _get_int("KCURVES_DEFAULT_STEPS", 8)
    max_refine_depth: int = _get_int("KCURVES_MAX_REFINE_DEPTH", 12)
    sample_spacing: float = _get_float("KCURVES_SAMPLE_SPACING", 0.01)  # in units of r

    # Random generation
    random_seed: int = _get_int("KCURVES_RANDOM_SEED", 0)
    random_max_retries: int = _get_int("KCURVES_RANDOM_MAX_RETRIES", 64)

    # Output
    log_level: str = os.getenv("KCURVES_LOG_LEVEL", "WARNING").strip().upper()
    progress: bool = _get_bool("KCURVES_PROGRESS", False)


settings = Settings()

if not 0.0 < settings.fragment_lambda < 1.0:
    raise ValueError("KCURVES_FRAGMENT_LAMBDA must lie strictly between 0 and 1")
if min(settings.eps_join, settings.eps_angle, settings.eps_rel, settings.eps_region, settings.length_tol) <= 0:
    raise ValueError("KCURVES_EPS_* tolerances must be positive")
