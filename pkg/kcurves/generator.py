"""Seeded random curves of Sigma(x, y) for tests and Monte-Carlo falsifiers."""
from __future__ import annotations

import logging
import math

import numpy as np

from .config import settings
from .dubins import solve_csc
from .errors import DomainError, GenerationError, InfeasibleError
from .geometry import (
    Component,
    Config,
    CsCurve,
    KappaParams,
    Point2,
    arc_from,
    end_of,
    segment_from,
)
from .validation import validate_cs


logger = logging.getLogger(__name__)

SeedLike = int | np.random.Generator | None


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(settings.random_seed if seed is None else seed)


def random_walk(start: Config, kappa: KappaParams, steps: int, rng: np.random.Generator) -> list[Component]:
    """Random arcs (sweep in (-pi/2, pi/2)) and segments (length in (0, r)) chained from ``start``."""
    r = kappa.r
    comps: list[Component] = []
    config = start
    for _ in range(steps):
        if rng.random() < 0.5:
            sweep = float(rng.uniform(-math.pi / 2, math.pi / 2))
            comp: Component = arc_from(config, 1 if sweep >= 0 else -1, abs(sweep), r)
        else:
            comp = segment_from(config, float(rng.uniform(0.0, r)))
        comps.append(comp)
        config = end_of(comp)
    return comps


def _draw_heading(rng: np.random.Generator, center: float | None, spread: float) -> float:
    if center is None:
        return float(rng.uniform(-math.pi, math.pi))
    return center + float(rng.uniform(-spread, spread))


def random_curve(
    x: Point2,
    y: Point2,
    kappa: KappaParams,
    complexity_budget: int,
    seed: SeedLike = None,
    *,
    start_heading: float | None = None,
    end_heading: float | None = None,
    heading_spread: float = 0.0,
) -> CsCurve:
    """Valid cs curve from ``x`` to ``y``: a random walk closed by a CSC solve.

    ``start_heading``/``end_heading`` pin the endpoint headings (jittered by
    ``heading_spread``); otherwise they are uniform. The same seed always
    gives the same curve.
    """
    if complexity_budget < 3:
        raise DomainError(f"complexity budget must be at least 3, got {complexity_budget}")
    rng = make_rng(seed)
    x, y = Point2(*x), Point2(*y)
    for attempt in range(settings.random_max_retries):
        start = Config(x, _draw_heading(rng, start_heading, heading_spread))
        goal = Config(y, _draw_heading(rng, end_heading, heading_spread))
        walk = random_walk(start, kappa, complexity_budget - 3, rng)
        tail = end_of(walk[-1]) if walk else start
        try:
            closure = solve_csc(tail, goal, kappa).curve()
        except InfeasibleError as e:
            logger.warning(f"random closure attempt {attempt} failed: {e}")
            continue
        comps = tuple(walk) + closure.components
        if sum(c.length for c in comps) <= settings.eps_degenerate:
            continue
        curve = CsCurve(kappa, comps)
        if validate_cs(curve).valid:
            return curve
        logger.warning(f"random curve attempt {attempt} failed validation; retrying")
    raise GenerationError(f"no valid random curve after {settings.random_max_retries} attempts")
