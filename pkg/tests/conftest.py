import math

import numpy as np
import pytest

from kcurves.dubins import Word, solve_word, word_path
from kcurves.generator import random_curve
from kcurves.geometry import (
    ArcComponent,
    Config,
    CsCurve,
    KappaParams,
    Point2,
    SegmentComponent,
    arc_from,
    end_of,
)
from kcurves.regions import build_lens, curve_in_cl_lens


X = Point2(0.0, 0.0)
Y = Point2(1.0, 0.0)


def word_curve(start: Config, end: Config, kappa: KappaParams, word: Word) -> CsCurve:
    sol = solve_word(start, end, kappa, word)
    assert sol is not None
    return word_path(start, sol, kappa)


def in_lens_rsr(kappa: KappaParams, a1: float, a2: float) -> CsCurve:
    """RSR from (x, a1) to (y, -a2), checked to lie in the closed d=1 lens.

    Valid when -a2 <= phi <= a1 for the segment heading phi, which holds for
    a1, a2 near each other; (0.1, 0.4) wraps a full turn instead.
    """
    curve = word_curve(Config(X, a1), Config(Y, -a2), kappa, Word.RSR)
    assert curve_in_cl_lens(build_lens(X, Y, kappa), curve)
    return curve


def random_lens_curves(kappa: KappaParams, count: int, seed: int = 0) -> list[CsCurve]:
    """Seeded random curves from x to y that lie in the closed d=1 lens."""
    lens = build_lens(X, Y, kappa)
    rng = np.random.default_rng(seed)
    out: list[CsCurve] = []
    for _ in range(50 * count):
        curve = random_curve(X, Y, kappa, 3, rng, start_heading=0.3, end_heading=-0.3, heading_spread=0.25)
        if curve_in_cl_lens(lens, curve):
            out.append(curve)
            if len(out) == count:
                return out
    raise AssertionError(f"only {len(out)} of {count} random curves landed in the lens")


def not_in_lens_rsr(kappa: KappaParams, d1: float, d2: float) -> CsCurve:
    """RSR from (x, 150deg + d1) to (y, 210deg - d2) around the upper disk."""
    return word_curve(
        Config(X, math.radians(150) + d1), Config(Y, math.radians(210) - d2), kappa, Word.RSR
    )


def closed_lsl(kappa: KappaParams, psi: float, delta: float) -> CsCurve:
    """LSL loop from (x, psi) back to (x, psi + delta); length r(2pi + delta) + 2r sin(delta/2)."""
    return word_curve(Config(X, psi), Config(X, psi + delta), kappa, Word.LSL)


def chain(kappa: KappaParams, start: Config, pieces) -> CsCurve:
    """Curve from signed arc sweeps (('L'|'R', sweep)) and segments (('S', length))."""
    comps = []
    cfg = start
    for kind, amount in pieces:
        if kind == "S":
            comp = SegmentComponent(cfg.position, cfg.position.offset(amount * math.cos(cfg.heading), amount * math.sin(cfg.heading)))
        else:
            comp = arc_from(cfg, 1 if kind == "L" else -1, amount, kappa.r)
        comps.append(comp)
        cfg = end_of(comp)
    return CsCurve(kappa, tuple(comps))


@pytest.fixture
def kappa():
    return KappaParams(1.0)


@pytest.fixture
def lens(kappa):
    return build_lens(X, Y, kappa)


@pytest.fixture
def unit_segment(kappa):
    return CsCurve(kappa, (SegmentComponent(X, Y),))


@pytest.fixture
def unit_circle(kappa):
    """Counterclockwise radius-1 circle through the origin with horizontal tangent."""
    return CsCurve(kappa, (ArcComponent(Point2(0.0, 1.0), 1.0, -math.pi / 2, 2 * math.pi),))


@pytest.fixture
def zigzag(kappa):
    """L0.2 / R0.4 / L0.2 from (0, 0) heading 0; ends at about (0.795, 0) heading 0."""
    return chain(kappa, Config(X, 0.0), [("L", 0.2), ("R", 0.4), ("L", 0.2)])


@pytest.fixture
def s_curve(kappa):
    return chain(kappa, Config(X, 0.0), [("L", 0.6), ("R", 0.6)])
