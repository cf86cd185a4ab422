"""CSC path synthesis, fragmentation, replacement and normalization.

A CSC path is an arc on a radius-r turning circle, a tangent segment and a
second arc. Paths are built from the tangent line between the start and end
turning circles and then rebuilt by walking from the start configuration, so
a solution and its curve never disagree.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import settings
from .errors import DomainError, InfeasibleError
from .geometry import (
    Config,
    CsCurve,
    Curve,
    KappaParams,
    Point2,
    SampledCurve,
    arc_from,
    concatenate_all,
    config_at,
    end_of,
    merge_components,
    segment_from,
)
from .utils import TWO_PI, mod2pi


logger = logging.getLogger(__name__)

_FULL_TURN_SNAP = 1e-10
_COINCIDENT = 1e-10
_SNAP_CAP = 0.1
_TIE = 1e-12
_TANGENT_SLACK = 1e-12


class Word(str, Enum):
    LSL = "LSL"
    LSR = "LSR"
    RSL = "RSL"
    RSR = "RSR"

    @property
    def sides(self) -> tuple[int, int]:
        return (1 if self.value[0] == "L" else -1, 1 if self.value[2] == "L" else -1)


WORDS: tuple[Word, ...] = (Word.LSL, Word.LSR, Word.RSL, Word.RSR)


@dataclass(frozen=True)
class CscWord:
    word: Word
    arc1_sweep: float
    seg_length: float
    arc2_sweep: float
    radius: float
    phi: float  # segment heading

    @property
    def length(self) -> float:
        return self.radius * (abs(self.arc1_sweep) + abs(self.arc2_sweep)) + self.seg_length


@dataclass(frozen=True)
class CscSolution:
    start: Config
    end: Config
    kappa: KappaParams
    candidates: tuple[CscWord, ...]

    @property
    def best(self) -> CscWord:
        best = self.candidates[0]
        for cand in self.candidates[1:]:
            if cand.length < best.length - _TIE:
                best = cand
        return best

    def curve(self, word: Word | None = None) -> CsCurve:
        chosen = self.best if word is None else next(c for c in self.candidates if c.word == word)
        return word_path(self.start, chosen, self.kappa)


@dataclass(frozen=True)
class Fragmentation:
    breakpoints: tuple[float, ...]

    @property
    def pieces(self) -> list[tuple[float, float]]:
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:]))


def _turning_center(config: Config, side: int, r: float) -> tuple[float, float]:
    th = config.heading
    return config.position.x - side * r * math.sin(th), config.position.y + side * r * math.cos(th)


def _turn_magnitude(value: float, reference: float | None) -> float:
    m = mod2pi(value)
    if m > TWO_PI - _FULL_TURN_SNAP:
        m = 0.0
    if reference is not None and m < _FULL_TURN_SNAP and reference > math.pi:
        m = TWO_PI
    return m


def solve_word(
    start: Config,
    end: Config,
    kappa: KappaParams,
    word: Word,
    reference: CscWord | None = None,
) -> CscWord | None:
    """One CSC word between two configurations, or None if infeasible.

    With a ``reference`` the branch nearest to it is returned: a coincident
    pair of turning circles keeps the reference segment heading and a
    vanishing arc may continue as a full turn.
    """
    r = kappa.r
    s1, s2 = word.sides
    c1x, c1y = _turning_center(start, s1, r)
    c2x, c2y = _turning_center(end, s2, r)
    vx, vy = c2x - c1x, c2y - c1y
    dist = math.hypot(vx, vy)
    if s1 == s2:
        seg = dist
        if dist <= _COINCIDENT:
            seg = 0.0
            phi = reference.phi if reference is not None else end.heading
        else:
            phi = math.atan2(vy, vx)
    else:
        if dist < 2.0 * r - _COINCIDENT:
            return None
        seg = math.sqrt(max(dist * dist - 4.0 * r * r, 0.0))
        phi = math.atan2(vy, vx) + s1 * math.atan2(2.0 * r, seg)
    ref1 = abs(reference.arc1_sweep) if reference is not None else None
    ref2 = abs(reference.arc2_sweep) if reference is not None else None
    sweep1 = s1 * _turn_magnitude(s1 * (phi - start.heading), ref1)
    sweep2 = s2 * _turn_magnitude(s2 * (end.heading - phi), ref2)
    return CscWord(word, sweep1, seg, sweep2, r, phi)


def solve_cs(
    start: Config,
    end: Point2,
    kappa: KappaParams,
    side: int,
    reference: CscWord | None = None,
) -> CscWord | None:
    """Arc on ``side`` then a segment from ``start`` to the point ``end``, the end heading free.

    Returned as a word whose second arc is empty; None when ``end`` lies
    inside the turning disk.
    """
    r = kappa.r
    cx, cy = _turning_center(start, side, r)
    vx, vy = end.x - cx, end.y - cy
    rho = math.hypot(vx, vy)
    if rho < r * (1.0 - _TANGENT_SLACK):
        return None
    seg = math.sqrt(max(rho * rho - r * r, 0.0))
    phi = math.atan2(vy, vx) + side * math.atan2(r, seg)
    ref = abs(reference.arc1_sweep) if reference is not None else None
    sweep = side * _turn_magnitude(side * (phi - start.heading), ref)
    return CscWord(Word.LSL if side == 1 else Word.RSR, sweep, seg, 0.0, r, phi)


def solve_csc(start: Config, end: Config, kappa: KappaParams) -> CscSolution:
    candidates = tuple(w for w in (solve_word(start, end, kappa, word) for word in WORDS) if w is not None)
    if not candidates:
        raise InfeasibleError(f"no CSC word joins {start} and {end}")
    return CscSolution(start, end, kappa, candidates)


def word_path(start: Config, word: CscWord, kappa: KappaParams) -> CsCurve:
    s1, s2 = word.word.sides
    r = kappa.r
    first = arc_from(start, s1, abs(word.arc1_sweep), r)
    mid_config = Config(start.position, start.heading + word.arc1_sweep) if abs(word.arc1_sweep) == 0 else end_of(first)
    seg = segment_from(mid_config, word.seg_length)
    seg_end = Config(seg.end, mid_config.heading)
    last = arc_from(seg_end, s2, abs(word.arc2_sweep), r)
    return CsCurve(kappa, (first, seg, last))


def csc_closed_form(start: Config, end: Config, kappa: KappaParams) -> dict[Word, float | None]:
    """Per-word CSC lengths from the normalized (alpha, beta, d) closed forms.

    Independent of ``solve_word``; used as an oracle.
    """
    r = kappa.r
    dx, dy = end.position.x - start.position.x, end.position.y - start.position.y
    d = math.hypot(dx, dy) / r
    theta = mod2pi(math.atan2(dy, dx))
    alpha = mod2pi(start.heading - theta)
    beta = mod2pi(end.heading - theta)
    sa, sb, ca, cb = math.sin(alpha), math.sin(beta), math.cos(alpha), math.cos(beta)

    def snap(a: float) -> float:
        a = mod2pi(a)
        return 0.0 if a > TWO_PI - _FULL_TURN_SNAP else a

    out: dict[Word, float | None] = {}

    p_sq = 2 + d * d - 2 * math.cos(alpha - beta) + 2 * d * (sa - sb)
    if p_sq < 0:
        out[Word.LSL] = None
    else:
        tmp = math.atan2(cb - ca, d + sa - sb)
        out[Word.LSL] = (snap(tmp - alpha) + math.sqrt(p_sq) + snap(beta - tmp)) * r

    p_sq = 2 + d * d - 2 * math.cos(alpha - beta) + 2 * d * (sb - sa)
    if p_sq < 0:
        out[Word.RSR] = None
    else:
        tmp = math.atan2(ca - cb, d - sa + sb)
        out[Word.RSR] = (snap(alpha - tmp) + math.sqrt(p_sq) + snap(tmp - beta)) * r

    p_sq = -2 + d * d + 2 * math.cos(alpha - beta) - 2 * d * (sa + sb)
    if p_sq < 0:
        out[Word.RSL] = None
    else:
        p = math.sqrt(p_sq)
        tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
        out[Word.RSL] = (snap(alpha - tmp) + p + snap(beta - tmp)) * r

    p_sq = -2 + d * d + 2 * math.cos(alpha - beta) + 2 * d * (sa + sb)
    if p_sq < 0:
        out[Word.LSR] = None
    else:
        p = math.sqrt(p_sq)
        tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
        out[Word.LSR] = (snap(tmp - alpha) + p + snap(tmp - beta)) * r
    return out


def fragmentation(curve: Curve, lam: float | None = None) -> Fragmentation:
    lam = settings.fragment_lambda if lam is None else lam
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    s = curve.length
    m = max(1, math.ceil(s / (lam * curve.kappa.r) - 1e-12))
    return Fragmentation(tuple(s * k / m for k in range(m)) + (s,))


def replacement(start: Config, end: Config, kappa: KappaParams) -> CsCurve:
    return solve_csc(start, end, kappa).curve()


def replace_fragment(fragment: Curve) -> CsCurve:
    """Minimal CSC curve with the fragment's endpoint configurations."""
    if fragment.length >= fragment.kappa.r:
        raise DomainError(f"fragment length {fragment.length} is not shorter than r={fragment.kappa.r}")
    return replacement(fragment.start_config, fragment.end_config, fragment.kappa)


def fragment_configs(curve: Curve, frag: Fragmentation) -> list[Config]:
    return [config_at(curve, t) for t in frag.breakpoints]


def _shared_side(a: Config, b: Config, r: float, tol: float) -> int:
    side, best = 0, tol
    for s in (1, -1):
        ax, ay = _turning_center(a, s, r)
        bx, by = _turning_center(b, s, r)
        gap = math.hypot(bx - ax, by - ay)
        if gap <= best:
            side, best = s, gap
    return side


def _on_circle(center: tuple[float, float], side: int, r: float, p: Point2) -> Config:
    ang = math.atan2(p.y - center[1], p.x - center[0])
    return Config(Point2(center[0] + r * math.cos(ang), center[1] + r * math.sin(ang)), ang + side * math.pi / 2)


def _circle_through(p: Point2, q: Point2, r: float, near: tuple[float, float]) -> tuple[float, float] | None:
    half = 0.5 * p.distance(q)
    if half > r:
        return None
    if half <= _COINCIDENT:
        return near
    mx, my = 0.5 * (p.x + q.x), 0.5 * (p.y + q.y)
    ux, uy = (q.x - p.x) / (2 * half), (q.y - p.y) / (2 * half)
    h = math.sqrt(r * r - half * half)
    cands = [(mx - h * uy, my + h * ux), (mx + h * uy, my - h * ux)]
    return min(cands, key=lambda c: math.hypot(c[0] - near[0], c[1] - near[1]))


def coherent_configs(configs: list[Config], r: float, tol: float) -> list[Config]:
    """Put runs of breakpoints that share a turning circle up to ``tol`` on one exact circle.

    Sampled tangents carry noise of the order of the sample spacing. Two
    turning circles that almost coincide would make the CSC segment point
    along that noise and the replacement loop once around. Interior
    breakpoints move onto the circle by at most ``tol``; the endpoints keep
    their positions and only their free headings change.
    """
    out = list(configs)
    n = len(out)
    sides: list[int] = []
    for k in range(n - 1):
        side = _shared_side(out[k], out[k + 1], r, tol)
        sides.append(side)
        if side and k + 1 < n - 1:
            out[k + 1] = _on_circle(_turning_center(out[k], side, r), side, r, out[k + 1].position)
    side = sides[-1] if sides else 0
    if not side:
        return out
    a = n - 2
    while a > 0 and sides[a - 1] == side:
        a -= 1
    if a == 0:
        center = _circle_through(out[0].position, out[-1].position, r, _turning_center(out[0], side, r))
        if center is None:
            return out
    else:
        center = _turning_center(out[-1], side, r)
    for k in range(a, n):
        snapped = _on_circle(center, side, r, out[k].position)
        out[k] = Config(out[k].position, snapped.heading) if k in (0, n - 1) else snapped
    return out


def sampled_configs(curve: SampledCurve, frag: Fragmentation) -> list[Config]:
    """Breakpoint configurations of a sampled curve, taken at the nearest vertices."""
    cum = np.asarray(curve.cumulative_lengths)
    idx = np.unique(np.rint(np.interp(frag.breakpoints, cum, np.arange(len(cum)))).astype(int))
    heads = curve.headings()
    configs = [Config(curve.points[i], float(heads[i])) for i in idx]
    tol = min(float(np.max(np.diff(cum))), _SNAP_CAP * curve.kappa.r)
    return coherent_configs(configs, curve.kappa.r, tol)


def normalize(curve: Curve, lam: float | None = None) -> CsCurve:
    frag = fragmentation(curve, lam)
    if isinstance(curve, SampledCurve):
        configs = sampled_configs(curve, frag)
    else:
        configs = fragment_configs(curve, frag)
    parts = [replacement(a, b, curve.kappa) for a, b in zip(configs[:-1], configs[1:])]
    out = concatenate_all(parts)
    logger.debug(f"normalized curve of length {curve.length:.9g} into {len(parts)} fragments, length {out.length:.9g}")
    return merge_components(out)
