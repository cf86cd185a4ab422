"""Discretized kappa-constrained homotopies between curves of Sigma(x, y).

A ``HomotopyTrace`` is a list of frames ``(p, curve)`` with ``p`` running from
0 to 1. Traces are sampled from one-parameter families of cs curves: each
family is evaluated on a coarse grid and bisected until consecutive frames lie
within ``frame_delta`` of each other in Hausdorff distance.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Iterator, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .config import settings
from .dubins import WORDS, CscWord, Word, normalize, solve_cs, solve_csc, solve_word, word_path
from .errors import (
    ClassMismatchError,
    CurveValidationError,
    DomainError,
    InfeasibleError,
    MoveInfeasibleError,
    NonConvergenceError,
    PreconditionError,
)
from .geometry import (
    ArcComponent,
    Component,
    Config,
    CsCurve,
    Curve,
    KappaParams,
    Point2,
    SampledCurve,
    SegmentComponent,
    arc_from,
    circle_through,
    config_at,
    end_of,
    evaluate,
    hausdorff,
    merge_components,
    reverse,
    rotate,
    segment_from,
    subcurve,
    tangent,
    translate,
)
from .regions import (
    ClassLabel,
    LensGeometry,
    build_lens,
    class_label,
    class_minimum_length,
    labels_for,
)
from .utils import TWO_PI, angle_gap, normalize_angle
from .validation import ValidationReport, Violation, validate_cs


logger = logging.getLogger(__name__)

Family = Callable[[float], CsCurve]

_MINIMUM_TOL = 1e-6
_JUNCTION_TOL = 1e-6
_SAME_PATH_TOL = 1e-7
_SETTLE_LOOKBACK = 1e-6
_STRETCH = 3.0  # train-track displacement of the arc-to-arc homotopy, in units of r
_MARCH_STEP = 0.01  # sample spacing of a pull (units of r) or a turn (radians)
_EDGE_ITERATIONS = 60
_RISE = 1e-12


class MoveKind(str, Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    TYPE_III = "TypeIII"
    FRAGMENT_REPLACEMENT = "FragmentReplacement"


@dataclass(frozen=True)
class ElementaryMove:
    """A move spanning frames ``start_index..end_index`` of a trace."""

    kind: MoveKind
    start_index: int
    end_index: int
    params: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Frame:
    p: float
    curve: CsCurve


@dataclass(frozen=True)
class HomotopyTrace:
    """Frames of a homotopy, ``p`` strictly increasing from 0 to 1.

    A single-frame trace (the identity) carries only ``p = 0``.
    """

    frames: tuple[Frame, ...]
    moves: tuple[ElementaryMove, ...] = ()

    def __post_init__(self) -> None:
        frames, moves = tuple(self.frames), tuple(self.moves)
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "moves", moves)
        if not frames:
            raise DomainError("a trace needs at least one frame")
        ps = [f.p for f in frames]
        if ps[0] != 0.0 or (len(ps) > 1 and ps[-1] != 1.0):
            raise DomainError(f"trace parameters must run from 0 to 1, got {ps[0]} .. {ps[-1]}")
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise DomainError("trace parameters must be strictly increasing")
        kappa = frames[0].curve.kappa
        if any(f.curve.kappa != kappa for f in frames):
            raise DomainError("all frames of a trace must share kappa")
        for m in moves:
            if not 0 <= m.start_index <= m.end_index < len(frames):
                raise DomainError(f"move {m.kind.value} spans frames outside the trace")

    @classmethod
    def identity(cls, curve: CsCurve) -> "HomotopyTrace":
        return cls((Frame(0.0, curve),))

    @classmethod
    def from_curves(cls, curves: Sequence[CsCurve], moves: Sequence[ElementaryMove] = ()) -> "HomotopyTrace":
        n = len(curves)
        ps = [0.0] if n == 1 else [i / (n - 1) for i in range(n)]
        return cls(tuple(Frame(p, c) for p, c in zip(ps, curves)), tuple(moves))

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def first(self) -> CsCurve:
        return self.frames[0].curve

    @property
    def last(self) -> CsCurve:
        return self.frames[-1].curve

    @property
    def curves(self) -> list[CsCurve]:
        return [f.curve for f in self.frames]

    @property
    def kappa(self) -> KappaParams:
        return self.first.kappa


# ---------------------------------------------------------------------------
# Families, refinement and trace algebra
# ---------------------------------------------------------------------------


def frame_delta(kappa: KappaParams) -> float:
    """Largest Hausdorff distance allowed between consecutive frames."""
    return settings.frame_delta_rel * kappa.r


def _frame(family: Family, p: float) -> CsCurve:
    try:
        return family(p)
    except (InfeasibleError, DomainError) as e:
        raise MoveInfeasibleError(f"no valid frame at p={p:.6g}: {e}") from e


def refine(family: Family, p0: float, p1: float, delta: float) -> list[tuple[float, CsCurve]]:
    """Frames of ``family`` on [p0, p1] whose consecutive Hausdorff distance is at most ``delta``.

    Intervals are bisected until they conform; an interval narrower than
    ``(p1 - p0) / 2**max_refine_depth`` that still jumps means the family is
    not continuous there.
    """
    min_width = (p1 - p0) / 2 ** settings.max_refine_depth
    done = [(p0, _frame(family, p0))]
    pending = [(p1, _frame(family, p1))]
    while pending:
        pl, left = done[-1]
        pr, right = pending[-1]
        gap = hausdorff(left, right)
        if gap <= delta:
            done.append(pending.pop())
            continue
        if pr - pl <= min_width:
            raise MoveInfeasibleError(f"frames at p={pl:.9g} and p={pr:.9g} stay {gap:.3e} apart after refinement")
        pm = 0.5 * (pl + pr)
        pending.append((pm, _frame(family, pm)))
    logger.debug(f"refined [{p0:.6g}, {p1:.6g}] into {len(done) - 1} intervals")
    return done


def trace_from_family(
    family: Family,
    kind: MoveKind,
    params: dict[str, Any],
    steps: int | None = None,
) -> HomotopyTrace:
    steps = max(1, steps or settings.default_steps)
    first = _frame(family, 0.0)
    delta = frame_delta(first.kappa)
    grid = np.linspace(0.0, 1.0, steps + 1)
    frames: list[tuple[float, CsCurve]] = []
    for a, b in zip(grid[:-1], grid[1:]):
        chunk = refine(family, float(a), float(b), delta)
        frames.extend(chunk if not frames else chunk[1:])
    trace = HomotopyTrace(tuple(Frame(p, c) for p, c in frames))
    return replace(trace, moves=(ElementaryMove(kind, 0, len(trace) - 1, params),))


def concat_traces(a: HomotopyTrace, b: HomotopyTrace) -> HomotopyTrace:
    """``a`` followed by ``b``; p is respaced uniformly over the joined frames."""
    if a.kappa != b.kappa:
        raise DomainError(f"cannot join traces with different kappa ({a.kappa.kappa} vs {b.kappa.kappa})")
    gap = hausdorff(a.last, b.first)
    if gap > _JUNCTION_TOL * max(1.0, a.kappa.r):
        raise DomainError(f"traces do not meet: junction frames are {gap:.3e} apart")
    shift = len(a) - 1
    moves = a.moves + tuple(
        replace(m, start_index=m.start_index + shift, end_index=m.end_index + shift) for m in b.moves
    )
    return HomotopyTrace.from_curves(a.curves + b.curves[1:], moves)


def reverse_trace(t: HomotopyTrace) -> HomotopyTrace:
    n = len(t)
    frames = tuple(Frame(1.0 - f.p if n > 1 else 0.0, f.curve) for f in reversed(t.frames))
    moves = tuple(
        ElementaryMove(
            m.kind,
            n - 1 - m.end_index,
            n - 1 - m.start_index,
            {**m.params, "reversed": not m.params.get("reversed", False)},
        )
        for m in reversed(t.moves)
    )
    return HomotopyTrace(frames, moves)


def _concat_all(traces: Sequence[HomotopyTrace]) -> HomotopyTrace:
    out = traces[0]
    for t in traces[1:]:
        out = concat_traces(out, t)
    return out


# ---------------------------------------------------------------------------
# Curve pieces and CSC windows
# ---------------------------------------------------------------------------


def _piece(curve: CsCurve, s0: float, s1: float) -> tuple[Component, ...]:
    if s1 - s0 <= settings.eps_join:
        return ()
    return subcurve(curve, s0, s1).components


def _same_path(a: CsCurve, b: CsCurve) -> bool:
    tol = _SAME_PATH_TOL * max(1.0, a.kappa.r)
    return (
        abs(a.length - b.length) <= tol
        and a.start_config.gap(b.start_config) <= tol
        and hausdorff(a, b) <= tol
    )


def _word_of(piece: CsCurve) -> CscWord | None:
    """The CSC word whose path is exactly ``piece``, if any."""
    if piece.complexity > 3:
        return None
    for word in WORDS:
        sol = solve_word(piece.start_config, piece.end_config, piece.kappa, word)
        if sol is None or abs(sol.length - piece.length) > _SAME_PATH_TOL * max(1.0, piece.length):
            continue
        try:
            path = word_path(piece.start_config, sol, piece.kappa)
        except DomainError:
            continue
        if _same_path(path, piece):
            return sol
    return None


def _head_window(curve: CsCurve, s0: float) -> tuple[float, CscWord]:
    """Farthest component boundary w such that curve[s0, w] is a CSC path."""
    idx, _ = curve.locate(s0)
    last = min(idx + 3, curve.complexity)
    for k in range(last, idx, -1):
        w = curve.offsets[k]
        if w - s0 <= settings.eps_join:
            continue
        word = _word_of(subcurve(curve, s0, w))
        if word is not None:
            return w, word
    raise MoveInfeasibleError(f"no CSC window starts at s={s0:.6g}")


def _tail_window(curve: CsCurve, s1: float) -> tuple[float, CscWord]:
    """Farthest component boundary w such that curve[w, s1] is a CSC path."""
    idx, u = curve.locate(s1)
    if u <= settings.eps_join and idx > 0:
        idx -= 1
    for k in range(max(idx - 2, 0), idx + 1):
        w = curve.offsets[k]
        if s1 - w <= settings.eps_join:
            continue
        word = _word_of(subcurve(curve, w, s1))
        if word is not None:
            return w, word
    raise MoveInfeasibleError(f"no CSC window ends at s={s1:.6g}")


def _flip(word: Word, which: int) -> Word:
    letters = list(word.value)
    pos = 0 if which == 1 else 2
    letters[pos] = "R" if letters[pos] == "L" else "L"
    return Word("".join(letters))


def _wrapped_arc(sol: CscWord, which: int) -> float:
    # small positive for a short arc, small negative for one just short of a full turn
    return normalize_angle(abs(sol.arc1_sweep if which == 1 else sol.arc2_sweep))


Solver = Callable[[float, Word], CscWord | None]


def _solved(solve: Solver, u: float, word: Word) -> CscWord:
    sol = solve(u, word)
    if sol is None:
        raise MoveInfeasibleError(f"word {word.value} is infeasible at rotation {u:.6g}")
    return sol


def _word_schedule(solve: Solver, u_max: float, word: Word) -> list[tuple[float, Word]]:
    """Words along a rotation of ``u_max``: a letter flips when its arc shrinks through zero."""
    schedule = [(0.0, word)]
    samples = max(64, math.ceil(u_max / 0.02))
    us = np.linspace(0.0, u_max, samples + 1)
    prev = _solved(solve, 0.0, word)
    quarter = math.pi / 2
    for u_lo, u_hi in zip(us[:-1], us[1:]):
        cur = _solved(solve, float(u_hi), word)
        for which in (1, 2):
            before, after = _wrapped_arc(prev, which), _wrapped_arc(cur, which)
            if abs(before) >= quarter or abs(after) >= quarter:
                continue
            if before < 0.0 <= after:
                raise MoveInfeasibleError(f"a full turn would vanish near rotation {u_hi:.6g}")
            if before >= 0.0 > after:
                current = word
                u_star = brentq(
                    lambda u: _wrapped_arc(_solved(solve, u, current), which), float(u_lo), float(u_hi), xtol=1e-14
                )
                word = _flip(word, which)
                schedule.append((float(u_star), word))
                cur = _solved(solve, float(u_hi), word)
                if _wrapped_arc(cur, which) < -1e-9:
                    raise MoveInfeasibleError(f"no continuation of {current.value} past rotation {u_star:.6g}")
        prev = cur
    return schedule


def _word_at(schedule: list[tuple[float, Word]], u: float) -> Word:
    word = schedule[0][1]
    for start, w in schedule:
        if u >= start:
            word = w
    return word


# ---------------------------------------------------------------------------
# Elementary moves
# ---------------------------------------------------------------------------


def move_type3(
    curve: CsCurve,
    t1: float,
    t2: float,
    displacement: float,
    steps: int | None = None,
) -> HomotopyTrace:
    """Train-track displacement of curve[t1, t2] along the parallel tangents at t1 and t2.

    Frame p inserts a segment of length p*displacement along the tangent at
    t1, translates the middle by the same vector, and returns along the
    tangent at t2. The final length is the initial length plus 2*displacement.
    """
    L = curve.length
    if displacement < 0:
        raise DomainError(f"displacement must be nonnegative, got {displacement}")
    if not (-settings.eps_join <= t1 < t2 <= L + settings.eps_join):
        raise DomainError(f"parameters must satisfy 0 <= t1 < t2 <= {L:.6g}, got {t1}, {t2}")
    t1, t2 = max(t1, 0.0), min(t2, L)
    h1, h2 = tangent(curve, t1), tangent(curve, t2)
    if angle_gap(h1, h2 + math.pi) > settings.eps_angle:
        raise PreconditionError(f"tangents at t1={t1:.6g} and t2={t2:.6g} are not antiparallel")
    if displacement == 0:
        return HomotopyTrace.identity(curve)
    p_pt, q_pt = evaluate(curve, t1), evaluate(curve, t2)
    ux, uy = math.cos(h1), math.sin(h1)
    head, tail = _piece(curve, 0.0, t1), _piece(curve, t2, L)
    middle = subcurve(curve, t1, t2)

    def family(p: float) -> CsCurve:
        if p <= 0.0:
            return curve
        dx, dy = p * displacement * ux, p * displacement * uy
        comps = (
            head
            + (SegmentComponent(p_pt, p_pt.offset(dx, dy)),)
            + translate(middle, dx, dy).components
            + (SegmentComponent(q_pt.offset(dx, dy), q_pt),)
            + tail
        )
        return CsCurve(curve.kappa, comps)

    params = {"t1": t1, "t2": t2, "displacement": displacement}
    return trace_from_family(family, MoveKind.TYPE_III, params, steps)


def move_type1(
    curve: CsCurve,
    z: float,
    side: int,
    phi: float,
    steps: int | None = None,
) -> HomotopyTrace:
    """Twist ``curve`` through ``phi`` about the rotation point at arc length ``z``.

    At an interior point an arc of the pushing disk on ``side`` (+1 left,
    -1 right) is inserted at z and grows to sweep ``phi``; the CSC window
    after z is re-solved so the rest of the curve stays put. At an endpoint
    the tangent there turns by ``side * phi`` while the position stays fixed.
    Whenever an arc of the re-solved window shrinks through zero its turning
    direction flips, which keeps the family continuous.
    """
    if side not in (1, -1):
        raise DomainError(f"side must be +1 (left) or -1 (right), got {side}")
    if phi < 0:
        raise DomainError(f"rotation angle must be nonnegative, got {phi}")
    L, kappa, r = curve.length, curve.kappa, curve.kappa.r
    if not -settings.eps_join <= z <= L + settings.eps_join:
        raise DomainError(f"rotation point s={z} outside [0, {L}]")
    if phi == 0:
        return HomotopyTrace.identity(curve)

    if z <= settings.eps_join:
        w, sol0 = _head_window(curve, 0.0)
        start, target = curve.start_config, config_at(curve, w)
        prefix, suffix = (), _piece(curve, w, L)

        def window_start(u: float) -> tuple[tuple[Component, ...], Config]:
            return (), Config(start.position, start.heading + side * u)

        def window_end(u: float) -> Config:
            return target

    elif z >= L - settings.eps_join:
        w, sol0 = _tail_window(curve, L)
        origin, finish = config_at(curve, w), curve.end_config
        prefix, suffix = _piece(curve, 0.0, w), ()

        def window_start(u: float) -> tuple[tuple[Component, ...], Config]:
            return (), origin

        def window_end(u: float) -> Config:
            return Config(finish.position, finish.heading + side * u)

    else:
        w, sol0 = _head_window(curve, z)
        pivot, target = config_at(curve, z), config_at(curve, w)
        prefix, suffix = _piece(curve, 0.0, z), _piece(curve, w, L)

        def window_start(u: float) -> tuple[tuple[Component, ...], Config]:
            if u <= 0.0:
                return (), pivot
            arc = arc_from(pivot, side, u, r)
            return (arc,), end_of(arc)

        def window_end(u: float) -> Config:
            return target

    def solve(u: float, word: Word) -> CscWord | None:
        return solve_word(window_start(u)[1], window_end(u), kappa, word)

    schedule = _word_schedule(solve, phi, sol0.word)

    def family(p: float) -> CsCurve:
        if p <= 0.0:
            return curve
        u = p * phi
        pushed, begin = window_start(u)
        sol = _solved(solve, u, _word_at(schedule, u))
        return CsCurve(kappa, prefix + pushed + word_path(begin, sol, kappa).components + suffix)

    params = {"z": z, "side": side, "phi": phi, "words": [w.value for _, w in schedule]}
    return trace_from_family(family, MoveKind.TYPE_I, params, steps)


def replace_span(
    curve: CsCurve,
    a: float,
    b: float,
    steps: int | None = None,
    params: dict[str, Any] | None = None,
) -> HomotopyTrace:
    """Replace curve[a, b] by its CSC replacement.

    Frame p replaces the first fraction p of the span by the minimal CSC
    path of that sub-span and keeps the rest.
    """
    L, kappa = curve.length, curve.kappa
    if not -settings.eps_join <= a < b <= L + settings.eps_join:
        raise DomainError(f"span [{a}, {b}] outside [0, {L}]")
    a, b = max(a, 0.0), min(b, L)
    piece = subcurve(curve, a, b)
    try:
        best = solve_csc(piece.start_config, piece.end_config, kappa).best
    except InfeasibleError as e:
        raise MoveInfeasibleError(f"span [{a:.6g}, {b:.6g}] has no CSC replacement: {e}") from e
    if best.length > piece.length + settings.length_tol * max(1.0, piece.length):
        raise PreconditionError(f"span [{a:.6g}, {b:.6g}] is shorter ({piece.length:.9g}) than its CSC ({best.length:.9g})")
    head = _piece(curve, 0.0, a)

    def family(p: float) -> CsCurve:
        if p <= 0.0:
            return curve
        s = b if p >= 1.0 else a + p * (b - a)
        sub = subcurve(curve, a, s)
        repl = solve_csc(sub.start_config, sub.end_config, kappa).curve()
        return CsCurve(kappa, head + repl.components + _piece(curve, s, L))

    kind = MoveKind.FRAGMENT_REPLACEMENT if piece.length < kappa.r else MoveKind.TYPE_II
    return trace_from_family(family, kind, params if params is not None else {"span": [a, b]}, steps)


def move_type2(curve: CsCurve, window: tuple[int, int], steps: int | None = None) -> HomotopyTrace:
    """Replace components ``window[0]..window[1]`` by their CSC replacement."""
    i, j = window
    if not 0 <= i <= j < curve.complexity:
        raise DomainError(f"window {window} outside components 0..{curve.complexity - 1}")
    return replace_span(curve, curve.offsets[i], curve.offsets[j + 1], steps, {"window": [i, j]})


# ---------------------------------------------------------------------------
# Pulls and turns
# ---------------------------------------------------------------------------

Tracker = Callable[[float, Word, CscWord | None], CscWord | None]
Measure = Callable[[float, CscWord], float]


@dataclass(frozen=True)
class _Run:
    """How far a family of CSC windows goes, and the words it passes through."""

    reach: float
    schedule: list[tuple[float, Word]]


def _magnitude(sol: CscWord, which: int) -> float:
    return abs(sol.arc1_sweep if which == 1 else sol.arc2_sweep)


def _tracked(track: Tracker, u: float, word: Word) -> CscWord:
    sol = track(u, word, None)
    if sol is None:
        raise MoveInfeasibleError(f"word {word.value} is infeasible at {u:.6g}")
    return sol


def _feasible_edge(track: Tracker, word: Word, lo: float, hi: float) -> float:
    """Last parameter of [lo, hi] at which ``word`` solves; it does at lo and not at hi."""
    for _ in range(_EDGE_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if track(mid, word, None) is None:
            hi = mid
        else:
            lo = mid
    return lo


def _lowest(f: Callable[[float], float], lo: float, hi: float) -> float:
    """Minimum of ``f`` on [lo, hi], bounded Brent."""
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12 * max(1.0, hi)})
    return float(res.x)


def _march(
    track: Tracker,
    u_max: float,
    word: Word,
    measure: Measure,
    step: float,
    flips: tuple[int, ...] = (1, 2),
) -> _Run:
    """Follow ``word`` over [0, u_max] until it breaks or the frames stop getting shorter.

    A letter listed in ``flips`` changes side when its arc shrinks through
    zero; any other vanishing arc ends the run there. The run also ends
    where the word becomes infeasible, where a full turn comes loose and
    where ``measure`` (the frame length) starts to grow.
    """
    schedule = [(0.0, word)]
    prev = track(0.0, word, None)
    if prev is None or u_max <= 0.0:
        return _Run(0.0, schedule)
    jump = math.pi * prev.radius
    last = measure(0.0, prev)
    quarter = math.pi / 2

    def length_at(u: float) -> float:
        sol = track(u, _word_at(schedule, u), None)
        return math.inf if sol is None else measure(u, sol)

    us = np.linspace(0.0, u_max, max(16, math.ceil(u_max / step)) + 1)
    for lo, hi in zip(us[:-1].tolist(), us[1:].tolist()):
        cur = track(hi, word, prev)
        if cur is None:
            return _Run(_feasible_edge(track, word, lo, hi), schedule)
        for which in (1, 2):
            before, after = _magnitude(prev, which), _magnitude(cur, which)
            if before > TWO_PI - quarter and after < quarter:
                return _Run(lo, schedule)
            if not (before < quarter and after > TWO_PI - quarter):
                continue
            current = word
            u_star = float(brentq(lambda u: _wrapped_arc(_tracked(track, u, current), which), lo, hi, xtol=1e-14))
            if which not in flips:
                return _Run(u_star, schedule)
            word = _flip(word, which)
            schedule.append((u_star, word))
            cur = track(hi, word, None)
            if cur is None or _wrapped_arc(cur, which) < -1e-9:
                return _Run(u_star, schedule)
        length = measure(hi, cur)
        if abs(length - last) > jump:
            return _Run(lo, schedule)
        if length > last + _RISE:
            return _Run(_lowest(length_at, max(lo - step, 0.0), hi), schedule)
        last, prev = length, cur
    return _Run(u_max, schedule)


def _run_family(curve: CsCurve, track: Tracker, run: _Run, frame: Callable[[float, CscWord], CsCurve]) -> Family:
    def family(p: float) -> CsCurve:
        if p <= 0.0:
            return curve
        u = p * run.reach
        word = _word_at(run.schedule, u)
        ref = track(max(u - _SETTLE_LOOKBACK, 0.0), word, None)
        sol = track(u, word, ref)
        if sol is None:
            raise MoveInfeasibleError(f"word {word.value} breaks at {u:.6g}")
        return frame(u, sol)

    return family


def _free_tail(curve: CsCurve) -> tuple[float, Word]:
    """Start of the longest tail of ``curve`` that is an arc and a segment into the end point."""
    L, n, kappa = curve.length, curve.complexity, curve.kappa
    for k in range(max(n - 2, 0), n):
        s = curve.offsets[k]
        piece = subcurve(curve, s, L)
        for side in (1, -1):
            sol = solve_cs(piece.start_config, piece.end_point, kappa, side)
            if sol is None or abs(sol.length - piece.length) > _SAME_PATH_TOL * max(1.0, piece.length):
                continue
            if _same_path(word_path(piece.start_config, sol, kappa), piece):
                return s, sol.word
    raise MoveInfeasibleError("the curve does not end with an arc and a segment")


def retract_tail(
    curve: CsCurve,
    until: float | None = None,
    free: bool = False,
    steps: int | None = None,
) -> HomotopyTrace:
    """Pull curve[0, until] tight, working back from ``until`` toward the start.

    Frame p keeps curve[0, s] and everything after ``until`` and joins the two
    by a CSC path, one word at a time, with s falling from where the curve
    stops being a single CSC path. With ``free`` the path is an arc and a
    segment into the end point, whose heading follows. Frame length never
    grows; the pull stops where its word breaks.
    """
    L, kappa = curve.length, curve.kappa
    b = L if until is None else until
    if not settings.eps_join < b <= L + settings.eps_join:
        raise DomainError(f"pull target s={b} outside (0, {L}]")
    b = min(b, L)
    if free:
        if b < L - settings.eps_join:
            raise DomainError("a free end heading needs the pull to run to the end point")
        s0, word0 = _free_tail(curve)
        finish = curve.end_point

        def track(u: float, word: Word, ref: CscWord | None) -> CscWord | None:
            return solve_cs(config_at(curve, s0 - u), finish, kappa, word.sides[0], ref)

    else:
        s0, sol0 = _tail_window(curve, b)
        word0 = sol0.word
        goal = config_at(curve, b)

        def track(u: float, word: Word, ref: CscWord | None) -> CscWord | None:
            return solve_word(config_at(curve, s0 - u), goal, kappa, word, ref)

    rest = L - b
    suffix = _piece(curve, b, L)
    run = _march(track, s0, word0, lambda u, sol: s0 - u + sol.length + rest, _MARCH_STEP * kappa.r)
    if run.reach <= settings.eps_join:
        raise MoveInfeasibleError(f"curve[0, {b:.6g}] does not pull any tighter")

    def frame(u: float, sol: CscWord) -> CsCurve:
        s = max(s0 - u, 0.0)
        return CsCurve(kappa, _piece(curve, 0.0, s) + word_path(config_at(curve, s), sol, kappa).components + suffix)

    params = {"until": b, "free": free, "reach": run.reach, "words": [w.value for _, w in run.schedule]}
    return trace_from_family(_run_family(curve, track, run, frame), MoveKind.TYPE_II, params, steps)


def turn_start(curve: CsCurve, free: bool = False, steps: int | None = None) -> HomotopyTrace:
    """Turn the start heading the way the first arc bends, which shortens that arc.

    The start position stays and the CSC window at the head is re-solved so
    the rest of the curve keeps still. With ``free`` the whole curve must be
    an arc and a segment, and its end heading follows. The turn stops where
    the first arc vanishes, where the word breaks or where the length would
    grow.
    """
    L, kappa = curve.length, curve.kappa
    start = curve.start_config
    if free:
        s0, word0 = _free_tail(curve)
        if s0 > settings.eps_join:
            raise PreconditionError("the curve is not a single arc and segment")
        finish, suffix, flips = curve.end_point, (), ()
        side = word0.sides[0]

        def track(u: float, word: Word, ref: CscWord | None) -> CscWord | None:
            return solve_cs(Config(start.position, start.heading + side * u), finish, kappa, word.sides[0], ref)

    else:
        w, sol0 = _head_window(curve, 0.0)
        word0 = sol0.word
        goal, suffix, flips = config_at(curve, w), _piece(curve, w, L), (2,)
        side = word0.sides[0]

        def track(u: float, word: Word, ref: CscWord | None) -> CscWord | None:
            return solve_word(Config(start.position, start.heading + side * u), goal, kappa, word, ref)

    rest = sum(c.length for c in suffix)
    run = _march(track, TWO_PI, word0, lambda u, sol: sol.length + rest, _MARCH_STEP, flips)
    if run.reach <= settings.eps_angle:
        raise MoveInfeasibleError("the start heading does not turn any shorter")

    def frame(u: float, sol: CscWord) -> CsCurve:
        begin = Config(start.position, start.heading + side * u)
        return CsCurve(kappa, word_path(begin, sol, kappa).components + suffix)

    params = {"z": 0.0, "side": side, "phi": run.reach, "free": free, "words": [w.value for _, w in run.schedule]}
    return trace_from_family(_run_family(curve, track, run, frame), MoveKind.TYPE_I, params, steps)


def _from_start(move: Callable[..., HomotopyTrace], curve: CsCurve, **kwargs: Any) -> HomotopyTrace:
    trace = move(reverse(curve), **kwargs)
    frames = tuple(Frame(f.p, reverse(f.curve)) for f in trace.frames)
    moves = tuple(replace(m, params={**m.params, "from_start": True}) for m in trace.moves)
    return HomotopyTrace(frames, moves)


def retract_head(
    curve: CsCurve,
    since: float | None = None,
    free: bool = False,
    steps: int | None = None,
) -> HomotopyTrace:
    """``retract_tail`` run from the start: pulls curve[since, L] tight toward the end."""
    until = None if since is None else curve.length - since
    return _from_start(retract_tail, curve, until=until, free=free, steps=steps)


def turn_end(curve: CsCurve, free: bool = False, steps: int | None = None) -> HomotopyTrace:
    """``turn_start`` at the end point."""
    return _from_start(turn_start, curve, free=free, steps=steps)


# ---------------------------------------------------------------------------
# Reduction to the class minimizer
# ---------------------------------------------------------------------------


def canonical_minimizer(x: Point2, y: Point2, kappa: KappaParams, label: ClassLabel) -> CsCurve:
    """Shortest curve of the class, in the orientation ``reduce`` ends on."""
    if label not in labels_for(x, y, kappa):
        raise DomainError(f"label {label.value} is inconsistent with d = {Point2(*x).distance(y):.6g}")
    x, y = Point2(*x), Point2(*y)
    if label is ClassLabel.CLOSED:
        return circle_through(x, 0.0, kappa, 1)
    if label is ClassLabel.NOT_IN_LENS:
        return build_lens(x, y, kappa).longer_arc(1)
    return CsCurve(kappa, (SegmentComponent(x, y),))


def _settle_targets(curve: CsCurve, label: ClassLabel, word: Word) -> tuple[float, float] | None:
    x, y = curve.start_point, curve.end_point
    if label is ClassLabel.CLOSED:
        a, b = curve.start_config.heading, curve.end_config.heading
        mean = a + normalize_angle(b - a) / 2.0
        return mean, mean
    if label is ClassLabel.NOT_IN_LENS:
        lens = build_lens(x, y, curve.kappa)
        if word is Word.RSR:
            arc = lens.longer_arc(1)
        elif word is Word.LSL:
            arc = lens.longer_arc(2)
        else:
            return None
        return arc.start_config.heading, arc.end_config.heading
    chord = math.atan2(y.y - x.y, y.x - x.x)
    return chord, chord


def _settle(curve: CsCurve, label: ClassLabel, steps: int | None = None) -> HomotopyTrace | None:
    """Turn both end headings of a single-word curve toward the class minimizer."""
    sol0 = _word_of(curve)
    if sol0 is None:
        return None
    targets = _settle_targets(curve, label, sol0.word)
    if targets is None:
        return None
    h0, h1 = curve.start_config.heading, curve.end_config.heading
    d0, d1 = normalize_angle(targets[0] - h0), normalize_angle(targets[1] - h1)
    if max(abs(d0), abs(d1)) <= settings.eps_angle:
        return None
    x, y, kappa, word = curve.start_point, curve.end_point, curve.kappa, sol0.word

    def ends(p: float) -> tuple[Config, Config]:
        return Config(x, h0 + p * d0), Config(y, h1 + p * d1)

    def family(p: float) -> CsCurve:
        if p <= 0.0:
            return curve
        ref = solve_word(*ends(max(p - _SETTLE_LOOKBACK, 0.0)), kappa, word)
        start, end = ends(p)
        sol = solve_word(start, end, kappa, word, reference=ref)
        if sol is None:
            raise MoveInfeasibleError(f"word {word.value} breaks while settling at p={p:.6g}")
        return word_path(start, sol, kappa)

    params = {"word": word.value, "start_rotation": d0, "end_rotation": d1}
    return trace_from_family(family, MoveKind.TYPE_I, params, steps)


def _windows_by_gain(curve: CsCurve, tol: float) -> list[tuple[float, tuple[int, int]]]:
    out = []
    n = curve.complexity
    for size in (3, 2):
        for i in range(n - size + 1):
            j = i + size - 1
            piece = subcurve(curve, curve.offsets[i], curve.offsets[j + 1])
            try:
                best = solve_csc(piece.start_config, piece.end_config, curve.kappa).best
            except InfeasibleError:
                continue
            gain = piece.length - best.length
            if gain > tol:
                out.append((gain, (i, j)))
    out.sort(key=lambda item: -item[0])
    return out


def _spans_by_gain(curve: CsCurve, tol: float) -> list[tuple[float, tuple[float, float]]]:
    """Fragments of width ``fragment_lambda * r`` whose CSC replacement is shorter, best first.

    Two fragmentations are scanned, the second shifted by half a fragment.
    Replacements that would add components are left out.
    """
    L = curve.length
    width = settings.fragment_lambda * curve.kappa.r
    out = []
    for shift in (0.0, 0.5 * width):
        a = shift
        while a < L - settings.eps_join:
            b = min(a + width, L)
            piece = subcurve(curve, a, b)
            try:
                best = solve_csc(piece.start_config, piece.end_config, curve.kappa).best
            except InfeasibleError:
                best = None
            if best is not None and piece.length - best.length > tol:
                repl = word_path(piece.start_config, best, curve.kappa).components
                result = CsCurve(curve.kappa, _piece(curve, 0.0, a) + repl + _piece(curve, b, L))
                if merge_components(result).complexity <= curve.complexity:
                    out.append((piece.length - best.length, (a, b)))
            a = b
    out.sort(key=lambda item: -item[0])
    return out


def _rejection(curve: CsCurve, trace: HomotopyTrace, label: ClassLabel, tol: float) -> str | None:
    result = merge_components(trace.last)
    if result.length >= curve.length - tol:
        return "length does not decrease"
    if result.complexity > curve.complexity:
        return f"complexity grows from {curve.complexity} to {result.complexity}"
    prev = curve.length
    for k, c in enumerate(trace.curves):
        if c.length > prev + settings.length_tol:
            return f"frame {k} is longer than its predecessor"
        prev = c.length
        if not validate_cs(c).valid:
            return f"frame {k} is not kappa-constrained"
        if class_label(c) is not label:
            return f"frame {k} leaves the {label.value} class"
    return None


def _candidates(
    curve: CsCurve,
    label: ClassLabel,
    tol: float,
    steps: int | None = None,
) -> Iterator[tuple[str, Callable[[], HomotopyTrace | None]]]:
    yield "settle", lambda: _settle(curve, label, steps)
    for gain, window in _windows_by_gain(curve, tol):
        yield f"window {window} (gain {gain:.3e})", lambda w=window: move_type2(curve, w, steps)
    for gain, span in _spans_by_gain(curve, tol):
        yield f"span [{span[0]:.6g}, {span[1]:.6g}] (gain {gain:.3e})", lambda ab=span: replace_span(curve, *ab, steps)
    for free in (True, False):
        mode = "free" if free else "fixed"
        yield f"{mode} pull to the end", lambda f=free: retract_tail(curve, free=f, steps=steps)
        yield f"{mode} pull to the start", lambda f=free: retract_head(curve, free=f, steps=steps)
        yield f"{mode} start turn", lambda f=free: turn_start(curve, free=f, steps=steps)
        yield f"{mode} end turn", lambda f=free: turn_end(curve, free=f, steps=steps)
    for k in range(curve.complexity - 1, 1, -1):
        s = curve.offsets[k]
        yield f"pull to s={s:.6g}", lambda b=s: retract_tail(curve, until=b, steps=steps)


def reduce_step(curve: CsCurve, steps: int | None = None) -> tuple[CsCurve, HomotopyTrace] | None:
    """One length-decreasing move that keeps every frame in the class of ``curve``.

    Returns the merged result with its trace, or None when no candidate move
    qualifies.
    """
    curve = merge_components(curve)
    label = class_label(curve)
    tol = settings.reduce_rel_tol * curve.length
    for name, build in _candidates(curve, label, tol, steps):
        try:
            trace = build()
        except (MoveInfeasibleError, PreconditionError, CurveValidationError) as e:
            logger.debug(f"candidate {name} unavailable: {e}")
            continue
        if trace is None:
            continue
        reason = _rejection(curve, trace, label, tol)
        if reason is not None:
            logger.debug(f"rejected candidate {name}: {reason}")
            continue
        logger.debug(f"applied {name}")
        return merge_components(trace.last), trace
    return None


def _nearest_minimizer(curve: CsCurve, label: ClassLabel) -> CsCurve:
    x, y, kappa = curve.start_point, curve.end_point, curve.kappa
    if label is ClassLabel.CLOSED:
        first = curve.components[0]
        side = first.side if isinstance(first, ArcComponent) else 1
        return circle_through(x, curve.start_config.heading, kappa, side)
    if label is ClassLabel.NOT_IN_LENS:
        lens = build_lens(x, y, kappa)
        return min((lens.longer_arc(1), lens.longer_arc(2)), key=lambda arc: hausdorff(curve, arc))
    return CsCurve(kappa, (SegmentComponent(x, y),))


def _settled(current: CsCurve, label: ClassLabel) -> HomotopyTrace | None:
    """Last frame onto the exact minimizer once ``current`` is within tolerance of it."""
    exact = _nearest_minimizer(current, label)
    if _same_path(current, exact):
        return None
    gap = hausdorff(current, exact)
    if gap > frame_delta(current.kappa):
        raise NonConvergenceError(f"reduction ended {gap:.3e} away from the {label.value} minimizer")
    return HomotopyTrace.from_curves([current, exact], [ElementaryMove(MoveKind.TYPE_II, 0, 1, {"snap": True})])


def _on_circle(curve: CsCurve, center: Point2) -> bool:
    tol = _SAME_PATH_TOL * max(1.0, curve.kappa.r)
    return all(isinstance(c, ArcComponent) and c.center.distance(center) <= tol for c in curve.components)


def _circle_state(curve: CsCurve) -> tuple[int, float]:
    merged = merge_components(curve)
    comp = merged.components[0]
    if merged.complexity != 1 or not isinstance(comp, ArcComponent):
        raise DomainError("closed minimizer is not a single circle")
    return comp.side, merged.start_config.heading


def circle_bridge(
    x: Point2,
    kappa: KappaParams,
    heading_from: float,
    heading_to: float,
    side: int = 1,
    steps: int | None = None,
) -> HomotopyTrace:
    """Rotate a circle through ``x`` from one start heading to another."""
    turn = normalize_angle(heading_to - heading_from)
    if abs(turn) <= settings.eps_angle:
        return HomotopyTrace.identity(circle_through(x, heading_from, kappa, side))

    def family(p: float) -> CsCurve:
        return circle_through(x, heading_from + p * turn, kappa, side)

    return trace_from_family(family, MoveKind.TYPE_I, {"z": 0.0, "side": side, "phi": turn}, steps)


def _circles_between(a: CsCurve, b: CsCurve, steps: int | None = None) -> HomotopyTrace | None:
    side_a, head_a = _circle_state(a)
    side_b, head_b = _circle_state(b)
    # a circle run the other way round has the same image from the opposite heading
    target = head_b if side_b == side_a else head_b + math.pi
    if angle_gap(head_a, target) <= settings.eps_angle:
        return None
    return circle_bridge(a.start_point, a.kappa, head_a, target, side_a, steps)


def _arcs_between(a: CsCurve, b: CsCurve, steps: int | None = None) -> HomotopyTrace | None:
    lens = build_lens(a.start_point, a.end_point, a.kappa)
    which_a = 1 if _on_circle(a, lens.c1) else 2
    which_b = 1 if _on_circle(b, lens.c1) else 2
    if which_a == which_b:
        return None
    trace = homotope_arc_to_arc(lens, steps)
    return trace if which_a == 2 else reverse_trace(trace)


def _bridge(a: CsCurve, b: CsCurve, label: ClassLabel, steps: int | None = None) -> HomotopyTrace | None:
    if label is ClassLabel.CLOSED:
        return _circles_between(a, b, steps)
    if label is ClassLabel.NOT_IN_LENS:
        return _arcs_between(a, b, steps)
    return None


def reduce(
    curve: Curve,
    canonical: bool = True,
    steps: int | None = None,
    tol: float | None = None,
) -> HomotopyTrace:
    """Homotopy from ``curve`` to a minimal-length curve of its class.

    Sampled input is normalized to a cs curve first. ``steps`` is the coarse
    frame count of every move and ``tol`` the distance to the class minimum
    length at which reduction counts as done; a final frame then lands on
    the exact minimizer. With ``canonical`` the trace ends on
    ``canonical_minimizer`` of the class.
    """
    if isinstance(curve, SampledCurve):
        curve = normalize(curve)
    current = merge_components(curve)
    label = class_label(current)
    x, y, kappa = current.start_point, current.end_point, current.kappa
    target = class_minimum_length(x, y, kappa, label)
    floor = _MINIMUM_TOL * max(1.0, kappa.r)
    tol = floor if tol is None else tol
    if tol <= 0.0:
        raise DomainError(f"reduction tolerance must be positive, got {tol}")
    trace = HomotopyTrace.identity(current)
    count = 0
    while current.length > target + tol:
        if count >= settings.reduce_max_iter:
            raise NonConvergenceError(f"no {label.value} minimizer after {count} reduction steps")
        found = reduce_step(current, steps)
        if found is None:
            raise NonConvergenceError(
                f"reduction stalled at length {current.length:.12g}; the {label.value} minimum is {target:.12g}"
            )
        current, step = found
        trace = concat_traces(trace, step)
        count += 1
        logger.debug(f"reduction step {count}: length {current.length:.12g}")
    if current.length > target + floor:
        logger.info(f"stopped {current.length - target:.3e} above the {label.value} minimum")
        return trace
    snap = _settled(current, label)
    if snap is not None:
        trace = concat_traces(trace, snap)
    if canonical:
        bridge = _bridge(trace.last, canonical_minimizer(x, y, kappa, label), label, steps)
        if bridge is not None:
            trace = concat_traces(trace, bridge)
    logger.info(f"reduced {label.value} curve to length {trace.last.length:.12g} in {len(trace)} frames")
    return trace


# ---------------------------------------------------------------------------
# The two long arcs of a lens
# ---------------------------------------------------------------------------


def _half_turn(curve: CsCurve, center: Point2) -> CsCurve:
    return reverse(rotate(curve, center, math.pi))


def homotope_arc_to_arc(lens: LensGeometry, steps: int | None = None) -> HomotopyTrace:
    """Homotopy from the longer arc of C2 to the longer arc of C1.

    The first half stretches C2 away from the lens, twists the head of the
    stretched curve around x, and pulls it across to the far side of D1.
    Its last frame is symmetric under the half turn about the midpoint of
    xy; the second half is the first one mapped by that half turn and run
    backwards.
    """
    r, kappa = lens.r, lens.kappa
    beta = math.asin(lens.d / (2.0 * r))
    stretch = _STRETCH * r
    nx, ny = -(lens.y.y - lens.x.y) / lens.d, (lens.y.x - lens.x.x) / lens.d
    psi = math.atan2(lens.y.y - lens.x.y, lens.y.x - lens.x.x)

    arc2 = lens.longer_arc(2)
    t1, t2 = r * (math.pi / 2.0 - beta), r * (3.0 * math.pi / 2.0 - beta)
    stage_a = move_type3(arc2, t1, t2, stretch, steps)
    stretched = stage_a.last

    stage_b = move_type1(stretched, 0.0, 1, TWO_PI - 2.0 * beta, steps)

    joint = t2 + stretch
    far = config_at(stretched, joint)
    rest = _piece(stretched, joint, stretched.length)
    start = Config(lens.x, psi + math.pi - beta)
    swing = arc_from(start, -1, math.pi / 2.0 - beta, r)
    side_point = end_of(swing)

    def pull(p: float) -> CsCurve:
        lift = p * stretch
        base = Config(side_point.position.offset(lift * nx, lift * ny), side_point.heading)
        sol = solve_word(base, far, kappa, Word.RSL)
        if sol is None:
            raise MoveInfeasibleError(f"no RSL continuation at lift {lift:.6g}")
        lifted = (segment_from(side_point, lift),) if lift > 0.0 else ()
        return CsCurve(kappa, (swing,) + lifted + word_path(base, sol, kappa).components + rest)

    stage_c = trace_from_family(pull, MoveKind.TYPE_III, {"displacement": stretch}, steps)

    first_half = _concat_all([stage_a, stage_b, stage_c])
    mid = Point2((lens.x.x + lens.y.x) / 2.0, (lens.y.y + lens.x.y) / 2.0)
    mirrored = HomotopyTrace.from_curves(
        [_half_turn(c, mid) for c in first_half.curves],
        [replace(m, params={**m.params, "mirrored": True}) for m in first_half.moves],
    )
    trace = concat_traces(first_half, reverse_trace(mirrored))
    logger.info(f"arc-to-arc homotopy for d={lens.d:.6g}, r={r:.6g}: {len(trace)} frames")
    return trace


# ---------------------------------------------------------------------------
# Homotopies between two curves and their verification
# ---------------------------------------------------------------------------


def build_homotopy(a: Curve, b: Curve, steps: int | None = None) -> HomotopyTrace:
    """Homotopy from ``a`` to ``b`` through their common class minimizers."""
    if a.kappa != b.kappa:
        raise DomainError(f"curves have different kappa ({a.kappa.kappa} vs {b.kappa.kappa})")
    tol = settings.eps_join * max(1.0, a.kappa.r)
    if a.start_point.distance(b.start_point) > tol or a.end_point.distance(b.end_point) > tol:
        raise DomainError("curves do not share their endpoints")
    label_a, label_b = class_label(a), class_label(b)
    if label_a is not label_b:
        raise ClassMismatchError(label_a.value, label_b.value)
    to_a, to_b = reduce(a, canonical=False, steps=steps), reduce(b, canonical=False, steps=steps)
    parts = [to_a]
    bridge = _bridge(to_a.last, to_b.last, label_a, steps)
    if bridge is not None:
        parts.append(bridge)
    parts.append(reverse_trace(to_b))
    trace = _concat_all(parts)
    logger.info(f"built {label_a.value} homotopy with {len(trace)} frames")
    return trace


def verify_trace(trace: HomotopyTrace) -> ValidationReport:
    """Check every frame, the fixed endpoints, frame spacing and class constancy."""
    r = trace.kappa.r
    tol = settings.eps_join * max(1.0, r)
    delta = frame_delta(trace.kappa)
    x0, y0 = trace.first.start_point, trace.first.end_point
    violations: list[Violation] = []
    max_k = worst_gap = 0.0
    label0: ClassLabel | None = None
    prev: CsCurve | None = None
    for k, frame in enumerate(trace.frames):
        c = frame.curve
        report = validate_cs(c)
        max_k = max(max_k, report.max_curvature)
        worst_gap = max(worst_gap, report.worst_joint_gap)
        violations.extend(replace(v, frame=k) for v in report.violations)
        drift = max(c.start_point.distance(x0), c.end_point.distance(y0))
        if drift > tol:
            violations.append(Violation(0.0, "endpoint", drift, k))
        if prev is not None:
            jump = hausdorff(prev, c)
            if jump > delta * (1.0 + 1e-9):
                violations.append(Violation(0.0, "continuity", jump, k))
        if report.valid and drift <= tol:
            label = class_label(c)
            if label0 is None:
                label0 = label
            elif label is not label0:
                violations.append(Violation(0.0, "class", 1.0, k))
        prev = c
    report = ValidationReport.from_violations(max_k, worst_gap, violations)
    if not report.valid:
        logger.warning(f"trace of {len(trace)} frames has {len(report.violations)} violations")
    return report
