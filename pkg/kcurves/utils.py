from __future__ import annotations

import math
from typing import Iterable

import numpy as np


TWO_PI = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = math.remainder(angle, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    return a


def mod2pi(angle: float) -> float:
    """Map an angle to [0, 2pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:
        a -= TWO_PI
    return a


def angle_gap(a: float, b: float) -> float:
    return abs(normalize_angle(a - b))


def heading_vector(theta: float) -> tuple[float, float]:
    return math.cos(theta), math.sin(theta)


def left_normal(theta: float) -> tuple[float, float]:
    return -math.sin(theta), math.cos(theta)


def cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def dot(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * bx + ay * by


def sign(value: float) -> int:
    return 1 if value > 0 else (-1 if value < 0 else 0)


def circumradius_curvature(points: np.ndarray) -> np.ndarray:
    """Curvature of the circle through each consecutive point triple.

    Returns an array of length ``len(points) - 2``; collinear triples give 0.
    """
    a = points[:-2]
    b = points[1:-1]
    c = points[2:]
    ab = np.linalg.norm(b - a, axis=1)
    bc = np.linalg.norm(c - b, axis=1)
    ca = np.linalg.norm(a - c, axis=1)
    area2 = np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    denom = ab * bc * ca
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(denom > 0, 2.0 * area2 / denom, 0.0)
    return k


def dedupe_pairs(pairs: Iterable[tuple[float, float]], tol: float) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for p in sorted(pairs):
        if out and abs(out[-1][0] - p[0]) <= tol and abs(out[-1][1] - p[1]) <= tol:
            continue
        out.append(p)
    return out
