"""Constant-curvature arcs: the two-parameter trajectory of one planning step.

An arc starts at a pose, leaves it with tangent direction ``omega`` and bends
with signed curvature ``kappa`` (positive turns left). Points are computed in
chord form::

    p(s) = p0 + s * sinc(kappa s / 2) * (cos(omega + kappa s / 2), sin(omega + kappa s / 2))

which equals the turning-centre form ``O_t + (sin(omega + kappa s), -cos(omega + kappa s)) / kappa``
for ``kappa != 0`` and stays accurate as ``kappa -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Vec2, normalize_angle

KAPPA_EPS = 1e-9


@dataclass(frozen=True)
class Pose:
    position: Vec2
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_angle(self.heading))


@dataclass(frozen=True)
class Arc:
    start: Pose
    omega: float
    kappa: float
    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"arc length must be > 0, got {self.length}")
        if not (math.isfinite(self.omega) and math.isfinite(self.kappa)):
            raise ValueError("arc parameters must be finite")

    @property
    def turning_center(self) -> Vec2 | None:
        if abs(self.kappa) < KAPPA_EPS:
            return None
        r = 1.0 / self.kappa
        return self.start.position + Vec2(-math.sin(self.omega), math.cos(self.omega)) * r


@dataclass(frozen=True)
class ArcSamples:
    points: np.ndarray
    spacing: float

    def as_vecs(self) -> list[Vec2]:
        return [Vec2(x, y) for x, y in self.points]


def arc_offsets(omega, kappa, s) -> np.ndarray:
    """Displacement from the arc start, broadcast over ``omega``, ``kappa``, ``s``.

    Returns an array of shape ``broadcast(omega, kappa, s).shape + (2,)``.
    """
    omega, kappa, s = np.broadcast_arrays(
        np.asarray(omega, float), np.asarray(kappa, float), np.asarray(s, float)
    )
    half = 0.5 * kappa * s
    chord = s * np.sinc(half / np.pi)
    mid = omega + half
    return np.stack([chord * np.cos(mid), chord * np.sin(mid)], axis=-1)


def arc_point(arc: Arc, s: float) -> Vec2:
    if not 0.0 <= s <= arc.length:
        raise ValueError(f"arc length parameter {s} outside [0, {arc.length}]")
    if s == 0.0:
        return arc.start.position
    if abs(arc.kappa) < KAPPA_EPS:
        return arc.start.position + Vec2(math.cos(arc.omega), math.sin(arc.omega)) * s
    dx, dy = arc_offsets(arc.omega, arc.kappa, s)
    return Vec2(arc.start.position.x + dx, arc.start.position.y + dy)


def arc_end_pose(arc: Arc) -> Pose:
    return Pose(arc_point(arc, arc.length), arc.omega + arc.kappa * arc.length)


def sample_arc(arc: Arc, n_s: int) -> ArcSamples:
    if n_s < 1:
        raise ValueError(f"n_s must be >= 1, got {n_s}")
    s = np.linspace(0.0, arc.length, n_s + 1)
    kappa = 0.0 if abs(arc.kappa) < KAPPA_EPS else arc.kappa
    pts = arc_offsets(arc.omega, kappa, s) + np.array([arc.start.position.x, arc.start.position.y])
    pts[0] = (arc.start.position.x, arc.start.position.y)
    return ArcSamples(pts, arc.length / n_s)


def curvature_integral(arc: Arc) -> float:
    """Integral of |kappa| along the arc, i.e. its unsigned heading change."""
    return abs(arc.kappa) * arc.length


def entry_turn(heading: float, arc: Arc) -> float:
    """Heading jump between the current motion direction and the arc's start tangent."""
    return normalize_angle(arc.omega - heading)
