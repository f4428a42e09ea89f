"""Environment potential field: swarm field plus obstacle fields, and its binarization.

All evaluators accept either a single :class:`Vec2` (returning a float) or an
array of points with trailing dimension 2 (returning an array).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Obstacle, UavState, Vec2

EPS_R = 0.1  # denominator clamp, meters
V_FLOOR = 1.0  # minimum obstacle-field speed, m/s


class DegenerateDirectionError(ValueError):
    """Destination coincides with the swarm centre; no travel direction."""


def _points(q) -> tuple[np.ndarray, bool]:
    if isinstance(q, Vec2):
        return np.array([q.x, q.y]), True
    arr = np.asarray(q, dtype=float)
    return arr, arr.ndim == 1


@dataclass(frozen=True)
class SwarmFieldParams:
    virtual_leader: Vec2
    swarm_speed: float
    influence_radius: float
    advance_offset: float
    destination_dir: Vec2

    def __post_init__(self):
        if abs(self.destination_dir.norm() - 1.0) > 1e-9:
            raise ValueError("destination_dir must be a unit vector")
        if not self.influence_radius > 0:
            raise ValueError("swarm influence_radius must be > 0")
        if self.swarm_speed < 0 or self.advance_offset < 0:
            raise ValueError("swarm_speed and advance_offset must be >= 0")


@dataclass(frozen=True)
class ObstacleFieldParams:
    center: Vec2
    obstacle_speed: float
    plateau_radius: float
    influence_radius: float
    effective_speed: float

    def __post_init__(self):
        if not 0 < self.plateau_radius < self.influence_radius:
            raise ValueError("need 0 < plateau_radius < influence_radius")
        if not self.effective_speed > 0:
            raise ValueError("effective_speed must be > 0")

    @classmethod
    def from_obstacle(cls, obs: Obstacle, swarm_speed: float, v_floor: float = V_FLOOR):
        v_o = obs.speed
        return cls(obs.position, v_o, obs.forbidden_radius, obs.influence_radius,
                   max(v_o, swarm_speed, v_floor))


@dataclass(frozen=True)
class EnvironmentField:
    swarm: SwarmFieldParams | None
    obstacles: tuple[ObstacleFieldParams, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))


@dataclass(frozen=True)
class BinaryFieldView:
    base: EnvironmentField
    threshold: float

    def __post_init__(self):
        if not math.isfinite(self.threshold):
            raise ValueError("binarization threshold must be finite")


def virtual_leader(
    positions: Sequence[Vec2], destination: Vec2, s_adv: float | None = None
) -> tuple[Vec2, Vec2, float]:
    """Return ``(p_star, p_bar, s_adv)``: leader, swarm centre and advance offset.

    Without an explicit ``s_adv`` the offset is the largest member distance
    from the centre.
    """
    if not positions:
        raise ValueError("virtual_leader needs at least one position")
    n = len(positions)
    p_bar = Vec2(sum(p.x for p in positions) / n, sum(p.y for p in positions) / n)
    to_dest = destination - p_bar
    if to_dest.norm() == 0.0:
        raise DegenerateDirectionError(f"destination {destination} equals swarm centre")
    pd = to_dest.unit()
    if s_adv is None:
        s_adv = max(p.dist(p_bar) for p in positions)
    return p_bar + pd * s_adv, p_bar, s_adv


def swarm_speed(states: Sequence[UavState]) -> float:
    if not states:
        raise ValueError("swarm_speed needs at least one state")
    return sum(s.speed for s in states) / len(states)


def build_swarm_field(
    states: Sequence[UavState],
    destination: Vec2,
    s_adv: float | None = None,
    influence_radius: float | None = None,
    range_factor: float = 1.5,
) -> SwarmFieldParams:
    """Swarm field anchored at the virtual leader.

    ``influence_radius`` defaults to ``range_factor`` times the farthest member
    distance from the leader (never below ``EPS_R``); an explicit value smaller
    than that distance is rejected.
    """
    positions = [s.position for s in states]
    p_star, p_bar, s_adv = virtual_leader(positions, destination, s_adv)
    reach = max(p.dist(p_star) for p in positions)
    if influence_radius is None:
        influence_radius = max(range_factor * reach, EPS_R)
    elif influence_radius < reach:
        raise ValueError(f"swarm influence radius {influence_radius} < member reach {reach}")
    pd = (destination - p_bar).unit()
    return SwarmFieldParams(p_star, swarm_speed(states), influence_radius, s_adv, pd)


def build_field(
    states: Sequence[UavState],
    obstacles: Sequence[Obstacle],
    destination: Vec2,
    s_adv: float | None = None,
    range_factor: float = 1.5,
) -> EnvironmentField:
    swarm = build_swarm_field(states, destination, s_adv, range_factor=range_factor)
    obs = tuple(ObstacleFieldParams.from_obstacle(o, swarm.swarm_speed) for o in obstacles)
    return EnvironmentField(swarm, obs)


def _swarm_values(params: SwarmFieldParams, pts: np.ndarray) -> np.ndarray:
    c = np.array([params.virtual_leader.x, params.virtual_leader.y])
    d = np.linalg.norm(pts - c, axis=-1)
    val = params.swarm_speed / np.maximum(d, EPS_R) ** 2
    return np.where(d <= params.influence_radius, val, 0.0)


def _obstacle_values(params: ObstacleFieldParams, pts: np.ndarray) -> np.ndarray:
    c = np.array([params.center.x, params.center.y])
    d = np.linalg.norm(pts - c, axis=-1)
    r = np.maximum(d, params.plateau_radius)
    val = params.effective_speed / r**2
    return np.where(d <= params.influence_radius, val, 0.0)


def swarm_field_at(params: SwarmFieldParams, q):
    pts, scalar = _points(q)
    out = _swarm_values(params, pts)
    return float(out) if scalar else out


def obstacle_field_at(params: ObstacleFieldParams, q):
    pts, scalar = _points(q)
    out = _obstacle_values(params, pts)
    return float(out) if scalar else out


def field_values(field: EnvironmentField, pts: np.ndarray) -> np.ndarray:
    total = np.zeros(pts.shape[:-1])
    if field.swarm is not None:
        total = total + _swarm_values(field.swarm, pts)
    for o in field.obstacles:
        total = total + _obstacle_values(o, pts)
    return total


def field_at(field: EnvironmentField, q):
    pts, scalar = _points(q)
    out = field_values(field, pts)
    return float(out) if scalar else out


def binarize(field: EnvironmentField, threshold: float) -> BinaryFieldView:
    return BinaryFieldView(field, float(threshold))


def binary_at(view: BinaryFieldView, q):
    pts, scalar = _points(q)
    out = np.where(field_values(view.base, pts) >= view.threshold, 1, -1)
    return int(out) if scalar else out


def binary_gradient_values(view: BinaryFieldView, pts: np.ndarray, h: float) -> np.ndarray:
    """Normalized central-difference gradient magnitude of the binary field.

    Each axis difference is ``(b(+h) - b(-h)) / 2h`` in ``{-1/h, 0, 1/h}``;
    the magnitude is scaled by ``h`` and capped at 1, so any stencil that
    straddles the level set scores 1 and uniform regions score 0.
    """
    if not h > 0:
        raise ValueError(f"gradient step must be > 0, got {h}")
    offsets = np.array([[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    stencil = pts[..., None, :] + offsets
    b = np.where(field_values(view.base, stencil) >= view.threshold, 1.0, -1.0)
    gx = (b[..., 0] - b[..., 1]) / (2 * h)
    gy = (b[..., 2] - b[..., 3]) / (2 * h)
    return np.minimum(np.hypot(gx, gy) * h, 1.0)


def binary_gradient_mag(view: BinaryFieldView, q, h: float):
    pts, scalar = _points(q)
    out = binary_gradient_values(view, pts, h)
    return float(out) if scalar else out


def raster(field: EnvironmentField, xlim: tuple[float, float], ylim: tuple[float, float],
           nx: int, ny: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Grid scan of the field; ``values[j, i]`` is the intensity at ``(xs[i], ys[j])``."""
    xs = np.linspace(xlim[0], xlim[1], nx)
    ys = np.linspace(ylim[0], ylim[1], ny)
    gx, gy = np.meshgrid(xs, ys)
    return xs, ys, field_values(field, np.stack([gx, gy], axis=-1))


def write_raster_csv(path, xs: np.ndarray, ys: np.ndarray, values: np.ndarray) -> None:
    """Write a raster as CSV: header row of x coordinates, then one row per y."""
    with open(path, "w", newline="") as fh:
        fh.write("y\\x," + ",".join(repr(float(x)) for x in xs) + "\n")
        for y, row in zip(ys, values):
            fh.write(repr(float(y)) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def read_raster_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")[1:]
        rows = [line.strip().split(",") for line in fh if line.strip()]
    xs = np.array([float(x) for x in header])
    ys = np.array([float(r[0]) for r in rows])
    values = np.array([[float(v) for v in r[1:]] for r in rows])
    return xs, ys, values
