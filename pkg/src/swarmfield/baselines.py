"""Waypoint PSO baselines used for comparison.

Both plan one waypoint per tick inside a disk of radius ``step_length`` around
the UAV. They model only the behaviour the comparison needs:

* ``ffpso`` minimizes distance to the destination; obstacle centres and other
  UAVs inside ``repulsion_range`` push particles away through an extra term in
  the velocity update. Because the fitness ignores obstacles, the waypoint is
  the best particle of the *final* population, i.e. after the force field has
  shaped it, rather than the historical incumbent.
* ``ppso`` minimizes an attractive goal term plus obstacle field intensities,
  with a heading-deviation penalty (the smoothing field) switched on while an
  obstacle is within ``smoothing_radius``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .core import FfpsoConfig, Obstacle, PpsoConfig, UavState, Vec2
from .field import EPS_R, ObstacleFieldParams, _obstacle_values
from .pso import pso_minimize


def _disk_projector(radius: float):
    def project(x: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(x, axis=1, keepdims=True)
        scale = np.where(r > radius, radius / np.maximum(r, 1e-300), 1.0)
        return x * scale
    return project


def _box(radius: float):
    return ((-radius, radius), (-radius, radius))


def ffpso_plan_step(
    uav: UavState,
    obstacles: Sequence[Obstacle],
    others: Sequence[UavState],
    destination: Vec2,
    cfg: FfpsoConfig,
    step_length: float,
    seed: int = 0,
) -> Vec2:
    p = np.array([uav.position.x, uav.position.y])
    dest = np.array([destination.x, destination.y])
    sources = [(np.array([o.position.x, o.position.y]), 1.0) for o in obstacles]
    sources += [(np.array([u.position.x, u.position.y]), cfg.neighbor_scale)
                for u in others if u.id != uav.id]

    def repulsion(x: np.ndarray) -> np.ndarray:
        w = p + x
        push = np.zeros_like(x)
        for s, scale in sources:
            diff = w - s
            d = np.linalg.norm(diff, axis=1, keepdims=True)
            inside = d <= cfg.repulsion_range
            unit = diff / np.maximum(d, 1e-300)
            push += np.where(inside, scale * cfg.repulsion_gain * unit / np.maximum(d, EPS_R) ** 2, 0.0)
        return push

    def fitness(x: np.ndarray) -> np.ndarray:
        return np.linalg.norm(p + x - dest, axis=1)

    pso_cfg = replace(cfg.base, bounds=_box(step_length), rng_seed=seed)
    result = pso_minimize(pso_cfg, fitness, vectorized=True,
                          extra_velocity=repulsion if sources else None,
                          project=_disk_projector(step_length))
    final = np.array([pt.position for pt in result.particles])
    best = final[int(np.argmin(result.final_fitness))]
    return Vec2(*(p + best))


@dataclass(frozen=True)
class SmoothedField:
    """Goal attraction, obstacle intensities and the smoothing penalty seen by one UAV."""

    destination: Vec2
    obstacles: tuple[ObstacleFieldParams, ...]
    prev_heading: float
    attract_gain: float = 1.0
    repulse_gain: float = 1200.0
    smoothing_radius: float = math.inf

    def smoothing_active(self, position: Vec2) -> bool:
        return any(o.center.dist(position) <= self.smoothing_radius for o in self.obstacles)


def ppso_plan_step(
    uav: UavState,
    field_with_smoothing: SmoothedField,
    cfg: PpsoConfig,
    step_length: float,
    seed: int = 0,
) -> Vec2:
    sf = field_with_smoothing
    p = np.array([uav.position.x, uav.position.y])
    dest = np.array([sf.destination.x, sf.destination.y])
    smooth = cfg.smoothing_weight if sf.smoothing_active(uav.position) else 0.0

    def fitness(x: np.ndarray) -> np.ndarray:
        w = p + x
        val = sf.attract_gain * np.linalg.norm(w - dest, axis=1)
        for o in sf.obstacles:
            val = val + sf.repulse_gain * _obstacle_values(o, w)
        if smooth:
            turn = np.arctan2(x[:, 1], x[:, 0]) - sf.prev_heading
            turn = np.remainder(turn + np.pi, 2 * np.pi) - np.pi
            val = val + smooth * turn**2
        return val

    pso_cfg = replace(cfg.base, bounds=_box(step_length), rng_seed=seed)
    result = pso_minimize(pso_cfg, fitness, vectorized=True,
                          project=_disk_projector(step_length))
    return Vec2(*(p + result.best_position))


def smoothed_field_for(uav: UavState, obstacles: Sequence[Obstacle], destination: Vec2,
                       cfg: PpsoConfig, swarm_speed: float) -> SmoothedField:
    params = tuple(ObstacleFieldParams.from_obstacle(o, swarm_speed) for o in obstacles)
    return SmoothedField(destination, params, uav.heading, cfg.attract_gain,
                         cfg.repulse_gain, cfg.smoothing_radius)
