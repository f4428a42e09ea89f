"""Shared value types: positions, UAV and obstacle state, scenario configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Iterator

from .energy import EnergyParams
from .pso import PsoConfig


class ConfigError(ValueError):
    """Raised for invalid scenario or planner configuration."""


def normalize_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite Vec2 component: ({self.x}, {self.y})")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def dist(self, other: Vec2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def unit(self) -> Vec2:
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec2(self.x / n, self.y / n)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    @classmethod
    def polar(cls, r: float, theta: float) -> Vec2:
        return cls(r * math.cos(theta), r * math.sin(theta))


@dataclass(frozen=True, slots=True)
class UavState:
    id: int
    position: Vec2
    speed: float = 0.0
    heading: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.speed) or self.speed < 0:
            raise ValueError(f"UAV {self.id}: speed must be finite and >= 0, got {self.speed}")
        if not math.isfinite(self.heading):
            raise ValueError(f"UAV {self.id}: non-finite heading")
        object.__setattr__(self, "heading", normalize_angle(self.heading))

    @property
    def velocity(self) -> Vec2:
        return Vec2.polar(self.speed, self.heading)


@dataclass(frozen=True, slots=True)
class Obstacle:
    position: Vec2
    velocity: Vec2 = Vec2(0.0, 0.0)
    forbidden_radius: float = 26.0
    influence_radius: float = 30.0

    def __post_init__(self):
        if not self.forbidden_radius > 0:
            raise ValueError(f"forbidden_radius must be > 0, got {self.forbidden_radius}")
        if not self.influence_radius > self.forbidden_radius:
            raise ValueError(
                f"influence_radius ({self.influence_radius}) must exceed "
                f"forbidden_radius ({self.forbidden_radius})"
            )

    @property
    def speed(self) -> float:
        return self.velocity.norm()

    def moved(self, dt: float) -> Obstacle:
        return Obstacle(
            self.position + self.velocity * dt,
            self.velocity,
            self.forbidden_radius,
            self.influence_radius,
        )


@dataclass(frozen=True)
class FfpsoConfig:
    """Force-field PSO baseline knobs. Gains are calibration constants."""

    base: PsoConfig = field(default_factory=lambda: PsoConfig(n_particles=12, n_iters=8))
    repulsion_gain: float = 6000.0
    repulsion_range: float = 40.0
    # scales the repulsion contributed by other UAVs relative to obstacles
    neighbor_scale: float = 0.05


@dataclass(frozen=True)
class PpsoConfig:
    """Potential-field PSO baseline knobs."""

    base: PsoConfig = field(default_factory=lambda: PsoConfig(n_particles=12, n_iters=8))
    smoothing_weight: float = 1.0
    smoothing_radius: float = 50.0
    attract_gain: float = 1.0
    repulse_gain: float = 1200.0


@dataclass(frozen=True)
class ScenarioConfig:
    uavs: tuple[UavState, ...]
    obstacles: tuple[Obstacle, ...] = ()
    destination: Vec2 = Vec2(400.0, 0.0)
    formation_radius: float = 20.0
    swarm_size: int = 5
    detection_range: float = 50.0
    avoid_distance: float = 50.0
    safeguard_v2v: float = 0.5
    lambda1: float = 0.5
    lambda2: float = 0.5
    energy: EnergyParams = field(default_factory=EnergyParams)
    pso: PsoConfig = field(default_factory=PsoConfig)
    dt: float = 0.5
    grad_step: float = 0.5
    rng_seed: int = 0
    max_steps: int = 300
    v_max: float = 17.0
    kappa_max: float = 0.5
    heading_rate_max: float = math.pi  # 90 degrees per 0.5 s step
    n_samples: int = 10
    max_rounds: int = 10
    advance_offset: float | None = None
    swarm_range_factor: float = 1.5
    ffpso: FfpsoConfig = field(default_factory=FfpsoConfig)
    ppso: PpsoConfig = field(default_factory=PpsoConfig)

    def __post_init__(self):
        object.__setattr__(self, "uavs", tuple(self.uavs))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    @property
    def delta_omega_max(self) -> float:
        return self.heading_rate_max * self.dt


@dataclass(frozen=True)
class SwarmSnapshot:
    states: tuple[UavState, ...]
    time: float

    def __post_init__(self):
        ids = [s.id for s in self.states]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate UAV ids in snapshot: {ids}")


def build_circle_formation(
    n: int, center: Vec2, radius: float, heading: float = 0.0, speed: float = 0.0
) -> list[UavState]:
    """Place ``n`` UAVs evenly on a circle, UAV k at angle 2*pi*k/n."""
    if n < 1:
        raise ConfigError(f"formation needs at least one UAV, got n={n}")
    if radius < 0:
        raise ConfigError(f"formation radius must be >= 0, got {radius}")
    return [
        UavState(k, center + Vec2.polar(radius, 2.0 * math.pi * k / n), speed, heading)
        for k in range(n)
    ]


def _finite_numbers(obj, path="cfg") -> Iterator[str]:
    if isinstance(obj, bool) or obj is None:
        return
    if isinstance(obj, (int, float)):
        if not math.isfinite(obj):
            yield f"{path} is not finite ({obj})"
        return
    if isinstance(obj, (list, tuple)):
        for i, item in enumerate(obj):
            yield from _finite_numbers(item, f"{path}[{i}]")
        return
    if is_dataclass(obj):
        for f in fields(obj):
            yield from _finite_numbers(getattr(obj, f.name), f"{path}.{f.name}")


def validate_scenario(cfg: ScenarioConfig) -> list[str]:
    """Return every invariant violation of ``cfg``; an empty list means valid."""
    problems = list(_finite_numbers(cfg))
    if abs(cfg.lambda1 + cfg.lambda2 - 1.0) > 1e-9:
        problems.append(f"lambda1 + lambda2 = {cfg.lambda1 + cfg.lambda2}, expected 1")
    for name in ("lambda1", "lambda2"):
        v = getattr(cfg, name)
        if not 0.0 <= v <= 1.0:
            problems.append(f"{name} = {v} outside [0, 1]")
    if not cfg.dt > 0:
        problems.append(f"dt must be > 0, got {cfg.dt}")
    if not cfg.avoid_distance <= cfg.detection_range:
        problems.append(
            f"avoid_distance {cfg.avoid_distance} exceeds detection_range {cfg.detection_range}"
        )
    if cfg.swarm_size != len(cfg.uavs):
        problems.append(f"swarm_size {cfg.swarm_size} != number of UAVs {len(cfg.uavs)}")
    if not cfg.uavs:
        problems.append("scenario has no UAVs")
    ids = [u.id for u in cfg.uavs]
    if len(set(ids)) != len(ids):
        problems.append(f"UAV ids not unique: {ids}")
    for u in cfg.uavs:
        if u.speed > cfg.v_max:
            problems.append(f"UAV {u.id} speed {u.speed} exceeds v_max {cfg.v_max}")
    for name in ("formation_radius", "safeguard_v2v", "grad_step", "kappa_max",
                 "heading_rate_max", "swarm_range_factor"):
        v = getattr(cfg, name)
        if not v > 0:
            problems.append(f"{name} must be > 0, got {v}")
    if cfg.swarm_range_factor < 1.0:
        problems.append("swarm_range_factor must be >= 1 so every member is inside the swarm field")
    if cfg.n_samples < 1:
        problems.append(f"n_samples must be >= 1, got {cfg.n_samples}")
    if cfg.max_rounds < 1:
        problems.append(f"max_rounds must be >= 1, got {cfg.max_rounds}")
    if cfg.max_steps < 1:
        problems.append(f"max_steps must be >= 1, got {cfg.max_steps}")
    if cfg.advance_offset is not None and cfg.advance_offset < 0:
        problems.append(f"advance_offset must be >= 0, got {cfg.advance_offset}")
    e = cfg.energy
    for name in ("mass", "gravity", "air_density", "ref_area", "induced_velocity"):
        if not getattr(e, name) > 0:
            problems.append(f"energy.{name} must be > 0")
    if not 0.0 < e.roll < math.pi / 2:
        problems.append(f"energy.roll must lie in (0, pi/2), got {e.roll}")
    if not 0.0 <= e.pitch < math.pi / 2:
        problems.append(f"energy.pitch must lie in [0, pi/2), got {e.pitch}")
    for label, p in (("pso", cfg.pso), ("ffpso.base", cfg.ffpso.base), ("ppso.base", cfg.ppso.base)):
        problems.extend(f"{label}: {msg}" for msg in p.problems())
    if cfg.ffpso.repulsion_gain < 0:
        problems.append("ffpso.repulsion_gain must be >= 0")
    if cfg.ppso.smoothing_weight < 0:
        problems.append("ppso.smoothing_weight must be >= 0")
    return problems
