"""Bounded two-dimensional particle swarm optimizer and an exhaustive grid oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Bounds = tuple[tuple[float, float], tuple[float, float]]


class FitnessEvaluationError(RuntimeError):
    """The fitness function returned a non-finite value."""


@dataclass(frozen=True)
class PsoConfig:
    n_particles: int = 30
    n_iters: int = 60
    inertia: float = 0.72
    bounds: Bounds = ((-1.0, 1.0), (-1.0, 1.0))
    v_clamp_frac: float = 0.2
    rng_seed: int = 0

    def problems(self) -> list[str]:
        out = []
        if self.n_particles < 2:
            out.append(f"n_particles must be >= 2, got {self.n_particles}")
        if self.n_iters < 1:
            out.append(f"n_iters must be >= 1, got {self.n_iters}")
        if len(self.bounds) != 2:
            out.append("bounds must have exactly two dimensions")
        else:
            for d, (lo, hi) in enumerate(self.bounds):
                if not lo < hi:
                    out.append(f"bounds[{d}]: lo={lo} must be < hi={hi}")
        if not 0.0 < self.v_clamp_frac <= 1.0:
            out.append(f"v_clamp_frac must lie in (0, 1], got {self.v_clamp_frac}")
        return out


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    personal_best: np.ndarray
    personal_best_fitness: float


@dataclass
class PsoResult:
    best_position: np.ndarray
    best_fitness: float
    iterations_run: int
    history: list[float]
    particles: list[Particle] = field(default_factory=list, repr=False)
    final_fitness: np.ndarray | None = field(default=None, repr=False)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator owned by one optimizer run."""
    return np.random.Generator(np.random.Philox(seed))


def _evaluate(fitness, positions: np.ndarray, vectorized: bool) -> np.ndarray:
    if vectorized:
        values = np.asarray(fitness(positions), dtype=float).reshape(len(positions))
    else:
        values = np.array([float(fitness(p)) for p in positions])
    bad = ~np.isfinite(values)
    if bad.any():
        k = int(np.argmax(bad))
        raise FitnessEvaluationError(
            f"fitness returned {values[k]} at point {positions[k].tolist()}"
        )
    return values


def pso_minimize(
    cfg: PsoConfig,
    fitness: Callable,
    *,
    vectorized: bool = False,
    init_positions: np.ndarray | None = None,
    init_velocities: np.ndarray | None = None,
    extra_velocity: Callable[[np.ndarray], np.ndarray] | None = None,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    seed_positions: np.ndarray | None = None,
) -> PsoResult:
    """Minimize ``fitness`` over the box ``cfg.bounds``.

    Update rule per particle and iteration::

        v <- mu0 * v + mu1 * (p_i - x) + mu2 * (p_g - x)
        x <- x + v

    with ``mu1, mu2 ~ U[0, 1]`` drawn once per particle per iteration.
    Velocities are clamped to ``v_clamp_frac`` of the box range; positions are
    clamped to the box and the offending velocity component is zeroed.

    With ``vectorized=True`` the fitness receives an ``(n, 2)`` array and must
    return ``n`` values. ``extra_velocity`` adds a term to the velocity update
    and ``project`` maps positions onto a feasible subset of the box; both
    exist for the waypoint baselines. ``seed_positions`` (k rows) overwrite the
    first k random initial positions; the random stream is unchanged.
    """
    problems = cfg.problems()
    if problems:
        raise ValueError("; ".join(problems))
    rng = make_rng(cfg.rng_seed)
    lo = np.array([b[0] for b in cfg.bounds], dtype=float)
    hi = np.array([b[1] for b in cfg.bounds], dtype=float)
    vmax = cfg.v_clamp_frac * (hi - lo)
    n = cfg.n_particles

    if init_positions is None:
        x = lo + rng.random((n, 2)) * (hi - lo)
    else:
        x = np.clip(np.array(init_positions, dtype=float).reshape(n, 2), lo, hi)
    if seed_positions is not None:
        seeds = np.atleast_2d(np.asarray(seed_positions, dtype=float))[:n]
        x[: len(seeds)] = np.clip(seeds, lo, hi)
    if project is not None:
        x = project(x)
    v = np.zeros((n, 2)) if init_velocities is None else np.array(init_velocities, dtype=float)

    f = _evaluate(fitness, x, vectorized)
    pbest, pbest_f = x.copy(), f.copy()
    g = int(np.argmin(pbest_f))
    gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
    history = []

    for _ in range(cfg.n_iters):
        mu = rng.random((n, 2))
        v = cfg.inertia * v + mu[:, :1] * (pbest - x) + mu[:, 1:] * (gbest - x)
        if extra_velocity is not None:
            v = v + extra_velocity(x)
        v = np.clip(v, -vmax, vmax)
        x = x + v
        out = (x < lo) | (x > hi)
        x = np.clip(x, lo, hi)
        v[out] = 0.0
        if project is not None:
            x = project(x)

        f = _evaluate(fitness, x, vectorized)
        improved = f < pbest_f
        pbest[improved] = x[improved]
        pbest_f[improved] = f[improved]
        g = int(np.argmin(pbest_f))
        if pbest_f[g] < gbest_f:
            gbest, gbest_f = pbest[g].copy(), float(pbest_f[g])
        history.append(gbest_f)

    particles = [Particle(x[k].copy(), v[k].copy(), pbest[k].copy(), float(pbest_f[k]))
                 for k in range(n)]
    return PsoResult(gbest, gbest_f, cfg.n_iters, history, particles, f)


def grid_search_oracle(
    bounds: Sequence[tuple[float, float]],
    resolution: int,
    fitness: Callable,
    *,
    vectorized: bool = False,
) -> tuple[np.ndarray, float]:
    """Exhaustive argmin on a regular ``resolution x resolution`` grid.

    Ties go to the lowest index in row-major order (first dimension slowest).
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    a = np.linspace(bounds[0][0], bounds[0][1], resolution)
    b = np.linspace(bounds[1][0], bounds[1][1], resolution)
    aa, bb = np.meshgrid(a, b, indexing="ij")
    pts = np.column_stack([aa.ravel(), bb.ravel()])
    values = _evaluate(fitness, pts, vectorized)
    k = int(np.argmin(values))
    return pts[k], float(values[k])
