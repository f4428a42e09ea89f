"""Per-step arc planning on the binarized environment field, and the
intensity-shift protocol that moves conflicting UAVs onto different contours."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import Obstacle, UavState, Vec2, normalize_angle
from .energy import EnergyParams
from .field import (
    BinaryFieldView,
    EnvironmentField,
    binarize,
    binary_gradient_values,
    field_at,
    field_values,
)
from .geometry import Arc, ArcSamples, Pose, arc_offsets, sample_arc
from .pso import PsoConfig, pso_minimize

EPS_D = 0.01  # equal-distance tolerance for the shift sign rules, meters
EPS_PHI = 1e-9  # intensity below which a UAV has no contour to move onto


class DegenerateIntensityError(ValueError):
    """A UAV sits where the environment field is (numerically) zero."""


@dataclass(frozen=True)
class PlanRequest:
    uav: UavState
    field: EnvironmentField
    threshold_shift: float = 0.0
    step_length: float = 5.0
    lambda1: float = 0.5
    lambda2: float = 0.5
    delta_omega_max: float = math.radians(30.0)
    kappa_max: float = 0.5
    n_samples: int = 10
    grad_step: float = 0.5
    energy: EnergyParams = field(default_factory=EnergyParams)

    def __post_init__(self):
        if abs(self.lambda1 + self.lambda2 - 1.0) > 1e-9:
            raise ValueError("lambda1 + lambda2 must equal 1")
        if not (self.step_length > 0 and self.kappa_max > 0 and self.delta_omega_max > 0):
            raise ValueError("step_length, kappa_max and delta_omega_max must be > 0")

    @property
    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]]:
        h = self.uav.heading
        return ((h - self.delta_omega_max, h + self.delta_omega_max),
                (-self.kappa_max, self.kappa_max))

    @property
    def threshold(self) -> float:
        return field_at(self.field, self.uav.position) + self.threshold_shift

    def view(self) -> BinaryFieldView:
        return binarize(self.field, self.threshold)

    def arc(self, omega: float, kappa: float) -> Arc:
        return Arc(Pose(self.uav.position, self.uav.heading), omega, kappa, self.step_length)


@dataclass(frozen=True)
class PlannedStep:
    arc: Arc
    fitness: float
    f_e: float
    f_s: float


@dataclass(frozen=True)
class AdjustmentOutcome:
    shifts: dict[int, float]
    rounds_used: int
    resolved: bool
    plans: dict[int, PlannedStep] | None = None


def safety_term(view: BinaryFieldView, samples: ArcSamples, h: float) -> float:
    """Minus the mean normalized binary-field gradient over the arc samples."""
    pts = np.asarray(samples.points, dtype=float)
    if len(pts) == 0:
        raise ValueError("safety_term needs at least one sample")
    return -float(np.mean(binary_gradient_values(view, pts, h)))


def fitness_batch(req: PlanRequest, candidates: np.ndarray, view: BinaryFieldView | None = None):
    """Vectorized fitness over an ``(n, 2)`` array of ``(omega, kappa)`` rows.

    Returns ``(fitness, f_e, f_s)`` arrays of length ``n``.
    """
    if view is None:
        view = req.view()
    cand = np.atleast_2d(np.asarray(candidates, dtype=float))
    omega, kappa = cand[:, 0], cand[:, 1]
    L = req.step_length
    s = np.linspace(0.0, L, req.n_samples + 1)
    start = np.array([req.uav.position.x, req.uav.position.y])
    pts = start + arc_offsets(omega[:, None], kappa[:, None], s[None, :])
    pts[:, 0] = start
    f_s = -binary_gradient_values(view, pts, req.grad_step).mean(axis=1)
    kink = np.abs(np.remainder(omega - req.uav.heading + np.pi, 2 * np.pi) - np.pi)
    f_e = (np.abs(kappa) * L + kink) / (req.kappa_max * L)
    return req.lambda1 * f_e + req.lambda2 * f_s, f_e, f_s


def step_fitness(req: PlanRequest, candidate) -> tuple[float, float, float]:
    fit, f_e, f_s = fitness_batch(req, np.asarray(candidate, dtype=float)[None, :])
    return float(fit[0]), float(f_e[0]), float(f_s[0])


def _grad(fld: EnvironmentField, p: np.ndarray, d: float) -> np.ndarray:
    st = p + np.array([[d, 0.0], [-d, 0.0], [0.0, d], [0.0, -d]])
    v = field_values(fld, st)
    return np.array([v[0] - v[1], v[2] - v[3]]) / (2 * d)


def contour_seeds(req: PlanRequest) -> np.ndarray:
    """``(omega, kappa)`` of arcs following the level set through the UAV, both ways.

    The tangent comes from the field gradient at the UAV; the curvature from
    the circle through the UAV and two points pulled back onto the level set
    half a step and a full step ahead. Empty where the field is flat.
    """
    p0 = np.array([req.uav.position.x, req.uav.position.y])
    d = 0.1 * req.grad_step
    level = field_values(req.field, p0)
    g = _grad(req.field, p0, d)
    gn = float(np.hypot(*g))
    if not gn > 1e-12:
        return np.empty((0, 2))
    seeds = []
    for sign in (1.0, -1.0):
        t = sign * np.array([-g[1], g[0]]) / gn
        pts = []
        for s in (0.5 * req.step_length, req.step_length):
            q = p0 + s * t
            for _ in range(3):
                gq = _grad(req.field, q, d)
                nq = float(gq @ gq)
                if not nq > 1e-24:
                    break
                q = q - (field_values(req.field, q) - level) / nq * gq
            pts.append(q)
        a, b = pts[0] - p0, pts[1] - p0
        cross = a[0] * b[1] - a[1] * b[0]
        denom = np.hypot(*a) * np.hypot(*b) * np.hypot(*(b - a))
        kappa = 2.0 * cross / denom if denom > 0 else 0.0
        seeds.append((math.atan2(t[1], t[0]), kappa))
    out = np.array(seeds)
    # express omega relative to the search window around the heading
    h = req.uav.heading
    out[:, 0] = h + np.remainder(out[:, 0] - h + np.pi, 2 * np.pi) - np.pi
    return out


def plan_step(req: PlanRequest, pso_cfg: PsoConfig) -> PlannedStep:
    """Search the ``(omega, kappa)`` box with PSO and return the incumbent arc.

    Two particles start on the contour-following arcs; the rest are uniform.
    """
    view = req.view()
    cfg = replace(pso_cfg, bounds=req.bounds)
    result = pso_minimize(cfg, lambda c: fitness_batch(req, c, view)[0], vectorized=True,
                          seed_positions=contour_seeds(req))
    omega, kappa = (float(v) for v in result.best_position)
    fit, f_e, f_s = fitness_batch(req, result.best_position[None, :], view)
    return PlannedStep(req.arc(omega, kappa), float(fit[0]), float(f_e[0]), float(f_s[0]))


def nearest_obstacle(obstacles: Sequence[Obstacle], point: Vec2) -> Obstacle:
    """Obstacle whose centre is closest to ``point``; ties keep list order."""
    if not obstacles:
        raise ValueError("no obstacles")
    return min(obstacles, key=lambda o: o.position.dist(point))


def pairwise_shift(
    i: UavState,
    j: UavState,
    field: EnvironmentField,
    obstacle_ref: Obstacle | Vec2,
    d_v2v: float,
    *,
    pos_i: Vec2 | None = None,
    pos_j: Vec2 | None = None,
    phi_i: float | None = None,
) -> float:
    """Intensity change UAV ``j`` asks of UAV ``i``.

    Magnitude ``|(d_v2v - |p_i p_j|) / Phi(p_i)|``. Negative (move away from
    the obstacle) when ``i`` is farther from the obstacle than ``j``; on equal
    distance the faster UAV, then the larger id, moves away.

    ``pos_i``/``pos_j`` override the positions used for the distance terms
    (predicted positions during later adjustment rounds) and ``phi_i`` the
    intensity in the denominator.
    """
    pi = i.position if pos_i is None else pos_i
    pj = j.position if pos_j is None else pos_j
    if phi_i is None:
        phi_i = field_at(field, i.position)
    if phi_i < EPS_PHI:
        raise DegenerateIntensityError(f"UAV {i.id} has field intensity {phi_i}")
    magnitude = abs((d_v2v - pi.dist(pj)) / phi_i)
    ref = obstacle_ref.position if isinstance(obstacle_ref, Obstacle) else obstacle_ref
    di, dj = pi.dist(ref), pj.dist(ref)
    if abs(di - dj) > EPS_D:
        away = di > dj
    elif abs(i.speed - j.speed) > 1e-12:
        away = i.speed > j.speed
    else:
        away = i.id > j.id
    return -magnitude if away else magnitude


def _conflicts(points: Mapping[int, np.ndarray], d_v2v: float) -> list[tuple[int, int, float]]:
    """Pairs whose (synchronously sampled) separation drops below ``d_v2v``."""
    ids = sorted(points)
    out = []
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            pa, pb = points[ids[a]], points[ids[b]]
            k = min(len(pa), len(pb))
            d = float(np.min(np.linalg.norm(pa[:k] - pb[:k], axis=-1)))
            if d < d_v2v:
                out.append((ids[a], ids[b], d))
    return out


def _endpoint(points: np.ndarray) -> Vec2:
    return Vec2(*points[-1])


def adjust_swarm(
    states: Sequence[UavState],
    field: EnvironmentField,
    obstacles: Sequence[Obstacle],
    d_v2v: float,
    max_rounds: int = 10,
    replan: Callable[[Mapping[int, float]], Mapping[int, PlannedStep]] | None = None,
    n_samples: int = 10,
) -> AdjustmentOutcome:
    """Shift planning thresholds until no two UAVs come within ``d_v2v``.

    Round 1 measures current positions; each later round measures the arcs
    planned with the accumulated shifts (synchronous samples along the arcs)
    and adds a further round of pairwise shifts. Intensities in the shift
    denominators are taken at the current positions. Without ``replan`` a
    single round of shifts is computed and reported as unresolved.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    by_id = {s.id: s for s in states}
    shifts = {s.id: 0.0 for s in states}
    points = {s.id: np.array([[s.position.x, s.position.y]]) for s in states}
    if not _conflicts(points, d_v2v):
        return AdjustmentOutcome(shifts, 0, True)
    phi = {s.id: field_at(field, s.position) for s in states}
    plans = None
    for rnd in range(1, max_rounds + 1):
        conflicts = _conflicts(points, d_v2v)
        if not conflicts:
            return AdjustmentOutcome(shifts, rnd - 1, True, plans)
        for a, b, _ in conflicts:
            pa, pb = _endpoint(points[a]), _endpoint(points[b])
            mid = Vec2((pa.x + pb.x) / 2, (pa.y + pb.y) / 2)
            ref = nearest_obstacle(obstacles, mid) if obstacles else mid
            for i, j, pi, pj in ((a, b, pa, pb), (b, a, pb, pa)):
                if phi[i] < EPS_PHI:
                    continue
                shifts[i] += pairwise_shift(by_id[i], by_id[j], field, ref, d_v2v,
                                            pos_i=pi, pos_j=pj, phi_i=phi[i])
        if replan is None:
            return AdjustmentOutcome(shifts, rnd, False)
        plans = dict(replan(shifts))
        points = {k: sample_arc(p.arc, n_samples).points for k, p in plans.items()}
    resolved = not _conflicts(points, d_v2v)
    return AdjustmentOutcome(shifts, max_rounds, resolved, plans)
