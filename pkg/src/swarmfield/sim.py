"""Lockstep swarm simulation: obstacle motion, avoidance trigger, planning, motion, metrics."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .baselines import ffpso_plan_step, ppso_plan_step, smoothed_field_for
from .core import (
    ConfigError,
    Obstacle,
    ScenarioConfig,
    SwarmSnapshot,
    UavState,
    Vec2,
    build_circle_formation,
    normalize_angle,
    validate_scenario,
)
from .energy import StepEnergy, step_energy
from .field import EnvironmentField, build_field, field_at, swarm_speed
from .geometry import Arc, Pose, arc_end_pose, entry_turn, sample_arc
from .planner import PlannedStep, PlanRequest, adjust_swarm, plan_step

PLANNERS = ("e2coop", "ffpso", "ppso")
KINDS = ("obstacle_in_front", "obstacle_on_side_left", "obstacle_on_side_right", "custom")
Planner = Literal["e2coop", "ffpso", "ppso"]


class SimulationError(RuntimeError):
    """A planner failed during a run; the message carries the step index."""


@dataclass(frozen=True)
class ScenarioKind:
    kind: str = "obstacle_in_front"
    obstacle_speed: float = 0.0
    initial_separation: float = 200.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}; expected one of {KINDS}")
        if not self.initial_separation > 0:
            raise ConfigError("initial_separation must be > 0")
        if self.obstacle_speed < 0:
            raise ConfigError("obstacle_speed must be >= 0")


@dataclass(frozen=True)
class StepRecord:
    step: int
    uav_id: int
    omega: float
    kappa: float
    length: float
    phi: float = 0.0
    threshold_shift: float = 0.0
    fitness: float = 0.0
    f_e: float = 0.0
    f_s: float = 0.0
    entry_turn: float = 0.0
    e_turn: float = 0.0
    e_const: float = 0.0
    avoiding: bool = False

    @property
    def energy(self) -> float:
        return self.e_turn + self.e_const


@dataclass
class RunRecord:
    config: ScenarioConfig
    kind: ScenarioKind
    planner: str
    snapshots: list[SwarmSnapshot] = field(default_factory=list)
    steps: list[list[StepRecord]] = field(default_factory=list)
    obstacles: list[tuple[Obstacle, ...]] = field(default_factory=list)
    leaders: list[Vec2 | None] = field(default_factory=list)


@dataclass
class Metrics:
    total_energy: float
    energy_per_uav: dict[int, float]
    turn_energy: float
    min_obstacle_clearance: float
    min_uav_pair_distance: float
    path_length: dict[int, float]
    reached_destination: bool
    unresolved_adjustments: int
    steps: int
    avoidance_steps: int
    wall_time: float


def centroid(states) -> Vec2:
    n = len(states)
    return Vec2(sum(s.position.x for s in states) / n, sum(s.position.y for s in states) / n)


def apply_kind(cfg: ScenarioConfig, kind: ScenarioKind, forbidden_radius: float | None = None) -> ScenarioConfig:
    """Place the obstacle and destination for a preset scenario kind.

    The destination lies 400 m (or twice the separation, if larger) ahead of
    the initial centroid along the mean heading. ``obstacle_in_front`` puts the
    obstacle ``initial_separation`` ahead, moving head-on. The side kinds put
    it ``initial_separation`` away on a collision course: it moves
    perpendicular to the swarm and would reach the swarm's path when the
    centroid does. ``custom`` leaves ``cfg`` unchanged.
    """
    if kind.kind == "custom":
        return cfg
    c0 = centroid(cfg.uavs)
    heading = math.atan2(sum(math.sin(u.heading) for u in cfg.uavs),
                         sum(math.cos(u.heading) for u in cfg.uavs))
    ahead = Vec2.polar(1.0, heading)
    left = Vec2(-ahead.y, ahead.x)
    d_obs = forbidden_radius if forbidden_radius is not None else (
        cfg.obstacles[0].forbidden_radius if cfg.obstacles else 26.0)
    r_o = max(cfg.avoid_distance, d_obs * 1.001)
    v_s = swarm_speed(cfg.uavs) or 1.0
    s, v_o = kind.initial_separation, kind.obstacle_speed
    if kind.kind == "obstacle_in_front":
        pos = c0 + ahead * s
        vel = ahead * (-v_o)
    else:
        side = 1.0 if kind.kind == "obstacle_on_side_left" else -1.0
        x0 = s / math.hypot(1.0, v_o / v_s)
        y0 = math.sqrt(max(s * s - x0 * x0, 0.0))
        pos = c0 + ahead * x0 + left * (side * y0)
        vel = left * (-side * v_o)
    obstacle = Obstacle(pos, vel, d_obs, r_o)
    destination = c0 + ahead * max(400.0, 2.0 * s)
    return replace(cfg, obstacles=(obstacle,), destination=destination)


def preset(
    name: str = "obstacle_in_front",
    *,
    n: int = 5,
    v_s: float = 10.0,
    v_obs: float = 0.0,
    d_obs: float = 26.0,
    separation: float = 200.0,
    **overrides,
) -> tuple[ScenarioConfig, ScenarioKind]:
    """Default scenario: N UAVs on a 20 m circle heading +x at ``v_s``."""
    if name == "obstacle_on_side":
        name = "obstacle_on_side_left"
    tau = overrides.pop("formation_radius", 20.0)
    uavs = build_circle_formation(n, Vec2(0.0, 0.0), tau, heading=0.0, speed=v_s)
    # leader well ahead so the swarm field is flat around the members
    overrides.setdefault("advance_offset", 4.0 * tau)
    cfg = ScenarioConfig(uavs=tuple(uavs), swarm_size=n, formation_radius=tau, **overrides)
    kind = ScenarioKind(name, v_obs, separation)
    return apply_kind(cfg, kind, d_obs), kind


def straight_line_clearance(u: UavState, slot: Vec2, speed: float, obs: Obstacle) -> float:
    """Closest approach to ``obs`` if ``u`` flew straight to ``slot`` at ``speed`` from now on.

    Both move at constant velocity; the UAV stops at its slot.
    """
    to_slot = slot - u.position
    reach = to_slot.norm()
    vu = to_slot.unit() * speed if reach > 0 and speed > 0 else Vec2(0.0, 0.0)
    t_stop = reach / speed if speed > 0 else 0.0

    def cpa(rel: Vec2, vrel: Vec2, t_max: float) -> tuple[float, Vec2]:
        vv = vrel.x * vrel.x + vrel.y * vrel.y
        t = 0.0 if vv == 0 else min(max(-(rel.x * vrel.x + rel.y * vrel.y) / vv, 0.0), t_max)
        return (rel + vrel * t).norm(), rel + vrel * t_max if math.isfinite(t_max) else rel

    rel = u.position - obs.position
    d1, rel_end = cpa(rel, vu - obs.velocity, t_stop)
    d2, _ = cpa(rel_end, obs.velocity * -1.0, math.inf)
    return min(d1, d2)


def _seed(cfg: ScenarioConfig, *parts: int) -> int:
    seq = np.random.SeedSequence([cfg.rng_seed, *parts])
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _straight_arc(u: UavState, target: Vec2, length: float) -> Arc:
    omega = (target - u.position).angle() if target.dist(u.position) > 0 else u.heading
    return Arc(Pose(u.position, u.heading), omega, 0.0, length)


class _Run:
    def __init__(self, cfg: ScenarioConfig, kind: ScenarioKind, planner: str):
        self.cfg = cfg
        self.kind = kind
        self.planner = planner
        self.pso_id = PLANNERS.index(planner)
        c0 = centroid(cfg.uavs)
        # straight flight keeps each UAV's initial offset from the centroid
        self.slots = {u.id: cfg.destination + (u.position - c0) for u in cfg.uavs}
        self.cruise = {u.id: u.speed for u in cfg.uavs}
        self.unresolved = 0
        self.avoid_steps = 0

    def request(self, u: UavState, fld: EnvironmentField, shift: float) -> PlanRequest:
        c = self.cfg
        return PlanRequest(
            uav=u, field=fld, threshold_shift=shift, step_length=u.speed * c.dt,
            lambda1=c.lambda1, lambda2=c.lambda2, delta_omega_max=c.delta_omega_max,
            kappa_max=c.kappa_max, n_samples=c.n_samples, grad_step=c.grad_step,
            energy=replace(c.energy, speed=u.speed),
        )

    def plan_all(self, states, fld, shifts, step, rnd) -> dict[int, PlannedStep]:
        out = {}
        for u in states:
            pso = replace(self.cfg.pso, rng_seed=_seed(self.cfg, step, u.id, rnd, self.pso_id))
            out[u.id] = plan_step(self.request(u, fld, shifts.get(u.id, 0.0)), pso)
        return out

    def e2coop_tick(self, states, obstacles, detected, avoiding, step):
        cfg = self.cfg
        records = {}
        if not avoiding:
            arcs = {u.id: _straight_arc(u, self.slots[u.id], u.speed * cfg.dt) for u in states}
            return arcs, {u.id: {} for u in states}, None
        fld = build_field(states, [o.moved(cfg.dt) for o in detected], cfg.destination, cfg.advance_offset,
                          cfg.swarm_range_factor)
        shifts = {u.id: 0.0 for u in states}
        plans = None
        positions = [u.position for u in states]
        close = any(positions[a].dist(positions[b]) < cfg.safeguard_v2v
                    for a in range(len(states)) for b in range(a + 1, len(states)))
        if close:
            rounds = iter(range(1, cfg.max_rounds + 1))
            outcome = adjust_swarm(
                states, fld, detected, cfg.safeguard_v2v, cfg.max_rounds,
                replan=lambda sh: self.plan_all(states, fld, sh, step, next(rounds)),
                n_samples=cfg.n_samples,
            )
            shifts, plans = outcome.shifts, outcome.plans
            if not outcome.resolved:
                self.unresolved += 1
        if plans is None:
            plans = self.plan_all(states, fld, shifts, step, 0)
        for u in states:
            p = plans[u.id]
            records[u.id] = dict(phi=field_at(fld, u.position), threshold_shift=shifts[u.id],
                                 fitness=p.fitness, f_e=p.f_e, f_s=p.f_s)
        return {k: p.arc for k, p in plans.items()}, records, fld.swarm.virtual_leader

    def baseline_tick(self, states, obstacles, detected, step):
        cfg = self.cfg
        arcs, records = {}, {}
        v_s = swarm_speed(states)
        for u in states:
            L = self.cruise[u.id] * cfg.dt
            seed = _seed(cfg, step, u.id, 0, self.pso_id)
            if self.planner == "ffpso":
                w = ffpso_plan_step(u, detected, states, self.slots[u.id], cfg.ffpso, L, seed)
            else:
                sf = smoothed_field_for(u, detected, self.slots[u.id], cfg.ppso, v_s)
                w = ppso_plan_step(u, sf, cfg.ppso, L, seed)
            d = w.dist(u.position)
            arcs[u.id] = None if d <= 1e-12 else Arc(Pose(u.position, u.heading),
                                                      (w - u.position).angle(), 0.0, d)
            records[u.id] = {}
        return arcs, records, None


def run_scenario(cfg: ScenarioConfig, kind: ScenarioKind | None = None,
                 planner: str = "e2coop") -> tuple[RunRecord, Metrics]:
    """Simulate one scenario with one planner.

    Per tick: obstacles move; if any UAV is within ``avoid_distance`` of an
    obstacle the E2Coop planner rebuilds the environment field, runs the
    threshold-shift adjustment when two UAVs are closer than
    ``safeguard_v2v``, then plans one arc per UAV; otherwise every UAV flies
    straight toward its formation slot at the destination. The baselines
    plan a waypoint every tick. The run stops when the centroid is within
    ``formation_radius`` of the destination or after ``max_steps`` ticks.
    """
    if planner not in PLANNERS:
        raise ConfigError(f"unknown planner {planner!r}; expected one of {PLANNERS}")
    kind = kind or ScenarioKind("custom")
    problems = validate_scenario(cfg)
    if problems:
        raise ConfigError("invalid scenario: " + "; ".join(problems))
    t0 = time.perf_counter()
    run = _Run(cfg, kind, planner)
    states = list(cfg.uavs)
    obstacles = tuple(cfg.obstacles)
    rec = RunRecord(cfg, kind, planner)
    rec.snapshots.append(SwarmSnapshot(tuple(states), 0.0))
    rec.obstacles.append(obstacles)
    rec.leaders.append(None)
    step_energies: dict[int, list[float]] = {u.id: [] for u in states}
    path = {u.id: 0.0 for u in states}
    turn_energy = 0.0
    min_clear = math.inf
    min_pair = _min_pair({u.id: np.array([[u.position.x, u.position.y]]) for u in states})
    if obstacles:
        min_clear = min(u.position.dist(o.position) for u in states for o in obstacles)
    reached = centroid(states).dist(cfg.destination) <= cfg.formation_radius

    step = 0
    while not reached and step < cfg.max_steps:
        step += 1
        obstacles = tuple(o.moved(cfg.dt) for o in obstacles)
        detected = [o for o in obstacles
                    if any(u.position.dist(o.position) < cfg.detection_range for u in states)]
        # avoid while some UAV inside D_a would cut the forbidden area by flying straight
        avoiding = any(u.position.dist(o.position) < cfg.avoid_distance
                       and straight_line_clearance(u, run.slots[u.id], run.cruise[u.id], o)
                       < o.forbidden_radius
                       for u in states for o in obstacles)
        try:
            if planner == "e2coop":
                arcs, extra, leader = run.e2coop_tick(states, obstacles, detected, avoiding, step)
            else:
                arcs, extra, leader = run.baseline_tick(states, obstacles, detected, step)
        except Exception as exc:  # noqa: BLE001 - re-raised with step context
            raise SimulationError(f"{planner} failed at step {step}: {exc}") from exc
        if avoiding and planner == "e2coop":
            run.avoid_steps += 1

        new_states, step_recs, samples = [], [], {}
        for u in states:
            arc = arcs[u.id]
            if arc is None:
                new_states.append(replace(u, speed=0.0))
                step_recs.append(StepRecord(step, u.id, u.heading, 0.0, 0.0, avoiding=avoiding,
                                            **extra[u.id]))
                samples[u.id] = np.repeat([[u.position.x, u.position.y]], cfg.n_samples + 1, 0)
                continue
            end = arc_end_pose(arc)
            speed = arc.length / cfg.dt
            turn = entry_turn(u.heading, arc)
            e = step_energy(replace(cfg.energy, speed=speed), arc, turn)
            turn_energy += e.e_turn
            path[u.id] += arc.length
            new_states.append(UavState(u.id, end.position, speed, end.heading))
            r = StepRecord(step, u.id, arc.omega, arc.kappa, arc.length, entry_turn=turn,
                           e_turn=e.e_turn, e_const=e.e_const, avoiding=avoiding, **extra[u.id])
            step_energies[u.id].append(r.energy)
            step_recs.append(r)
            samples[u.id] = sample_arc(arc, cfg.n_samples).points
        for o in obstacles:
            c = np.array([o.position.x, o.position.y])
            for pts in samples.values():
                min_clear = min(min_clear, float(np.min(np.linalg.norm(pts - c, axis=1))))
        min_pair = min(min_pair, _min_pair(samples))
        states = new_states
        rec.snapshots.append(SwarmSnapshot(tuple(states), step * cfg.dt))
        rec.steps.append(step_recs)
        rec.obstacles.append(obstacles)
        rec.leaders.append(leader)
        reached = centroid(states).dist(cfg.destination) <= cfg.formation_radius

    # fsum over the per-step values so the total matches the exported rows exactly
    metrics = Metrics(
        total_energy=math.fsum(e for es in step_energies.values() for e in es),
        energy_per_uav={k: math.fsum(es) for k, es in step_energies.items()},
        turn_energy=turn_energy,
        min_obstacle_clearance=min_clear,
        min_uav_pair_distance=min_pair,
        path_length=path,
        reached_destination=reached,
        unresolved_adjustments=run.unresolved,
        steps=step,
        avoidance_steps=run.avoid_steps,
        wall_time=time.perf_counter() - t0,
    )
    return rec, metrics


def planning_requests(record: RunRecord) -> list[tuple[int, PlanRequest]]:
    """Rebuild the ``(step, PlanRequest)`` pairs an E2Coop run solved while avoiding.

    Each request uses the pre-step states, the field from the predicted
    obstacle positions and the recorded threshold shift, so replaying it
    with the recorded seed reproduces the recorded arc.
    """
    cfg = record.config
    run = _Run(cfg, record.kind, record.planner)
    out = []
    for k, recs in enumerate(record.steps, start=1):
        if not recs or not recs[0].avoiding:
            continue
        states = record.snapshots[k - 1].states
        detected = [o for o in record.obstacles[k]
                    if any(u.position.dist(o.position) < cfg.detection_range for u in states)]
        fld = build_field(states, [o.moved(cfg.dt) for o in detected], cfg.destination,
                          cfg.advance_offset, cfg.swarm_range_factor)
        shift = {r.uav_id: r.threshold_shift for r in recs}
        out.extend((k, run.request(u, fld, shift[u.id])) for u in states)
    return out


def _min_pair(samples: dict[int, np.ndarray]) -> float:
    ids = sorted(samples)
    best = math.inf
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            d = np.linalg.norm(samples[ids[a]] - samples[ids[b]], axis=1)
            best = min(best, float(d.min()))
    return best


SWEEP_AXES = ("v_obs", "D_obs", "D_v2v", "lambda1", "N", "D_a", "seed")
SWEEP_COLUMNS = ("axis", "value", "planner", "repeat", "seed", "total_energy", "turn_energy",
                 "min_obstacle_clearance", "min_uav_pair_distance", "reached_destination",
                 "unresolved_adjustments", "steps", "avoidance_steps", "wall_time")


def _reformation(cfg: ScenarioConfig, n: int) -> ScenarioConfig:
    """Same circle, speed and heading as ``cfg`` but with ``n`` members."""
    c0 = centroid(cfg.uavs)
    u0 = cfg.uavs[0]
    uavs = build_circle_formation(n, c0, cfg.formation_radius, u0.heading, u0.speed)
    return replace(cfg, uavs=tuple(uavs), swarm_size=n)


def with_axis(cfg: ScenarioConfig, kind: ScenarioKind, axis: str, value):
    """Return ``(cfg, kind)`` with one sweep parameter set to ``value``."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    d_obs = cfg.obstacles[0].forbidden_radius if cfg.obstacles else None
    if axis == "seed":
        return replace(cfg, rng_seed=int(value)), kind
    if axis == "D_v2v":
        return replace(cfg, safeguard_v2v=float(value)), kind
    if axis == "lambda1":
        return replace(cfg, lambda1=float(value), lambda2=1.0 - float(value)), kind
    if axis == "D_a":
        cfg = replace(cfg, avoid_distance=float(value))
    elif axis == "v_obs":
        kind = replace(kind, obstacle_speed=float(value))
        if kind.kind == "custom":
            cfg = replace(cfg, obstacles=tuple(
                replace(o, velocity=o.velocity.unit() * float(value)) if o.speed > 0
                else o for o in cfg.obstacles))
    elif axis == "D_obs":
        d_obs = float(value)
        if kind.kind == "custom":
            cfg = replace(cfg, obstacles=tuple(
                replace(o, forbidden_radius=d_obs,
                        influence_radius=max(o.influence_radius, 1.001 * d_obs))
                for o in cfg.obstacles))
    elif axis == "N":
        cfg = _reformation(cfg, int(value))
    if kind.kind != "custom":
        # re-place obstacle and destination relative to the (possibly new) formation
        cfg = apply_kind(cfg, kind, d_obs)
    return cfg, kind


def sweep(cfg: ScenarioConfig, kind: ScenarioKind, axis: str, values, planners=PLANNERS,
          repeats: int = 1, progress=None) -> list[dict]:
    """Run every (value, planner, repeat) cell; returns long-format result rows.

    Repeat ``r`` uses ``rng_seed + r``. Failed runs are kept as rows with
    ``reached_destination`` false.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    for p in planners:
        if p not in PLANNERS:
            raise ConfigError(f"unknown planner {p!r}")
    rows = []
    for value in values:
        vcfg, vkind = with_axis(cfg, kind, axis, value)
        for planner in planners:
            for r in range(repeats):
                seed = vcfg.rng_seed + r
                _, m = run_scenario(replace(vcfg, rng_seed=seed), vkind, planner)
                row = {"axis": axis, "value": value, "planner": planner, "repeat": r,
                       "seed": seed}
                row.update({k: getattr(m, k) for k in SWEEP_COLUMNS if hasattr(m, k)})
                rows.append(row)
                if progress is not None:
                    progress(row)
    return rows


def write_table(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in SWEEP_COLUMNS})
