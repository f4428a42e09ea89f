"""Scenario config JSON round-trip and run export (CSV + JSON)."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, fields, replace
from pathlib import Path

from . import __version__
from .core import (
    ConfigError,
    FfpsoConfig,
    Obstacle,
    PpsoConfig,
    ScenarioConfig,
    UavState,
    Vec2,
)
from .energy import EnergyParams
from .pso import PsoConfig

TRAJECTORY_COLUMNS = ("step", "time_s", "uav_id", "x_m", "y_m", "heading_rad", "omega",
                      "kappa", "phi", "f_e", "f_s", "step_energy_j")
OBSTACLE_COLUMNS = ("step", "time_s", "obstacle_id", "x_m", "y_m", "vx_mps", "vy_mps",
                    "forbidden_radius_m", "influence_radius_m")


def _num(x: float) -> str:
    """Shortest round-trip decimal; always finite, no locale separators."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot export non-finite value {x}")
    return repr(x)


# ---- config ---------------------------------------------------------------

def _vec(d) -> Vec2:
    if isinstance(d, dict):
        return Vec2(d["x"], d["y"])
    x, y = d
    return Vec2(x, y)


def _pso(d: dict) -> PsoConfig:
    d = dict(d)
    if "bounds" in d:
        d["bounds"] = tuple(tuple(float(v) for v in b) for b in d["bounds"])
    return PsoConfig(**d)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return asdict(cfg)


def config_from_dict(d: dict) -> ScenarioConfig:
    """Inverse of :func:`config_to_dict`; unknown keys are a config error."""
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    try:
        kw = dict(d)
        kw["uavs"] = tuple(
            UavState(int(u["id"]), _vec(u["position"]), float(u.get("speed", 0.0)),
                     float(u.get("heading", 0.0)))
            for u in d["uavs"]
        )
        kw["obstacles"] = tuple(
            Obstacle(_vec(o["position"]), _vec(o.get("velocity", (0.0, 0.0))),
                     float(o.get("forbidden_radius", 26.0)),
                     float(o.get("influence_radius", 30.0)))
            for o in d.get("obstacles", ())
        )
        if "destination" in d:
            kw["destination"] = _vec(d["destination"])
        if "energy" in d:
            kw["energy"] = EnergyParams(**d["energy"])
        if "pso" in d:
            kw["pso"] = _pso(d["pso"])
        if "ffpso" in d:
            f = dict(d["ffpso"])
            if "base" in f:
                f["base"] = _pso(f["base"])
            kw["ffpso"] = FfpsoConfig(**f)
        if "ppso" in d:
            p = dict(d["ppso"])
            if "base" in p:
                p["base"] = _pso(p["base"])
            kw["ppso"] = PpsoConfig(**p)
        if "swarm_size" not in d:
            kw["swarm_size"] = len(kw["uavs"])
        return ScenarioConfig(**kw)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed scenario: {exc}") from exc


def save_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n")


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return config_from_dict(data)


# ---- metrics --------------------------------------------------------------

def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    return x


def metrics_to_dict(m) -> dict:
    """Plain-JSON form; infinities (no obstacle, single UAV) become ``null``."""
    return _json_safe(asdict(m))


def metrics_from_dict(d: dict):
    from .sim import Metrics

    def fl(v):
        return math.inf if v is None else float(v)

    return Metrics(
        total_energy=fl(d["total_energy"]),
        energy_per_uav={int(k): fl(v) for k, v in d["energy_per_uav"].items()},
        turn_energy=fl(d["turn_energy"]),
        min_obstacle_clearance=fl(d["min_obstacle_clearance"]),
        min_uav_pair_distance=fl(d["min_uav_pair_distance"]),
        path_length={int(k): fl(v) for k, v in d["path_length"].items()},
        reached_destination=bool(d["reached_destination"]),
        unresolved_adjustments=int(d["unresolved_adjustments"]),
        steps=int(d["steps"]),
        avoidance_steps=int(d["avoidance_steps"]),
        wall_time=fl(d["wall_time"]),
    )


# ---- run export -----------------------------------------------------------

def trajectory_rows(record) -> list[list[str]]:
    """Rows of trajectories.csv: a step-0 row per UAV, then one per UAV per step.

    Row ``k`` carries the pose reached at the end of step ``k`` together with
    the arc parameters and energy of that step.
    """
    cfg = record.config
    rows = []
    for u in record.snapshots[0].states:
        rows.append(["0", _num(0.0), str(u.id), _num(u.position.x), _num(u.position.y),
                     _num(u.heading), _num(u.heading), _num(0.0), _num(0.0), _num(0.0),
                     _num(0.0), _num(0.0)])
    for k, recs in enumerate(record.steps, start=1):
        by_id = {s.id: s for s in record.snapshots[k].states}
        for r in recs:
            s = by_id[r.uav_id]
            rows.append([str(k), _num(k * cfg.dt), str(r.uav_id), _num(s.position.x),
                         _num(s.position.y), _num(s.heading), _num(r.omega), _num(r.kappa),
                         _num(r.phi), _num(r.f_e), _num(r.f_s), _num(r.energy)])
    return rows


def _write_csv(path: Path, header, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def export_run(record, metrics, out_dir) -> dict[str, Path]:
    """Write trajectories.csv, obstacles.csv, metrics.json and run_meta.json."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    paths = {name: out / name for name in
             ("trajectories.csv", "obstacles.csv", "metrics.json", "run_meta.json")}
    _write_csv(paths["trajectories.csv"], TRAJECTORY_COLUMNS, trajectory_rows(record))
    dt = record.config.dt
    obs_rows = [
        [str(k), _num(k * dt), str(j), _num(o.position.x), _num(o.position.y),
         _num(o.velocity.x), _num(o.velocity.y), _num(o.forbidden_radius),
         _num(o.influence_radius)]
        for k, obs in enumerate(record.obstacles) for j, o in enumerate(obs)
    ]
    _write_csv(paths["obstacles.csv"], OBSTACLE_COLUMNS, obs_rows)
    paths["metrics.json"].write_text(json.dumps(metrics_to_dict(metrics), indent=2) + "\n")
    meta = {
        "version": __version__,
        "planner": record.planner,
        "kind": asdict(record.kind),
        "rng_seed": record.config.rng_seed,
        "seed_derivation": "SeedSequence([rng_seed, step, uav_id, round, planner_index])",
        "config": config_to_dict(record.config),
        "leaders": [None if p is None else [p.x, p.y] for p in record.leaders],
    }
    paths["run_meta.json"].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return paths


def read_trajectories(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        d = {k: float(v) for k, v in r.items()}
        d["step"] = int(r["step"])
        d["uav_id"] = int(r["uav_id"])
        out.append(d)
    return out


def load_run(run_dir):
    """Rebuild ``(config, trajectories, obstacles, leaders, planner)`` from an exported run."""
    run_dir = Path(run_dir)
    meta = json.loads((run_dir / "run_meta.json").read_text())
    cfg = config_from_dict(meta["config"])
    traj = read_trajectories(run_dir / "trajectories.csv")
    with open(run_dir / "obstacles.csv", newline="") as fh:
        obs = [{k: float(v) for k, v in r.items()} for r in csv.DictReader(fh)]
    leaders = [None if p is None else Vec2(*p) for p in meta.get("leaders", [])]
    return cfg, traj, obs, leaders, meta["planner"]


def with_seed(cfg: ScenarioConfig, seed: int) -> ScenarioConfig:
    return replace(cfg, rng_seed=int(seed))
