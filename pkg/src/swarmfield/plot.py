"""Static SVG rendering of a run: trajectories, forbidden circles, leader, field contours."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

from .core import Obstacle, UavState, Vec2  # noqa: E402
from .field import EnvironmentField, build_field, raster  # noqa: E402


@dataclass
class PlotData:
    paths: dict[int, np.ndarray]
    obstacles: list[tuple[Vec2, float]]  # (position, forbidden radius) at the reference step
    obstacle_tracks: list[np.ndarray] = field(default_factory=list)
    leader: Vec2 | None = None
    field: EnvironmentField | None = None


def _first_avoid_step(leaders: Sequence) -> int | None:
    for k, p in enumerate(leaders):
        if p is not None:
            return k
    return None


def plot_data_from_record(record, step: int | None = None) -> PlotData:
    """Collect what the plot needs; the reference step defaults to the first avoidance step."""
    if not record.snapshots:
        raise ValueError("empty run record")
    ids = [u.id for u in record.snapshots[0].states]
    paths = {i: np.array([[s.position.x, s.position.y] for snap in record.snapshots
                          for s in snap.states if s.id == i]) for i in ids}
    if step is None:
        step = _first_avoid_step(record.leaders)
    ref = 0 if step is None else step
    obs_now = record.obstacles[ref]
    tracks = [np.array([[obs[j].position.x, obs[j].position.y] for obs in record.obstacles])
              for j in range(len(record.obstacles[0]))]
    fld = None
    leader = None
    if step is not None and obs_now:
        cfg = record.config
        states = record.snapshots[step - 1].states if step > 0 else record.snapshots[0].states
        fld = build_field(states, obs_now, cfg.destination, cfg.advance_offset,
                          cfg.swarm_range_factor)
        leader = record.leaders[step]
    return PlotData(paths, [(o.position, o.forbidden_radius) for o in obs_now], tracks,
                    leader, fld)


def plot_data_from_export(cfg, traj: list[dict], obstacles: list[dict],
                          leaders: Sequence, step: int | None = None) -> PlotData:
    ids = sorted({r["uav_id"] for r in traj})
    paths = {i: np.array([[r["x_m"], r["y_m"]] for r in traj if r["uav_id"] == i]) for i in ids}
    if step is None:
        step = _first_avoid_step(leaders)
    ref = 0 if step is None else step
    obs_ids = sorted({int(o["obstacle_id"]) for o in obstacles})
    tracks = [np.array([[o["x_m"], o["y_m"]] for o in obstacles if int(o["obstacle_id"]) == j])
              for j in obs_ids]
    now = [o for o in obstacles if int(o["step"]) == ref]
    obs_now = [Obstacle(Vec2(o["x_m"], o["y_m"]), Vec2(o["vx_mps"], o["vy_mps"]),
                        o["forbidden_radius_m"], o["influence_radius_m"]) for o in now]
    fld = None
    leader = None
    if step is not None and obs_now:
        prev = max(step - 1, 0)
        speeds = {u.id: u.speed for u in cfg.uavs}
        states = [UavState(r["uav_id"], Vec2(r["x_m"], r["y_m"]), speeds.get(r["uav_id"], 0.0),
                           r["heading_rad"]) for r in traj if r["step"] == prev]
        fld = build_field(states, obs_now, cfg.destination, cfg.advance_offset,
                          cfg.swarm_range_factor)
        leader = leaders[step] if step < len(leaders) else None
    return PlotData(paths, [(o.position, o.forbidden_radius) for o in obs_now], tracks,
                    leader, fld)


def render_plot(data: PlotData, out, contour_levels: Sequence[float] | None = None,
                field_raster: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None,
                resolution: int = 200):
    """Write an SVG and return the matplotlib figure.

    Artists carry SVG ids: ``trajectory-<uav>``, ``forbidden-<j>``, ``leader``
    and ``contour-<i>`` (one per requested level).
    """
    if not data.paths:
        raise ValueError("nothing to plot")
    fig, ax = plt.subplots(figsize=(8, 6))
    ax.set_aspect("equal")
    pts = np.vstack(list(data.paths.values()))
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    for pos, r in data.obstacles:
        lo = np.minimum(lo, [pos.x - r, pos.y - r])
        hi = np.maximum(hi, [pos.x + r, pos.y + r])
    pad = 0.05 * max(hi - lo) + 1.0
    lo, hi = lo - pad, hi + pad

    if contour_levels:
        levels = sorted(float(v) for v in contour_levels)
        if field_raster is None:
            if data.field is None:
                raise ValueError("contour levels requested but no field or raster available")
            field_raster = raster(data.field, (lo[0], hi[0]), (lo[1], hi[1]),
                                  resolution, resolution)
        xs, ys, vals = field_raster
        for i, lv in enumerate(levels):
            cs = ax.contour(xs, ys, vals, levels=[lv], colors="tab:blue", linewidths=0.8)
            cs.set_gid(f"contour-{i}")

    for uid, path in sorted(data.paths.items()):
        (line,) = ax.plot(path[:, 0], path[:, 1], color="tab:red", linewidth=1.2)
        line.set_gid(f"trajectory-{uid}")
    for j, (pos, r) in enumerate(data.obstacles):
        c = Circle((pos.x, pos.y), r, fill=False, edgecolor="black", linestyle="--")
        c.set_gid(f"forbidden-{j}")
        ax.add_patch(c)
    for j, tr in enumerate(data.obstacle_tracks):
        if len(tr) > 1 and np.ptp(tr, axis=0).max() > 0:
            (line,) = ax.plot(tr[:, 0], tr[:, 1], color="gray", linewidth=0.8, linestyle=":")
            line.set_gid(f"obstacle-track-{j}")
    if data.leader is not None:
        (m,) = ax.plot([data.leader.x], [data.leader.y], marker="o", color="black",
                       markersize=5, linestyle="none")
        m.set_gid("leader")
    ax.set_xlim(lo[0], hi[0])
    ax.set_ylim(lo[1], hi[1])
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    out = Path(out)
    try:
        fig.savefig(out, format="svg")
    except OSError as exc:
        plt.close(fig)
        raise OSError(f"cannot write plot {out}: {exc}") from exc
    return fig
