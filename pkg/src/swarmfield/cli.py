"""Command line: ``python -m swarmfield {run,sweep,compare,plot}``.

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

from .core import ConfigError
from .field import field_at
from .io import export_run, load_config, load_run
from .plot import plot_data_from_export, render_plot
from .sim import KINDS, PLANNERS, SWEEP_AXES, ScenarioKind, preset, run_scenario, sweep, write_table

log = logging.getLogger("swarmfield")

PRESETS = ("obstacle_in_front", "obstacle_on_side", "obstacle_on_side_left",
           "obstacle_on_side_right")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _scenario(args):
    """Preset name or JSON file -> (config, kind)."""
    if args.scenario in PRESETS:
        cfg, kind = preset(args.scenario, n=args.n, v_obs=args.v_obs, d_obs=args.d_obs)
    elif args.scenario in KINDS:
        raise ConfigError(f"{args.scenario!r} is not a preset; pass a scenario file")
    else:
        path = Path(args.scenario)
        if not path.exists():
            raise ConfigError(f"{args.scenario!r} is neither a preset {PRESETS} nor a file")
        cfg, kind = load_config(path), ScenarioKind("custom")
    if args.seed is not None:
        cfg = replace(cfg, rng_seed=args.seed)
    return cfg, kind


def _fmt(v) -> str:
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.6g}"
    return str(v)


def cmd_run(args) -> None:
    cfg, kind = _scenario(args)
    rec, m = run_scenario(cfg, kind, args.planner)
    paths = export_run(rec, m, args.out)
    print(f"planner={args.planner} steps={m.steps} reached={m.reached_destination} "
          f"total_energy_J={m.total_energy:.1f} min_clearance_m={_fmt(m.min_obstacle_clearance)} "
          f"min_pair_m={_fmt(m.min_uav_pair_distance)}")
    print(f"wrote {', '.join(str(p) for p in paths.values())}")


def cmd_sweep(args) -> None:
    cfg, kind = _scenario(args)
    planners = args.planners.split(",")
    values = _floats(args.values)
    if args.axis in ("N", "seed"):
        values = [int(v) for v in values]
    rows = sweep(cfg, kind, args.axis, values, planners, args.repeats,
                 progress=lambda r: log.info("%s=%s %s rep %d: E=%.0f", r["axis"], r["value"],
                                             r["planner"], r["repeat"], r["total_energy"]))
    write_table(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")


COMPARE_FIELDS = ("total_energy", "turn_energy", "min_obstacle_clearance",
                  "min_uav_pair_distance", "reached_destination", "steps")


def cmd_compare(args) -> None:
    cfg, kind = _scenario(args)
    planners = args.planners.split(",")
    rows = sweep(cfg, kind, "seed", [cfg.rng_seed], planners, args.repeats)
    table: dict[str, dict[str, list]] = {p: {f: [] for f in COMPARE_FIELDS} for p in planners}
    for r in rows:
        for f in COMPARE_FIELDS:
            table[r["planner"]][f].append(r[f])
    width = max(len(f) for f in COMPARE_FIELDS)
    print(" " * width + "".join(f"{p:>16}" for p in planners))
    for f in COMPARE_FIELDS:
        cells = []
        for p in planners:
            vals = table[p][f]
            if f == "reached_destination":
                cells.append(f"{sum(vals)}/{len(vals)}")
            elif f.startswith("min_"):
                cells.append(_fmt(min(vals)))
            else:
                cells.append(_fmt(sum(vals) / len(vals)))
        print(f"{f:<{width}}" + "".join(f"{c:>16}" for c in cells))


def cmd_plot(args) -> None:
    run_dir = Path(args.run)
    if not (run_dir / "run_meta.json").exists():
        raise ConfigError(f"{run_dir} does not contain an exported run")
    cfg, traj, obs, leaders, _ = load_run(run_dir)
    data = plot_data_from_export(cfg, traj, obs, leaders, args.step)
    levels = None
    if args.contours == "uavs":
        if data.field is None:
            raise ConfigError("run has no avoidance step to draw contours for")
        ref = (args.step if args.step is not None else
               next(k for k, p in enumerate(leaders) if p is not None))
        levels = [field_at(data.field, (r["x_m"], r["y_m"])) for r in traj
                  if r["step"] == max(ref - 1, 0)]
        levels = [v for v in levels if v > 0]
    elif args.contours:
        levels = _floats(args.contours)
    out = Path(args.out) if args.out else run_dir / "trajectories.svg"
    render_plot(data, out, levels)
    print(f"wrote {out}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swarmfield", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def scenario_args(p, default="obstacle_in_front"):
        p.add_argument("--scenario", default=default, help="preset name or scenario JSON file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--n", type=int, default=5, help="swarm size for presets")
        p.add_argument("--v-obs", type=float, default=0.0, help="obstacle speed for presets")
        p.add_argument("--d-obs", type=float, default=26.0, help="forbidden radius for presets")

    p = sub.add_parser("run", help="simulate one scenario and export it")
    scenario_args(p)
    p.add_argument("--planner", choices=PLANNERS, default="e2coop")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="sweep one parameter, write a long-format CSV")
    scenario_args(p)
    p.add_argument("--axis", required=True, help=f"one of {', '.join(SWEEP_AXES)}")
    p.add_argument("--values", required=True)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--planners", default=",".join(PLANNERS))
    p.add_argument("--out", default="sweep.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="side-by-side metrics for several planners")
    scenario_args(p)
    p.add_argument("--planners", default=",".join(PLANNERS))
    p.add_argument("--repeats", type=int, default=1)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="render an exported run as SVG")
    p.add_argument("--run", required=True, help="directory written by `run`")
    p.add_argument("--contours", default=None,
                   help="comma-separated intensity levels, or 'uavs' for each UAV's own level")
    p.add_argument("--step", type=int, default=None, help="reference step for field contours")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - top-level boundary
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0
