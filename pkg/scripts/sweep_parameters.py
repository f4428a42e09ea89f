"""Parameter sweeps behind the trend checks: D_obs, D_v2v, lambda1 and obstacle speed.

Writes one long-format CSV per axis into --out-dir and prints mean energy per value.

    python scripts/sweep_parameters.py --repeats 3 --out-dir sweeps
"""

from __future__ import annotations

import argparse
import statistics
from pathlib import Path

from swarmfield.sim import preset, sweep, write_table

AXES = {
    "D_obs": [10.0, 16.0, 22.0, 26.0],
    "D_v2v": [0.5, 1.0, 2.0, 4.0],
    "lambda1": [0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "v_obs": [0.0, 2.0, 5.0, 8.0, 10.0],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default="obstacle_in_front")
    ap.add_argument("--v-obs", type=float, default=5.0)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--planners", default="e2coop")
    ap.add_argument("--axes", default=",".join(AXES))
    ap.add_argument("--out-dir", default="sweeps")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg, kind = preset(args.scenario, v_obs=args.v_obs)
    planners = args.planners.split(",")
    for axis in args.axes.split(","):
        rows = sweep(cfg, kind, axis, AXES[axis], planners, args.repeats)
        write_table(rows, out / f"{axis}.csv")
        for p in planners:
            for v in AXES[axis]:
                cell = [r for r in rows if r["planner"] == p and r["value"] == v]
                e = statistics.mean(r["total_energy"] for r in cell)
                reached = sum(r["reached_destination"] for r in cell)
                clear = min(r["min_obstacle_clearance"] for r in cell)
                print(f"{axis}={v:g} {p}: energy {e:.0f} J, reached {reached}/{len(cell)}, "
                      f"min clearance {clear:.1f} m")


if __name__ == "__main__":
    main()
