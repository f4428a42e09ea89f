"""Render the three preset encounters for every planner as SVGs with field contours.

    python scripts/plot_demo.py --v-obs 5 --out-dir plots
"""

from __future__ import annotations

import argparse
from pathlib import Path

from swarmfield.field import field_at
from swarmfield.plot import plot_data_from_record, render_plot
from swarmfield.sim import PLANNERS, preset, run_scenario

KINDS = ("obstacle_in_front", "obstacle_on_side_left", "obstacle_on_side_right")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--v-obs", type=float, default=5.0)
    ap.add_argument("--out-dir", default="plots")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for kind in KINDS:
        for planner in PLANNERS:
            cfg, k = preset(kind, v_obs=args.v_obs)
            rec, m = run_scenario(cfg, k, planner)
            # contours come from E2Coop's field, so baselines get plain trajectories
            data = plot_data_from_record(rec)
            levels = None
            if data.field is not None:
                step = next(i for i, p in enumerate(rec.leaders) if p is not None)
                levels = [field_at(data.field, u.position)
                          for u in rec.snapshots[max(step - 1, 0)].states]
            path = out / f"{kind}_{planner}.svg"
            render_plot(data, path, levels)
            print(f"{path}: energy {m.total_energy:.0f} J, clearance "
                  f"{m.min_obstacle_clearance:.1f} m")


if __name__ == "__main__":
    main()
