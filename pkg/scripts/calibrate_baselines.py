"""Observed clearances of the baselines on the head-on preset, over a gain grid.

The E2Coop forbidden radius used in the energy comparison is matched to these
clearances, so this is how the FFPSO repulsion gain and PPSO repulsion gain
in the config defaults were picked.

    python scripts/calibrate_baselines.py --seeds 3
"""

from __future__ import annotations

import argparse
import statistics
from dataclasses import replace

from swarmfield.sim import preset, run_scenario


def clearances(planner: str, gain: float, d_obs: float, speeds, seeds):
    out = []
    for v in speeds:
        for seed in seeds:
            cfg, kind = preset("obstacle_in_front", v_obs=v, d_obs=d_obs, rng_seed=seed)
            if planner == "ffpso":
                cfg = replace(cfg, ffpso=replace(cfg.ffpso, repulsion_gain=gain))
            else:
                cfg = replace(cfg, ppso=replace(cfg.ppso, repulse_gain=gain))
            _, m = run_scenario(cfg, kind, planner)
            out.append((m.min_obstacle_clearance, m.min_uav_pair_distance))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--speeds", default="0,5,10")
    ap.add_argument("--ffpso-gains", default="2000,4000,6000,9000")
    ap.add_argument("--ppso-gains", default="400,800,1200,2000")
    args = ap.parse_args()
    speeds = [float(v) for v in args.speeds.split(",")]
    seeds = range(args.seeds)
    for planner, gains, d_obs in (("ffpso", args.ffpso_gains, 26.0),
                                  ("ppso", args.ppso_gains, 16.0)):
        for g in (float(x) for x in gains.split(",")):
            res = clearances(planner, g, d_obs, speeds, seeds)
            clear = [c for c, _ in res]
            pair = min(p for _, p in res)
            print(f"{planner} gain={g:g}: obstacle clearance min {min(clear):.1f} / median "
                  f"{statistics.median(clear):.1f} / max {max(clear):.1f} m; "
                  f"min UAV pair {pair:.2f} m")


if __name__ == "__main__":
    main()
