"""Head-on comparison grid shared by the experiment scripts and the acceptance suite."""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .sim import Metrics, preset, run_scenario

# E2Coop's forbidden radius is set to the clearance each baseline keeps on its own
MATCHED_D_OBS = {"ffpso": 26.0, "ppso": 16.0}


@dataclass
class GridCell:
    v_obs: float
    seed: int
    runs: dict[str, Metrics]  # "e2coop@26", "ffpso", "e2coop@16", "ppso"

    def energy(self, key: str) -> float:
        return self.runs[key].total_energy

    def savings(self) -> dict[str, float]:
        """Relative saving of the matched E2Coop run against each baseline."""
        return {b: 1.0 - self.energy(f"e2coop@{d:g}") / self.energy(b)
                for b, d in MATCHED_D_OBS.items()}

    def e2coop_wins(self) -> bool:
        return all(s > 0 for s in self.savings().values())


def energy_grid(speeds, seeds, n: int = 5, kind: str = "obstacle_in_front") -> list[GridCell]:
    cells = []
    for v in speeds:
        for seed in seeds:
            runs = {}
            for base, d_obs in MATCHED_D_OBS.items():
                cfg, k = preset(kind, n=n, v_obs=v, d_obs=d_obs, rng_seed=seed)
                runs[f"e2coop@{d_obs:g}"] = run_scenario(cfg, k, "e2coop")[1]
                runs[base] = run_scenario(cfg, k, base)[1]
            cells.append(GridCell(v, seed, runs))
    return cells


def ordering_summary(cells: list[GridCell]) -> dict[str, float]:
    """Fraction of cells where E2Coop beats both baselines, and the median of
    the saving against whichever baseline is cheaper in that cell."""
    wins = sum(c.e2coop_wins() for c in cells)
    vs_better = []
    for c in cells:
        better = min(MATCHED_D_OBS, key=c.energy)
        vs_better.append(c.savings()[better])
    return {"cells": len(cells), "win_fraction": wins / len(cells),
            "median_saving": statistics.median(vs_better)}


def mean_energy(cells: list[GridCell], key: str, v_obs: float) -> float:
    return statistics.mean(c.energy(key) for c in cells if c.v_obs == v_obs)
