"""Cluster coverage of alternating-block policies as a function of block growth.

With blocks growing by a factor r, running means oscillate with amplitude about
(U - L)/2 * (r - 1)/(r + 1) around the midpoint of [L, U]. This script measures
coverage and the visited range for several r and prints them next to that
prediction.

    python3 scripts/cluster_sweep.py --steps 1000000 --growth 2 4 8 10 16
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from sublinear_lab.generators import derive_seeds
from sublinear_lab.model import m0
from sublinear_lab.slln import SelectionPolicy, cluster_check, simulate


@dataclass(frozen=True)
class SweepConfig:
    steps: int = 10**6
    growth: tuple[float, ...] = (2.0, 4.0, 8.0, 10.0, 16.0)
    seeds: int = 8
    seed: int = 0
    width: float = 0.05


def run(cfg: SweepConfig) -> list[dict]:
    p, x = m0()
    rows = []
    for r in cfg.growth:
        covs, lo, hi = [], [], []
        for s in derive_seeds(cfg.seed, cfg.seeds):
            t = simulate(p, x, SelectionPolicy.periodic(1, r), cfg.steps, s, keep_path=True)
            est = cluster_check(t.path, p, x, width=cfg.width)
            covs.append(est.coverage)
            lo.append(est.interval[0])
            hi.append(est.interval[1])
        rows.append(
            {
                "growth": r,
                "predicted_amplitude": 0.2 * (r - 1) / (r + 1),
                "mean_low": sum(lo) / len(lo),
                "mean_high": sum(hi) / len(hi),
                "min_coverage": min(covs),
                "mean_coverage": sum(covs) / len(covs),
            }
        )
    return rows


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=SweepConfig.steps)
    ap.add_argument("--growth", type=float, nargs="+", default=list(SweepConfig.growth))
    ap.add_argument("--seeds", type=int, default=SweepConfig.seeds)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)
    rows = run(SweepConfig(a.steps, tuple(a.growth), a.seeds, a.seed))
    print(f"{'growth':>7} {'pred_amp':>9} {'low':>8} {'high':>8} {'min_cov':>8} {'mean_cov':>9}")
    for r in rows:
        print(
            f"{r['growth']:>7g} {r['predicted_amplitude']:>9.4f} {r['mean_low']:>8.4f} {r['mean_high']:>8.4f}"
            f" {r['min_coverage']:>8.3f} {r['mean_coverage']:>9.3f}"
        )


if __name__ == "__main__":
    main()
