"""Running means of the two-point model under every policy kind.

Writes one CSV per trajectory plus a summary of the tail intervals.

    python3 scripts/slln_demo.py --steps 100000 --out runs/demo
"""

from __future__ import annotations

import argparse
import os
from dataclasses import dataclass

from sublinear_lab.generators import derive_seeds
from sublinear_lab.model import m0
from sublinear_lab.slln import parse_policy, run_trajectories, slln_band_check, write_trajectory

DEFAULT_POLICIES = ("fixed:0", "fixed:1", "iid", "periodic:1000", "doubling", "greedy:0.2", "greedy:-0.2", "schedule:0,1,1")


@dataclass(frozen=True)
class DemoConfig:
    steps: int = 100_000
    trajectories: int = 4
    seed: int = 0
    delta: float = 0.02
    out: str | None = None
    policies: tuple[str, ...] = DEFAULT_POLICIES


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=DemoConfig.steps)
    ap.add_argument("--trajectories", type=int, default=DemoConfig.trajectories)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--delta", type=float, default=DemoConfig.delta)
    ap.add_argument("--out")
    ap.add_argument("--policy", action="append")
    a = ap.parse_args(argv)
    cfg = DemoConfig(a.steps, a.trajectories, a.seed, a.delta, a.out, tuple(a.policy or DEFAULT_POLICIES))

    p, x = m0()
    policies = [parse_policy(s) for s in cfg.policies]
    seeds = derive_seeds(cfg.seed, cfg.trajectories)
    trajs = run_trajectories(p, x, policies, cfg.steps, seeds)
    print(f"{'policy':<16} {'final mean':>11} {'tail min':>9} {'tail max':>9}")
    for t in trajs:
        print(f"{t.policy.spec():<16} {t.running_means[-1]:>11.4f} {t.tail_min:>9.4f} {t.tail_max:>9.4f}")
    rep = slln_band_check(trajs, p, x, cfg.delta)
    print(rep.line())
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        for i, t in enumerate(trajs):
            stem = os.path.join(cfg.out, f"traj_{i:03d}")
            write_trajectory(t, stem + ".csv", stem + ".json")


if __name__ == "__main__":
    main()
