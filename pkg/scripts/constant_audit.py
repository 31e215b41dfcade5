"""Tightness of the proof-derived constants.

Runs each inequality suite and prints, per suite, the largest observed ratio
lhs/rhs. A ratio near 1 means the constant is nearly attained on the random
instances; a ratio near 0 means it is loose there.

    python3 scripts/constant_audit.py --trials 500 --seed 1
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from sublinear_lab import constants as K
from sublinear_lab.suites import SuiteConfig, run_suite

SUITES = ("kolmogorov", "rosenthal_low_p", "rosenthal_nd_pge2", "rosenthal_indep_pge2", "rosenthal_general", "mz", "lower_rosenthal", "sum_squares")


@dataclass(frozen=True)
class AuditConfig:
    trials: int = 300
    seed: int = 0
    workers: int = 1


def audit(cfg: AuditConfig) -> list[tuple[str, int, float, int]]:
    out = []
    for name in SUITES:
        reps = run_suite(name, SuiteConfig(trials=cfg.trials, seed=cfg.seed, workers=cfg.workers))
        ratios = [r.lhs / r.rhs for r in reps if r.rhs > 0]
        out.append((name, len(reps), max(ratios, default=0.0), sum(not r.passed for r in reps)))
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=AuditConfig.trials)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args(argv)
    print(f"{'suite':<22} {'n':>5} {'max lhs/rhs':>12} {'fails':>6}")
    for name, n, ratio, fails in audit(AuditConfig(a.trials, a.seed, a.workers)):
        print(f"{name:<22} {n:>5} {ratio:>12.4f} {fails:>6}")
    print("\nderived constants")
    print(f"{'p':>5} {'nd':>12} {'indep':>12} {'mz':>12} {'general':>12}")
    for p in (2, 2.5, 3, 4, 6):
        print(f"{p:>5g} {K.nd_constant(p):>12.4g} {K.indep_constant(p):>12.4g} {K.mz_constant(p):>12.4g} {K.general_constant(p):>12.4g}")


if __name__ == "__main__":
    main()
