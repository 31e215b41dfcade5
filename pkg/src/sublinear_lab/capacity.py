"""Capacities generated by a credal set, Choquet integrals and the outer capacity.

On a finite space every indicator is a random variable, so the upper capacity
is simply ``V(A) = E[I_A]`` and the lower one is ``1 - V(A^c)``. Continuity from
above and below holds automatically here and is not modelled at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SpaceTooLarge
from .expectation import upper_expect
from .model import CredalSet, EventSet, RandomVar, check_same_space, complement
from .reports import DEFAULT_TOL, CheckReport, InequalityReport, fingerprint

UPPER = "upper"
LOWER = "lower"
MAX_OUTER_SPACE = 12


def upper_capacity(p: CredalSet, a: EventSet) -> float:
    check_same_space(p, a)
    return float(np.max(p.matrix @ a.membership.astype(float)))


def lower_capacity(p: CredalSet, a: EventSet) -> float:
    return 1.0 - upper_capacity(p, complement(a))


@dataclass(frozen=True)
class CapacityView:
    source: CredalSet
    mode: str = UPPER

    def __post_init__(self):
        if self.mode not in (UPPER, LOWER):
            raise ValueError(f"mode must be {UPPER!r} or {LOWER!r}")

    def __call__(self, a: EventSet) -> float:
        return upper_capacity(self.source, a) if self.mode == UPPER else lower_capacity(self.source, a)

    def at_least(self, x: RandomVar, t: float) -> float:
        """``V(X >= t)``."""
        return self(EventSet(x.space, x.values >= t))

    def greater(self, x: RandomVar, t: float) -> float:
        """``V(X > t)``."""
        return self(EventSet(x.space, x.values > t))


@dataclass(frozen=True)
class ChoquetResult:
    value: float
    level_points: tuple[float, ...]
    level_capacities: tuple[float, ...]


def choquet(view: CapacityView, x: RandomVar) -> ChoquetResult:
    """Choquet integral via the sorted-level sum
    ``x(1) + sum_{i>=2} (x(i) - x(i-1)) V(X >= x(i))``."""
    check_same_space(view.source, x)
    levels = np.unique(x.values)
    caps = [view.at_least(x, t) for t in levels]
    value = float(levels[0]) + float(np.sum(np.diff(levels) * np.array(caps[1:])))
    return ChoquetResult(value, tuple(levels.tolist()), tuple(caps))


def choquet_vs_riemann(view: CapacityView, x: RandomVar, grid_step: float = 1e-4) -> InequalityReport:
    """Midpoint-rule integration of ``t -> V(X >= t) - 1{t < 0}`` over
    ``[min - 1, max + 1]`` compared with the level-sum value."""
    if not grid_step > 0:
        raise ValueError("grid_step must be positive")
    exact = choquet(view, x).value
    lo, hi = float(x.values.min()) - 1.0, float(x.values.max()) + 1.0
    cells = max(1, int(math.ceil((hi - lo) / grid_step)))
    h = (hi - lo) / cells
    mids = lo + (np.arange(cells) + 0.5) * h
    levels = np.array(choquet(view, x).level_points)
    caps = np.array(choquet(view, x).level_capacities)
    # V(X >= t) is constant between levels: the first level >= t fixes it
    pos = np.searchsorted(levels, mids, side="left")
    v = np.where(pos < len(levels), caps[np.minimum(pos, len(levels) - 1)], 0.0)
    integrand = v - (mids < 0)
    numeric = float(integrand.sum() * h)
    # outside [lo, hi] the integrand is 1 on (0, lo) and -1 on (hi, 0)
    numeric += max(lo, 0.0) + min(hi, 0.0)
    value_range = float(x.values.max() - x.values.min())
    # a unit jump of the integrand at t = 0 contributes up to h/2 on its own
    bound = grid_step * max(value_range, 1.0)
    return InequalityReport(
        "choquet_vs_riemann",
        abs(numeric - exact),
        bound,
        constant=grid_step,
        constant_provenance="midpoint rule error for a step integrand",
        fingerprint=fingerprint(view.source, view.mode, x, grid_step),
        tol=0.0,
        details={"level_sum": exact, "midpoint": numeric, "cells": cells},
    )


def _all_upper_capacities(p: CredalSet) -> np.ndarray:
    m = p.space.size
    masks = np.arange(2**m)
    membership = ((masks[None, :] >> np.arange(m)[:, None]) & 1).astype(float)
    return np.max(p.matrix @ membership, axis=0)


def outer_capacity(p: CredalSet, a: EventSet) -> float:
    """Minimum of ``sum V(A_i)`` over finite covers of ``a``.

    Countable covers reduce to finite ones on a finite space. Covering pieces can
    be intersected with ``a`` without increasing ``V`` (monotonicity), so only
    covers by subsets of ``a`` are searched: a DP over the submask lattice.
    """
    check_same_space(p, a)
    m = p.space.size
    if m > MAX_OUTER_SPACE:
        raise SpaceTooLarge(f"outer capacity enumerates the power set; |Omega| = {m} > {MAX_OUTER_SPACE}")
    caps = _all_upper_capacities(p)
    target = int(sum(1 << i for i in range(m) if a.membership[i]))

    @lru_cache(maxsize=None)
    def cost(mask: int) -> float:
        if mask == 0:
            return 0.0
        low = mask & -mask  # some piece must contain the lowest remaining outcome
        best = math.inf
        sub = mask
        while sub:
            if sub & low:
                best = min(best, caps[sub] + cost(mask & ~sub))
            sub = (sub - 1) & mask
        return best

    return float(cost(target))


def countable_subadd_check(p: CredalSet, trials: int = 200, seed=0, max_family: int = 6, tol: float = 1e-12) -> CheckReport:
    """Random finite event families: ``V(union A_i) <= sum V(A_i)``."""
    rng = np.random.default_rng(seed)
    m = p.space.size
    report = CheckReport("countable_subadditivity")
    for _ in range(trials):
        k = int(rng.integers(1, max_family + 1))
        family = [EventSet(p.space, rng.random(m) < rng.uniform(0.1, 0.9)) for _ in range(k)]
        union = EventSet(p.space, np.logical_or.reduce([e.membership for e in family]))
        lhs = upper_capacity(p, union)
        rhs = sum(upper_capacity(p, e) for e in family)
        report.trials += 1
        report.margin(rhs - lhs)
        if lhs > rhs + tol:
            report.fail([e.membership.tolist() for e in family])
    return report


def integer_tail_sum(p: CredalSet, x: RandomVar) -> float:
    """``1 + sum_{i>=1} V(|X| > i)``; the terms vanish once ``i >= max|X|``."""
    ax = abs(x)
    view = CapacityView(p)
    top = int(math.floor(float(ax.values.max())))
    return 1.0 + sum(view.greater(ax, i) for i in range(1, top + 1))


def tail_sum_bound(p: CredalSet, x: RandomVar, j_max: int = 100, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``sum_{j<=j_max} E[(|X| ^ j)^2] / j^2 <= 2 + 3 C_V(|X|)``, where C_V(|X|) is
    bounded by the integer tail sum ``1 + sum_i V(|X| > i)``."""
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    ax = np.abs(x.values)
    lhs = sum(upper_expect(p, RandomVar(x.space, np.minimum(ax, j) ** 2)) / j**2 for j in range(1, j_max + 1))
    tail = integer_tail_sum(p, x)
    return InequalityReport(
        "tail_sum_bound",
        lhs,
        2.0 + 3.0 * tail,
        constant=3.0,
        constant_provenance="2 + 3 C_V(|X|) from the tail-sum bound chain",
        fingerprint=fingerprint(p, x, j_max),
        tol=tol,
        details={"tail_sum": tail, "choquet_abs": choquet(CapacityView(p), abs(x)).value},
    )


def mean_choquet_domination(p: CredalSet, x: RandomVar, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``E[|X|] <= C_V(|X|)``."""
    return InequalityReport(
        "mean_choquet_domination",
        upper_expect(p, abs(x)),
        choquet(CapacityView(p), abs(x)).value,
        constant=1.0,
        constant_provenance="upper mean dominated by Choquet integral",
        fingerprint=fingerprint(p, x),
        tol=tol,
    )
