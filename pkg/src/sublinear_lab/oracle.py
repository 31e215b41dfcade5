"""Brute-force reference computations for cross-validating the engines.

Nothing here imports the sequence, expectation or capacity engines: joint
values come from explicit enumeration of outcome paths and vertex choices,
functionals are evaluated pointwise, and capacities are recomputed by loops.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import BudgetExceeded
from .functional import Functional, generate_monotone_functional, step_functional
from .model import RandomVar
from .reports import CheckReport

STRATEGY_CAP = 10**6


@dataclass(frozen=True)
class StrategyEnumeration:
    """All adaptive vertex choices for a horizon-n model.

    A strategy assigns one vertex index to every history of length < n; history
    ``h`` of length ``k`` has node id ``offsets[k] + int(h, base=|Omega|)``.
    """

    horizon: int
    n_outcomes: int
    n_vertices: int

    @property
    def n_nodes(self) -> int:
        return sum(self.n_outcomes**k for k in range(self.horizon))

    @property
    def count(self) -> int:
        return self.n_vertices**self.n_nodes

    def offsets(self) -> list[int]:
        out, acc = [], 0
        for k in range(self.horizon):
            out.append(acc)
            acc += self.n_outcomes**k
        return out

    def table(self) -> np.ndarray:
        """``(count, n_nodes)`` array of vertex indices, mixed-radix order."""
        if self.count > STRATEGY_CAP:
            raise BudgetExceeded(f"{self.count} strategies exceed the cap {STRATEGY_CAP}")
        s = np.arange(self.count, dtype=np.int64)
        cols = [(s // self.n_vertices**j) % self.n_vertices for j in range(self.n_nodes)]
        return np.stack(cols, axis=1) if cols else np.zeros((1, 0), dtype=np.int64)


def _decision_order(model) -> list[int]:
    """Coordinates from outermost to innermost expectation."""
    n = model.horizon
    if model.semantics == "peng-backward":
        return list(range(n - 1, -1, -1))
    return list(range(n))


def oracle_peng(model, f: Functional) -> float:
    """Maximum over every history-dependent vertex assignment of the induced
    product-measure expectation of ``f``."""
    weights = np.asarray(model.marginal.matrix, dtype=float)
    values = np.asarray(model.values, dtype=float)
    n, m = values.shape
    order = _decision_order(model)
    enum = StrategyEnumeration(n, m, weights.shape[0])
    choice = enum.table()
    offsets = enum.offsets()
    total = np.zeros(choice.shape[0])
    for path in itertools.product(range(m), repeat=n):
        prob = np.ones(choice.shape[0])
        history = 0
        for depth, outcome in enumerate(path):
            node = offsets[depth] + history
            prob = prob * weights[choice[:, node], outcome]
            history = history * m + outcome
        point = [0.0] * n
        for depth, outcome in enumerate(path):
            point[order[depth]] = values[order[depth], outcome]
        total += prob * f.at(point)
    return float(total.max())


def oracle_qwise(model, f: Functional) -> float:
    """Maximum over non-adaptive vertex tuples of the product expectation."""
    weights = np.asarray(model.marginal.matrix, dtype=float)
    values = np.asarray(model.values, dtype=float)
    n, m = values.shape
    k = weights.shape[0]
    if k**n > STRATEGY_CAP:
        raise BudgetExceeded(f"{k}^{n} vertex tuples exceed the cap {STRATEGY_CAP}")
    paths = list(itertools.product(range(m), repeat=n))
    f_vals = [f.at([values[i, w] for i, w in enumerate(path)]) for path in paths]
    best = -np.inf
    for tup in itertools.product(range(k), repeat=n):
        acc = 0.0
        for path, fv in zip(paths, f_vals):
            prob = 1.0
            for i, w in enumerate(path):
                prob *= weights[tup[i], w]
            acc += prob * fv
        best = max(best, acc)
    return float(best)


def oracle_value(model, f: Functional) -> float:
    return oracle_qwise(model, f) if model.semantics == "qwise" else oracle_peng(model, f)


def _monotone_step_tables(distinct: list[np.ndarray], direction: str, max_points: int = 16):
    """Every 0/1 function on the product grid that is monotone in ``direction``."""
    shape = tuple(len(v) for v in distinct)
    points = list(itertools.product(*[range(s) for s in shape]))
    if len(points) > max_points:
        raise BudgetExceeded(f"grid of {len(points)} points is too large for step enumeration")
    sign = 1 if direction == "nondecreasing" else -1
    for mask in range(2 ** len(points)):
        chosen = {pt for i, pt in enumerate(points) if (mask >> i) & 1}
        ok = True
        for pt in chosen:
            for ax in range(len(shape)):
                nxt = list(pt)
                nxt[ax] += sign
                if 0 <= nxt[ax] < shape[ax] and tuple(nxt) not in chosen:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            yield frozenset(chosen)


def oracle_nd_scan(model, split: int, functional_family_seed=0, count: int = 100, tol: float = 1e-9) -> CheckReport:
    """Negative-dependence inequality over all monotone 0/1 step pairs on the grid
    plus ``count`` generated monotone pairs (some deliberately shifted so that the
    sign hypothesis fails; those are counted as inapplicable)."""
    n = model.horizon
    if not 1 <= split < n:
        raise ValueError(f"split must lie in 1..{n - 1}")
    values = np.asarray(model.values, dtype=float)
    later_to_earlier = model.semantics in ("peng-forward", "qwise")
    report = CheckReport("nd_scan", details={"inapplicable": 0, "checked": 0})

    def check(phi1: Functional, phi2: Functional, grid1, grid2):
        f1, f2 = phi1.embed(n, 0), phi2.embed(n, split)
        joint = Functional(n, lambda c: f1.fn(c) * f2.fn(c), "phi1*phi2")
        e1, e2 = oracle_value(model, f1), oracle_value(model, f2)
        nonneg = min(phi1.at(pt) for pt in grid1) if later_to_earlier else min(phi2.at(pt) for pt in grid2)
        mean = e2 if later_to_earlier else e1
        if nonneg < 0 or mean < 0:
            report.details["inapplicable"] += 1
            return
        lhs, rhs = oracle_value(model, joint), e1 * e2
        report.trials += 1
        report.details["checked"] += 1
        report.margin(rhs - lhs)
        if lhs > rhs + tol * max(1.0, abs(rhs)):
            report.fail({"phi1": phi1.name, "phi2": phi2.name, "lhs": lhs, "rhs": rhs})

    first = [np.unique(values[k]) for k in range(split)]
    second = [np.unique(values[k]) for k in range(split, n)]
    grid1 = list(itertools.product(*first))
    grid2 = list(itertools.product(*second))
    for direction in ("nondecreasing", "nonincreasing"):
        tables1 = list(_monotone_step_tables(first, direction))
        tables2 = list(_monotone_step_tables(second, direction))
        for u1 in tables1:
            phi1 = step_functional(split, u1, first).renamed(f"step{sorted(u1)}")
            for u2 in tables2:
                phi2 = step_functional(n - split, u2, second).renamed(f"step{sorted(u2)}")
                check(phi1, phi2, grid1, grid2)

    rng = np.random.default_rng(functional_family_seed)
    for i in range(count):
        direction = "nondecreasing" if i % 2 == 0 else "nonincreasing"
        seeds = rng.integers(0, 2**63, 2)
        phi1 = generate_monotone_functional(int(seeds[0]), split, direction)
        phi2 = generate_monotone_functional(int(seeds[1]), n - split, direction)
        if i % 5 == 4:
            # push the sign hypothesis across zero
            phi1 = phi1.shift(-float(rng.uniform(0, 2)))
            phi2 = phi2.shift(-float(rng.uniform(0, 2)))
        check(phi1, phi2, grid1, grid2)
    return report


def _brute_upper_capacity(weights: np.ndarray, member: np.ndarray) -> float:
    best = -np.inf
    for row in weights:
        acc = 0.0
        for w, inside in zip(row, member):
            if inside:
                acc += w
        best = max(best, acc)
    return best


def oracle_choquet(view, x: RandomVar) -> float:
    """Quadrature of ``t -> V(X >= t)`` (minus 1 for t < 0) with every level and
    zero used as a breakpoint."""
    weights = np.asarray(view.source.matrix, dtype=float)
    vals = np.asarray(x.values, dtype=float)

    def cap(t: float) -> float:
        member = vals >= t
        if view.mode == "upper":
            return _brute_upper_capacity(weights, member)
        return 1.0 - _brute_upper_capacity(weights, ~member)

    def integrand(t: float) -> float:
        return cap(t) - (1.0 if t < 0 else 0.0)

    lo, hi = min(vals.min(), 0.0), max(vals.max(), 0.0)
    breaks = sorted(set(vals.tolist()) | {0.0, lo, hi})
    total = 0.0
    for a, b in zip(breaks, breaks[1:]):
        if b > a:
            piece, _ = integrate.quad(integrand, a, b, limit=50)
            total += piece
    return float(total)
