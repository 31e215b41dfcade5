"""Test functions of n coordinates, evaluated pointwise or on a dense outcome grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ArityMismatch

Coords = Sequence[np.ndarray]


@dataclass(frozen=True, eq=False)
class Functional:
    """An ``arity``-variate real function.

    ``fn`` receives one array per coordinate (mutually broadcastable) and
    returns an array broadcastable to their common shape.
    """

    arity: int
    fn: Callable[[Coords], np.ndarray]
    name: str = "phi"

    def __call__(self, *coords) -> np.ndarray:
        if len(coords) != self.arity:
            raise ArityMismatch(f"{self.name} takes {self.arity} coordinates, got {len(coords)}")
        arrays = [np.asarray(c, dtype=float) for c in coords]
        shape = np.broadcast_shapes(*(a.shape for a in arrays))
        return np.broadcast_to(np.asarray(self.fn(arrays), dtype=float), shape)

    def at(self, point: Sequence[float]) -> float:
        return float(self(*[np.float64(v) for v in point]))

    def grid(self, coordinate_values: Sequence[np.ndarray]) -> np.ndarray:
        """Dense tensor ``T[i1,...,in] = f(v1[i1], ..., vn[in])``, first axis slowest."""
        if len(coordinate_values) != self.arity:
            raise ArityMismatch(f"{self.name} takes {self.arity} coordinates, got {len(coordinate_values)}")
        n = self.arity
        axes = [
            np.asarray(v, dtype=float).reshape([-1 if i == k else 1 for i in range(n)])
            for k, v in enumerate(coordinate_values)
        ]
        return np.array(self(*axes), dtype=float)

    # post-transforms and combinators

    def _derive(self, fn, name) -> "Functional":
        return Functional(self.arity, fn, name)

    def abs(self) -> "Functional":
        return self._derive(lambda c: np.abs(self.fn(c)), f"|{self.name}|")

    def abs_power(self, p: float) -> "Functional":
        return self._derive(lambda c: np.abs(self.fn(c)) ** p, f"|{self.name}|^{p:g}")

    def pos(self) -> "Functional":
        return self._derive(lambda c: np.maximum(self.fn(c), 0.0), f"({self.name})+")

    def pos_power(self, p: float) -> "Functional":
        return self._derive(lambda c: np.maximum(self.fn(c), 0.0) ** p, f"(({self.name})+)^{p:g}")

    def scale(self, lam: float) -> "Functional":
        return self._derive(lambda c: lam * self.fn(c), f"{lam:g}*{self.name}")

    def shift(self, const: float) -> "Functional":
        return self._derive(lambda c: self.fn(c) + const, f"{self.name}+{const:g}")

    def __neg__(self) -> "Functional":
        return self._derive(lambda c: -self.fn(c), f"-{self.name}")

    def reversed(self) -> "Functional":
        """Same function applied to the coordinates in reverse order."""
        return self._derive(lambda c: self.fn(list(c)[::-1]), f"{self.name}[reversed]")

    def renamed(self, name: str) -> "Functional":
        return Functional(self.arity, self.fn, name)

    def embed(self, arity: int, offset: int = 0) -> "Functional":
        """Same function read off coordinates ``offset .. offset+self.arity-1`` of a wider vector."""
        if offset < 0 or offset + self.arity > arity:
            raise ArityMismatch(f"cannot embed arity {self.arity} at offset {offset} into arity {arity}")
        return Functional(arity, lambda c: self.fn(c[offset : offset + self.arity]), self.name)


def product(f: Functional, g: Functional) -> Functional:
    _same_arity(f, g)
    return Functional(f.arity, lambda c: f.fn(c) * g.fn(c), f"({f.name})*({g.name})")


def add(f: Functional, g: Functional) -> Functional:
    _same_arity(f, g)
    return Functional(f.arity, lambda c: f.fn(c) + g.fn(c), f"({f.name})+({g.name})")


def _same_arity(f, g):
    if f.arity != g.arity:
        raise ArityMismatch(f"arity {f.arity} vs {g.arity}")


def constant(arity: int, value: float) -> Functional:
    return Functional(arity, lambda c: np.float64(value), f"{value:g}")


def coordinate(arity: int, k: int) -> Functional:
    """The k-th coordinate (0-based)."""
    if not 0 <= k < arity:
        raise ArityMismatch(f"coordinate {k} out of range for arity {arity}")
    return Functional(arity, lambda c: c[k], f"x{k + 1}")


def univariate(arity: int, k: int, fn: Callable[[np.ndarray], np.ndarray], name: str = "psi") -> Functional:
    return Functional(arity, lambda c: fn(c[k]), f"{name}(x{k + 1})")


def _partial_sums(c: Coords) -> list:
    sums, s = [], 0.0
    for v in c:
        s = s + v
        sums.append(s)
    return sums


def partial_sum_max(arity: int) -> Functional:
    """``max_{k<=n} S_k``."""
    return Functional(arity, lambda c: _reduce_max(_partial_sums(c)), "max_k S_k")


def partial_sum_max_abs(arity: int) -> Functional:
    """``max_{k<=n} |S_k|``."""
    return Functional(arity, lambda c: _reduce_max([np.abs(s) for s in _partial_sums(c)]), "max_k |S_k|")


def reverse_sum_max(arity: int) -> Functional:
    """``max_{0<=m<n} (S_n - S_m)``: maximal partial sum of the reversed sequence."""
    return partial_sum_max(arity).reversed().renamed("max_m (S_n - S_m)")


def total_sum(arity: int) -> Functional:
    return Functional(arity, lambda c: _partial_sums(c)[-1], "S_n")


def sum_power(arity: int, p: float) -> Functional:
    """``|S_n|^p``."""
    return total_sum(arity).abs_power(p)


def sum_abs_power(arity: int, p: float) -> Functional:
    """``sum_k |x_k|^p``."""
    return Functional(arity, lambda c: sum(np.abs(v) ** p for v in c), f"sum |x_k|^{p:g}")


def sum_squares_power(arity: int, p: float) -> Functional:
    """``(sum_k x_k^2)^(p/2)``."""
    return Functional(arity, lambda c: sum(v * v for v in c) ** (p / 2), f"(sum x_k^2)^{p / 2:g}")


def _reduce_max(arrays):
    out = arrays[0]
    for a in arrays[1:]:
        out = np.maximum(out, a)
    return out


def lookup(coordinate_values: Sequence[Sequence[float]], table) -> Functional:
    """Functional defined by a table over the outcome grid.

    ``coordinate_values[k]`` lists the distinct support values of coordinate k and
    ``table`` has shape ``(len(v1), ..., len(vn))``.
    """
    keys = [np.asarray(v, dtype=float) for v in coordinate_values]
    table = np.asarray(table, dtype=float)
    if table.shape != tuple(len(k) for k in keys):
        raise ArityMismatch(f"table shape {table.shape} does not match value lists")
    orders = [np.argsort(k) for k in keys]
    sorted_keys = [k[o] for k, o in zip(keys, orders)]
    if any(np.any(np.diff(s) == 0) for s in sorted_keys):
        raise ValueError("lookup keys must be distinct per coordinate")

    def fn(c):
        idx = []
        for v, s, o in zip(c, sorted_keys, orders):
            pos = np.searchsorted(s, v)
            pos = np.clip(pos, 0, len(s) - 1)
            if not np.all(s[pos] == v):
                raise KeyError("lookup functional evaluated off its grid")
            idx.append(o[pos])
        return table[tuple(np.broadcast_arrays(*idx))]

    return Functional(len(keys), fn, "table")


def _ramp(rng, direction: str, lo: float, hi: float):
    k1, k2 = np.sort(rng.uniform(lo, hi, 2))
    if k2 - k1 < 1e-6:
        k2 = k1 + 1e-6
    base = rng.uniform(0.0, 0.5)
    slope = rng.exponential(1.0)
    if direction == "nondecreasing":
        return lambda v: base + slope * np.clip(v - k1, 0.0, k2 - k1)
    return lambda v: base + slope * np.clip(k2 - v, 0.0, k2 - k1)


def generate_monotone_functional(
    seed,
    arity: int,
    direction: str = "nondecreasing",
    terms: int = 3,
    knot_range: tuple[float, float] = (-3.0, 3.0),
) -> Functional:
    """Random coordinatewise monotone, nonnegative functional.

    A sum of ``terms`` products of per-coordinate piecewise-linear ramps, each
    nonnegative and monotone in ``direction``; deterministic in ``seed``.
    """
    if arity < 1:
        raise ArityMismatch("arity must be >= 1")
    if direction not in ("nondecreasing", "nonincreasing"):
        raise ValueError(f"unknown direction {direction!r}")
    rng = np.random.default_rng(seed)
    lo, hi = knot_range
    products = [[_ramp(rng, direction, lo, hi) for _ in range(arity)] for _ in range(terms)]

    def fn(c):
        total = 0.0
        for ramps in products:
            term = 1.0
            for r, v in zip(ramps, c):
                term = term * r(v)
            total = total + term
        return total

    return Functional(arity, fn, f"monotone[{direction},seed={seed}]")


def step_functional(arity: int, upset: frozenset, coordinate_values: Sequence[np.ndarray]) -> Functional:
    """0/1 functional equal to 1 exactly on the grid points listed in ``upset``
    (tuples of per-coordinate value indices)."""
    table = np.zeros([len(v) for v in coordinate_values])
    for idx in upset:
        table[idx] = 1.0
    return lookup(coordinate_values, table)


def is_monotone_on_grid(f: Functional, coordinate_values: Sequence[np.ndarray], direction: str, tol: float = 0.0) -> bool:
    """Exhaustive finite-difference check along every axis of the sorted grid."""
    sorted_vals = [np.unique(np.asarray(v, dtype=float)) for v in coordinate_values]
    tensor = f.grid(sorted_vals)
    sign = 1.0 if direction == "nondecreasing" else -1.0
    return all(np.all(sign * np.diff(tensor, axis=ax) >= -tol) for ax in range(tensor.ndim))
