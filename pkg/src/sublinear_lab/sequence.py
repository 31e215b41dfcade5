"""Joint upper expectations of functionals of identically distributed coordinates.

Three dependence semantics are supported:

* ``peng-forward``: X_{i+1} is independent to (X_1, ..., X_i). The inner
  expectation integrates the *last* coordinate, so elimination runs n, n-1, ..., 1.
* ``peng-backward``: X_k is independent to (X_{k+1}, ..., X_n). Elimination runs
  1, 2, ..., n.
* ``qwise``: coordinates independent under each fixed vertex, one vertex per
  coordinate, maximized over all vertex tuples (non-adaptive).

Joint functionals are materialized as dense tensors over the product grid in
row-major coordinate order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ArityMismatch, BudgetExceeded, ModelError, PreconditionViolated, SpaceMismatch
from .expectation import upper_expect
from .functional import Functional, is_monotone_on_grid, product, univariate
from .model import CredalSet, RandomVar
from .reports import DEFAULT_TOL, CheckReport, InequalityReport, fingerprint

PENG_FORWARD = "peng-forward"
PENG_BACKWARD = "peng-backward"
QWISE = "qwise"
SEMANTICS = (PENG_FORWARD, PENG_BACKWARD, QWISE)
PENG = (PENG_FORWARD, PENG_BACKWARD)

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True, eq=False)
class SequenceModel:
    """A marginal credal set, a horizon and a dependence semantics.

    ``values`` holds one row of outcome values per coordinate; all rows share the
    marginal's space. Coordinates are identically distributed when every row is
    equal, which is what :meth:`iid` builds; truncation experiments use distinct rows.
    """

    marginal: CredalSet
    values: np.ndarray
    semantics: str = PENG_FORWARD
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.semantics not in SEMANTICS:
            raise ModelError(f"unknown semantics {self.semantics!r}; expected one of {SEMANTICS}")
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] < 1 or vals.shape[1] != self.marginal.space.size:
            raise ModelError(f"values must have shape (horizon, {self.marginal.space.size}), got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ModelError("coordinate values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.marginal.space.size ** self.horizon > self.budget:
            raise BudgetExceeded(
                f"|Omega|^n = {self.marginal.space.size}^{self.horizon} exceeds the tensor budget {self.budget}"
            )

    @classmethod
    def iid(cls, marginal: CredalSet, x: RandomVar, horizon: int, semantics: str = PENG_FORWARD, **kw) -> "SequenceModel":
        if x.space != marginal.space:
            raise SpaceMismatch("random variable and marginal live on different spaces")
        if horizon < 1:
            raise ModelError("horizon must be >= 1")
        return cls(marginal, np.tile(x.values, (horizon, 1)), semantics, **kw)

    @property
    def horizon(self) -> int:
        return self.values.shape[0]

    @property
    def space(self):
        return self.marginal.space

    def coordinate_values(self, k: int) -> np.ndarray:
        return self.values[k]

    def coordinate(self, k: int) -> RandomVar:
        return RandomVar(self.space, self.values[k])

    def with_semantics(self, semantics: str) -> "SequenceModel":
        return replace(self, semantics=semantics)

    def with_horizon(self, horizon: int) -> "SequenceModel":
        """Truncate or extend by repeating the last coordinate's values."""
        rows = [self.values[min(k, self.horizon - 1)] for k in range(horizon)]
        return replace(self, values=np.array(rows))

    def shifted(self, shift) -> "SequenceModel":
        """Add a constant (or one constant per coordinate) to every coordinate."""
        shift = np.broadcast_to(np.asarray(shift, dtype=float), (self.horizon,))
        return replace(self, values=self.values + shift[:, None])

    def mapped(self, fn) -> "SequenceModel":
        return replace(self, values=fn(self.values))

    def reversed(self) -> "SequenceModel":
        """Coordinates in reverse order; forward and backward semantics swap."""
        sem = {PENG_FORWARD: PENG_BACKWARD, PENG_BACKWARD: PENG_FORWARD}.get(self.semantics, self.semantics)
        return replace(self, values=self.values[::-1].copy(), semantics=sem)

    def fingerprint_payload(self):
        return {
            "vertices": self.marginal.matrix,
            "values": self.values,
            "semantics": self.semantics,
        }

    def __repr__(self):
        return f"SequenceModel(n={self.horizon}, semantics={self.semantics}, vertices={self.marginal.matrix.tolist()}, values={self.values.tolist()})"


def joint_tensor(model: SequenceModel, f: Functional) -> np.ndarray:
    if f.arity != model.horizon:
        raise ArityMismatch(f"functional arity {f.arity} != horizon {model.horizon}")
    return f.grid(list(model.values))


def _eliminate_last(tensor: np.ndarray, q: np.ndarray) -> np.ndarray:
    # (..., |Omega|) @ (|Omega|, |P|) -> (..., |P|), then best vertex
    return np.max(tensor @ q.T, axis=-1)


def eval_upper_tensor(model: SequenceModel, tensor: np.ndarray) -> float:
    q = model.marginal.matrix
    n = tensor.ndim
    if model.semantics == PENG_FORWARD:
        h = tensor
        for _ in range(n):
            h = _eliminate_last(h, q)
        return float(h)
    if model.semantics == PENG_BACKWARD:
        h = tensor
        for _ in range(n):
            h = _eliminate_last(np.moveaxis(h, 0, -1), q)
        return float(h)
    # qwise: contract every axis against every vertex, then maximize over tuples
    h = tensor
    for _ in range(n):
        h = np.moveaxis(h, 0, -1) @ q.T
    return float(h.max())


def eval_upper(model: SequenceModel, f: Functional) -> float:
    return eval_upper_tensor(model, joint_tensor(model, f))


def eval_lower(model: SequenceModel, f: Functional) -> float:
    return -eval_upper(model, -f)


def _embed_split(model, split, phi1, phi2):
    n = model.horizon
    if not 1 <= split < n:
        raise ArityMismatch(f"split must lie in 1..{n - 1}")
    if phi1.arity != split or phi2.arity != n - split:
        raise ArityMismatch("phi1/phi2 arities must match the split")
    return phi1.embed(n, 0), phi2.embed(n, split)


def nd_orientation(semantics: str) -> str:
    """Which block must be the nonnegative factor in the ND inequality.

    Forward and Q-wise: the later block is negatively dependent to the earlier one,
    so the earlier-block factor is the nonnegative one. Backward: roles swap.
    """
    return "later-to-earlier" if semantics in (PENG_FORWARD, QWISE) else "earlier-to-later"


def nd_check(
    model: SequenceModel,
    split: int,
    phi1: Functional,
    phi2: Functional,
    tol: float = DEFAULT_TOL,
    monotone_tol: float = 1e-12,
) -> InequalityReport:
    """``E[phi1(X) phi2(Y)] <= E[phi1(X)] E[phi2(Y)]`` for X = first ``split``
    coordinates and Y = the rest, with hypotheses verified on the grid."""
    f1, f2 = _embed_split(model, split, phi1, phi2)
    vals = model.values
    g1 = phi1.grid(list(vals[:split]))
    g2 = phi2.grid(list(vals[split:]))
    e1, e2 = eval_upper(model, f1), eval_upper(model, f2)
    if nd_orientation(model.semantics) == "later-to-earlier":
        nonneg, nonneg_name, mean, mean_name = g1, "phi1 >= 0", e2, "E[phi2] >= 0"
    else:
        nonneg, nonneg_name, mean, mean_name = g2, "phi2 >= 0", e1, "E[phi1] >= 0"
    if np.any(nonneg < 0):
        raise PreconditionViolated(nonneg_name, f"min on grid is {nonneg.min():g}")
    if mean < 0:
        raise PreconditionViolated(mean_name, f"value is {mean:g}")
    directions = [
        d
        for d in ("nondecreasing", "nonincreasing")
        if is_monotone_on_grid(phi1, list(vals[:split]), d, monotone_tol)
        and is_monotone_on_grid(phi2, list(vals[split:]), d, monotone_tol)
    ]
    if not directions:
        raise PreconditionViolated("monotonicity", "phi1 and phi2 are not monotone in a common direction")
    lhs = eval_upper(model, product(f1, f2))
    return InequalityReport(
        "negative_dependence",
        lhs,
        e1 * e2,
        constant=1.0,
        constant_provenance="negative dependence definition",
        fingerprint=fingerprint(model, split, phi1.name, phi2.name),
        tol=tol,
        details={"direction": directions[0], "orientation": nd_orientation(model.semantics)},
    )


def identical_distribution_check(model: SequenceModel, probes: Sequence, tol: float = 1e-12) -> CheckReport:
    """Compare E[psi(X_k)] across coordinates against the marginal's E[psi(X_1)].

    ``probes`` are univariate numpy-callables or ``(name, callable)`` pairs.
    """
    report = CheckReport("identical_distribution", details={"values": {}})
    for i, probe in enumerate(probes):
        name, psi = probe if isinstance(probe, tuple) else (f"probe{i}", probe)
        reference = upper_expect(model.marginal, model.coordinate(0).map(psi))
        got = []
        for k in range(model.horizon):
            value = eval_upper(model, univariate(model.horizon, k, psi, name))
            got.append(value)
            report.trials += 1
            report.margin(-abs(value - reference))
            if abs(value - reference) > tol:
                report.fail((name, k, value, reference))
        report.details["values"][name] = got
    return report
