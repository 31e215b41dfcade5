"""Upper and lower expectations generated by a credal set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadExponent, PrNotNonnegative
from .model import CredalSet, RandomVar, check_same_space
from .reports import DEFAULT_TOL, CheckReport, InequalityReport, equality_report, fingerprint


@dataclass(frozen=True)
class ExpectationPair:
    upper: float
    lower: float

    def __post_init__(self):
        if self.lower > self.upper + 1e-12:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper}")


def upper_expect_detail(p: CredalSet, x: RandomVar) -> tuple[float, int]:
    """Upper expectation and the index of the first vertex attaining it."""
    check_same_space(p, x)
    values = p.matrix @ x.values
    k = int(np.argmax(values))
    return float(values[k]), k


def upper_expect(p: CredalSet, x: RandomVar) -> float:
    return upper_expect_detail(p, x)[0]


def lower_expect(p: CredalSet, x: RandomVar) -> float:
    return -upper_expect(p, -x)


def expectation_pair(p: CredalSet, x: RandomVar) -> ExpectationPair:
    return ExpectationPair(upper_expect(p, x), lower_expect(p, x))


def check_axioms(p: CredalSet, trials: int = 1000, seed=0, tol: float = 1e-9) -> CheckReport:
    """Randomized check of monotonicity, constant preservation, sub-additivity
    and positive homogeneity. Failures are recorded, never raised."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    space = p.space
    report = CheckReport("axioms", details={"first_counterexample": None})

    def fail(axiom, **data):
        report.fail((axiom, data))
        if report.details["first_counterexample"] is None:
            report.details["first_counterexample"] = {"axiom": axiom, **data}

    for _ in range(trials):
        report.trials += 1
        scale = rng.choice([1e-3, 1.0, 1e3])
        x = RandomVar(space, rng.normal(0, scale, space.size))
        y = RandomVar(space, rng.normal(0, scale, space.size))
        dominated = x - np.abs(rng.normal(0, scale, space.size))
        lam = float(rng.choice([0.0, rng.exponential(2.0)]))
        c = float(rng.normal(0, 10))
        ex, ey = upper_expect(p, x), upper_expect(p, y)

        # (a) monotonicity
        gap = ex - upper_expect(p, dominated)
        report.margin(gap)
        if gap < -tol * max(1.0, abs(ex)):
            fail("monotonicity", x=x.values.tolist(), y=dominated.values.tolist())
        # (b) constant preserving
        ec = upper_expect(p, RandomVar.constant(space, c))
        if abs(ec - c) > tol * max(1.0, abs(c)):
            fail("constant", c=c, value=ec)
        # (c) sub-additivity
        exy = upper_expect(p, x + y)
        report.margin(ex + ey - exy)
        if exy > ex + ey + tol * max(1.0, abs(ex) + abs(ey)):
            fail("subadditivity", x=x.values.tolist(), y=y.values.tolist())
        # (d) positive homogeneity
        elx = upper_expect(p, lam * x)
        if abs(elx - lam * ex) > tol * max(1.0, abs(lam * ex)):
            fail("homogeneity", x=x.values.tolist(), lam=lam)
    return report


def holder_check(p: CredalSet, x: RandomVar, y: RandomVar, exponent_p: float, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``E[|XY|] <= E[|X|^p]^(1/p) * E[|Y|^q]^(1/q)`` with ``1/p + 1/q = 1``."""
    if not exponent_p > 1:
        raise BadExponent(f"Holder exponent must exceed 1, got {exponent_p}")
    q = exponent_p / (exponent_p - 1)
    lhs = upper_expect(p, abs(x * y))
    norm_x = upper_expect(p, abs(x) ** exponent_p) ** (1 / exponent_p)
    norm_y = upper_expect(p, abs(y) ** q) ** (1 / q)
    return InequalityReport(
        "holder",
        lhs,
        norm_x * norm_y,
        constant=1.0,
        constant_provenance="Holder inequality, constant 1",
        fingerprint=fingerprint(p, x, y, exponent_p),
        tol=tol,
        details={"p": exponent_p, "q": q},
    )


def factorization_check(model, shift: float = 0.0, tol: float = 1e-9) -> list[InequalityReport]:
    """Product rule for independent nonnegative pairs under Peng semantics.

    ``model`` must have horizon 2. With ``X' = X1 + shift`` and ``Y' = X2 + shift``
    both nonnegative, checks ``E[X'Y'] = E[X']E[Y']`` and the same identity for the
    lower expectation.
    """
    from .functional import coordinate, product
    from .sequence import PENG, eval_lower, eval_upper

    if model.horizon != 2:
        raise ValueError("factorization_check needs a horizon-2 model")
    if model.semantics not in PENG:
        raise PrNotNonnegative("semantics", "factorization needs Peng independence")
    shifted = model.shifted(shift)
    for k in range(2):
        if np.any(shifted.coordinate_values(k) < 0):
            raise PrNotNonnegative(
                "nonnegative coordinates", f"shift {shift} leaves negative values in coordinate {k + 1}"
            )
    x1, x2 = coordinate(2, 0), coordinate(2, 1)
    xy = product(x1, x2)
    fp = fingerprint(model, shift)
    up = equality_report(
        "factorization_upper",
        eval_upper(shifted, xy),
        eval_upper(shifted, x1) * eval_upper(shifted, x2),
        tol=tol,
        fingerprint=fp,
        constant_provenance="product rule for independent nonnegative factors",
    )
    lo = equality_report(
        "factorization_lower",
        eval_lower(shifted, xy),
        eval_lower(shifted, x1) * eval_lower(shifted, x2),
        tol=tol,
        fingerprint=fp,
        constant_provenance="product rule for independent nonnegative factors",
    )
    return [up, lo]
