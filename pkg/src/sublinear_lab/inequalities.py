"""Maximal moment inequalities for partial sums, checked against explicit constants.

Sum forms
---------
``partial``   ``max_{1<=k<=n} S_k``
``reverse``   ``max_{0<=m<n} (S_n - S_m)``, the partial-sum maximum of the reversed sequence
``positive``  ``S_n^+``

Which form a bound applies to depends on the direction of dependence:
``peng-backward`` (X_k independent to the future) supports ``partial``,
``peng-forward`` supports ``reverse``, and Q-wise products are negatively
dependent in both directions so they support both. ``positive`` is dominated
by either maximum and is always admissible.
"""

from __future__ import annotations

import numpy as np

from . import constants as K
from .errors import BadExponent, HypothesisViolated
from .expectation import lower_expect, upper_expect
from .functional import (
    Functional,
    partial_sum_max,
    partial_sum_max_abs,
    reverse_sum_max,
    sum_abs_power,
    sum_squares_power,
    total_sum,
)
from .model import RandomVar
from .reports import DEFAULT_TOL, CheckReport, InequalityReport, fingerprint
from .sequence import PENG_BACKWARD, PENG_FORWARD, QWISE, SequenceModel, eval_lower, eval_upper

CENTER_TOL = 1e-12

PARTIAL = "partial"
REVERSE = "reverse"
POSITIVE = "positive"
FORMS = (PARTIAL, REVERSE, POSITIVE)

# forms justified under negative dependence and under Peng independence
ND_FORMS = {PENG_BACKWARD: (PARTIAL, POSITIVE), PENG_FORWARD: (REVERSE, POSITIVE), QWISE: FORMS}
INDEP_FORMS = {PENG_BACKWARD: (PARTIAL, POSITIVE), PENG_FORWARD: (REVERSE, POSITIVE)}
DEFAULT_FORM = {PENG_BACKWARD: PARTIAL, PENG_FORWARD: REVERSE, QWISE: PARTIAL}


def sum_form(n: int, form: str) -> Functional:
    if form == PARTIAL:
        return partial_sum_max(n)
    if form == REVERSE:
        return reverse_sum_max(n)
    if form == POSITIVE:
        return total_sum(n).pos().renamed("S_n+")
    raise ValueError(f"unknown sum form {form!r}; expected one of {FORMS}")


def _resolve_form(model: SequenceModel, form: str | None, table: dict, what: str) -> str:
    allowed = table.get(model.semantics)
    if allowed is None:
        raise HypothesisViolated(what, f"not available under {model.semantics} semantics")
    form = form or DEFAULT_FORM[model.semantics]
    if form not in allowed:
        raise HypothesisViolated(what, f"form {form!r} is not covered under {model.semantics}; use one of {allowed}")
    return form


def _check_p(p: float, lo: float, hi: float = np.inf) -> float:
    p = float(p)
    if not (lo <= p <= hi and np.isfinite(p)):
        raise BadExponent(f"p must lie in [{lo}, {hi}], got {p}")
    return p


def coordinate_upper(model: SequenceModel, fn=lambda v: v) -> np.ndarray:
    """``E[fn(X_k)]`` for each coordinate, from the marginal credal set."""
    return np.array([upper_expect(model.marginal, RandomVar(model.space, fn(v))) for v in model.values])


def coordinate_lower(model: SequenceModel, fn=lambda v: v) -> np.ndarray:
    return np.array([lower_expect(model.marginal, RandomVar(model.space, fn(v))) for v in model.values])


def center_upper(model: SequenceModel) -> SequenceModel:
    """Shift every coordinate by minus its upper mean."""
    out = model.shifted(-coordinate_upper(model))
    _require_upper_centered(out, exact=True)
    return out


def center_lower(model: SequenceModel) -> SequenceModel:
    """Shift every coordinate by minus its lower mean."""
    out = model.shifted(-coordinate_lower(model))
    if np.any(np.abs(coordinate_lower(out)) > CENTER_TOL):
        raise HypothesisViolated("lower mean zero", "centering left a residual lower mean")
    return out


def _require_upper_centered(model: SequenceModel, exact: bool = False):
    means = coordinate_upper(model)
    bad = np.abs(means) > CENTER_TOL if exact else means > CENTER_TOL
    if np.any(bad):
        raise HypothesisViolated("E[X_k] <= 0", f"upper means {means.tolist()}")


def _require_lower_centered(model: SequenceModel):
    means = coordinate_lower(model)
    if np.any(means > CENTER_TOL):
        raise HypothesisViolated("lower E[X_k] <= 0", f"lower means {means.tolist()}")


def _prepare(model: SequenceModel, centered: bool, lower: bool = False) -> SequenceModel:
    if not centered:
        model = center_lower(model) if lower else center_upper(model)
    if lower:
        _require_lower_centered(model)
    else:
        _require_upper_centered(model)
    return model


def _report(name, model, lhs, rhs, constant, provenance, tol, extra=(), **details) -> InequalityReport:
    return InequalityReport(
        name,
        float(lhs),
        float(rhs),
        constant=float(constant),
        constant_provenance=provenance,
        fingerprint=fingerprint(model, name, *extra),
        tol=tol,
        details=details,
    )


def kolmogorov_verify(model: SequenceModel, centered: bool = False, form: str | None = None, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``E[(max S_k)^2] <= sum E[X_k^2]``.

    With ``centered=False`` the coordinates are first shifted to zero upper mean;
    with ``centered=True`` the input must already satisfy ``E[X_k] <= 0``.
    """
    model = _prepare(model, centered)
    form = _resolve_form(model, form, ND_FORMS, "negative dependence")
    lhs = eval_upper(model, sum_form(model.horizon, form).abs_power(2.0))
    rhs = coordinate_upper(model, np.square).sum()
    return _report("kolmogorov", model, lhs, rhs, 1.0, "constant 1", tol, (form,), form=form)


def rosenthal_low_p_verify(
    model: SequenceModel, p: float, form: str | None = None, centered: bool = False, tol: float = DEFAULT_TOL
) -> InequalityReport:
    """``E[|max S_k|^p] <= 2^(2-p) sum E|X_k|^p`` for ``1 <= p <= 2``."""
    p = _check_p(p, 1.0, 2.0)
    model = _prepare(model, centered)
    form = _resolve_form(model, form, ND_FORMS, "negative dependence")
    lhs = eval_upper(model, sum_form(model.horizon, form).abs_power(p))
    c = 2.0 ** (2.0 - p)
    rhs = c * coordinate_upper(model, lambda v: np.abs(v) ** p).sum()
    return _report(
        "rosenthal_low_p", model, lhs, rhs, c, "2^(2-p) from |x+y|^p <= 2^(2-p)|x|^p + |y|^p + p x|y|^(p-1)sgn(y)",
        tol, (form, p), form=form, p=p,
    )


def rosenthal_nd_pge2_verify(
    model: SequenceModel, p: float, form: str | None = None, centered: bool = False, tol: float = DEFAULT_TOL
) -> InequalityReport:
    """``E[|max S_k|^p] <= 2a + (2c)^(p/2)`` with ``a = 2^p p^2 sum E|X_k|^p`` and
    ``c = 2^p p^2 sum_{k<n} (E|X_k|^p)^(2/p)``; the weaker theorem form
    ``C_p n^(p/2-1) sum E|X_k|^p`` is recorded and checked alongside."""
    p = _check_p(p, 2.0)
    model = _prepare(model, centered)
    form = _resolve_form(model, form, ND_FORMS, "negative dependence")
    n = model.horizon
    lhs = eval_upper(model, sum_form(n, form).abs_power(p))
    moments = coordinate_upper(model, lambda v: np.abs(v) ** p)
    h = K.high_moment_factor(p)
    a = h * moments.sum()
    # the recursion only accumulates the first n-1 coordinates in its square term
    c = h * np.sum(moments[:-1] ** (2.0 / p))
    proof_rhs = K.closure_two_term(p, a, c)
    theorem_rhs = K.nd_constant(p) * n ** (p / 2.0 - 1.0) * moments.sum()
    return _report(
        "rosenthal_nd_pge2", model, lhs, proof_rhs, K.nd_constant(p),
        "two-term closure 2a + (2c)^(p/2), theorem form via power-mean step", tol, (form, p),
        form=form, p=p, a=a, c=c, theorem_rhs=theorem_rhs,
        theorem_pass=bool(lhs <= theorem_rhs + tol * max(1.0, abs(theorem_rhs))),
    )


def rosenthal_indep_pge2_verify(
    model: SequenceModel, p: float, form: str | None = None, centered: bool = False, tol: float = DEFAULT_TOL
) -> InequalityReport:
    """``E[|max S_k|^p] <= 2a + (2c)^(p/2)`` with ``a = 2^p p^2 sum E|X_k|^p`` and
    ``c = 2^p p^2 sum_{k<n} E[X_k^2]``; theorem form
    ``C_p {sum E|X_k|^p + (sum E X_k^2)^(p/2)}``. Requires Peng independence."""
    p = _check_p(p, 2.0)
    model = _prepare(model, centered)
    form = _resolve_form(model, form, INDEP_FORMS, "Peng independence")
    lhs = eval_upper(model, sum_form(model.horizon, form).abs_power(p))
    moments = coordinate_upper(model, lambda v: np.abs(v) ** p)
    squares = coordinate_upper(model, np.square)
    h = K.high_moment_factor(p)
    a = h * moments.sum()
    c = h * squares[:-1].sum()
    proof_rhs = K.closure_two_term(p, a, c)
    theorem_rhs = K.indep_constant(p) * (moments.sum() + squares.sum() ** (p / 2.0))
    return _report(
        "rosenthal_indep_pge2", model, lhs, proof_rhs, K.indep_constant(p),
        "two-term closure 2a + (2c)^(p/2) with independence factorization of the square term", tol, (form, p),
        form=form, p=p, a=a, c=c, theorem_rhs=theorem_rhs,
        theorem_pass=bool(lhs <= theorem_rhs + tol * max(1.0, abs(theorem_rhs))),
    )


def mean_term(model: SequenceModel) -> float:
    """``sum_k [(lower E X_k)^- + (upper E X_k)^+]``."""
    up, lo = coordinate_upper(model), coordinate_lower(model)
    return float(np.sum(np.maximum(up, 0.0) + np.maximum(-lo, 0.0)))


def _orientation_factor(model: SequenceModel, p: float) -> float:
    # the recursion runs with X_k dependent-to-future; forward models go through the reversal
    return K.reversal_factor(p) if model.semantics == PENG_FORWARD else 1.0


def mz_verify(model: SequenceModel, p: float, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``E[max |S_k|^p] <= 3a + (3b)^p + (3c)^(p/2)`` with joint
    ``a = 2^(p+1) p^2 E[sum |X_k|^p]``, ``b = 2^(p-1) p M``,
    ``c = 2^(2p-1) p^2 E[(sum X_k^2)^(p/2)]^(2/p)``. No centering is assumed."""
    p = _check_p(p, 2.0)
    n = model.horizon
    lhs = eval_upper(model, partial_sum_max_abs(n).abs_power(p))
    sum_abs = eval_upper(model, sum_abs_power(n, p))
    e2 = eval_upper(model, sum_squares_power(n, p))
    m = mean_term(model)
    factor = _orientation_factor(model, p)
    proof_rhs = factor * K.mz_bound(p, sum_abs, m, e2)
    constant = factor * K.mz_constant(p)
    theorem_rhs = constant * (m**p + e2)
    return _report(
        "mz", model, lhs, proof_rhs, constant,
        "three-term closure 3a + (3b)^p + (3c)^(p/2); 2^p reversal factor under forward semantics", tol, (p,),
        p=p, mean_term=m, e2=e2, sum_abs_p=sum_abs, theorem_rhs=theorem_rhs,
        theorem_pass=bool(lhs <= theorem_rhs + tol * max(1.0, abs(theorem_rhs))),
    )


def sum_squares_verify(model: SequenceModel, p: float, tol: float = DEFAULT_TOL) -> InequalityReport:
    """Intermediate bound ``E[(sum X_k^2)^(p/2)] <= kappa S_p + lam S_2^(p/2)``."""
    p = _check_p(p, 2.0)
    lhs = eval_upper(model, sum_squares_power(model.horizon, p))
    s_p = coordinate_upper(model, lambda v: np.abs(v) ** p).sum()
    s_2 = coordinate_upper(model, np.square).sum()
    kappa, lam = K.sum_squares_coefficients(p)
    return _report(
        "sum_squares", model, lhs, kappa * s_p + lam * s_2 ** (p / 2.0), max(kappa, lam),
        "squares of positive and negative parts, recursion on p/2", tol, (p,), p=p, kappa=kappa, lam=lam,
    )


def rosenthal_general_verify(model: SequenceModel, p: float, tol: float = DEFAULT_TOL) -> InequalityReport:
    """``E[max |S_k|^p] <= alpha S_p + beta S_2^(p/2) + gamma M^p`` (no centering);
    the theorem form ``C_p (S_p + S_2^(p/2) + M^p)`` uses ``C_p = max(alpha, beta, gamma)``."""
    p = _check_p(p, 2.0)
    n = model.horizon
    lhs = eval_upper(model, partial_sum_max_abs(n).abs_power(p))
    s_p = coordinate_upper(model, lambda v: np.abs(v) ** p).sum()
    s_2 = coordinate_upper(model, np.square).sum()
    m = mean_term(model)
    alpha, beta, gamma = K.general_coefficients(p)
    factor = _orientation_factor(model, p)
    proof_rhs = factor * (alpha * s_p + beta * s_2 ** (p / 2.0) + gamma * m**p)
    constant = factor * max(alpha, beta, gamma)
    theorem_rhs = constant * (s_p + s_2 ** (p / 2.0) + m**p)
    return _report(
        "rosenthal_general", model, lhs, proof_rhs, constant,
        "three-term closure with the sum-of-squares bound substituted; 2^p reversal factor under forward semantics",
        tol, (p,), p=p, mean_term=m, alpha=alpha, beta=beta, gamma=gamma, theorem_rhs=theorem_rhs,
        theorem_pass=bool(lhs <= theorem_rhs + tol * max(1.0, abs(theorem_rhs))),
    )


def lower_rosenthal_verify(
    model: SequenceModel, p: float, form: str | None = None, centered: bool = False, tol: float = DEFAULT_TOL
) -> InequalityReport:
    """``lower E[|max S_k|^p] <= 2^(2-p) sum E|X_k|^p`` when ``lower E[X_k] <= 0``.

    Without ``centered`` the coordinates are shifted to zero lower mean.
    """
    p = _check_p(p, 1.0, 2.0)
    model = _prepare(model, centered, lower=True)
    form = _resolve_form(model, form, INDEP_FORMS, "Peng independence")
    lhs = eval_lower(model, sum_form(model.horizon, form).abs_power(p))
    c = 2.0 ** (2.0 - p)
    rhs = c * coordinate_upper(model, lambda v: np.abs(v) ** p).sum()
    return _report(
        "lower_rosenthal", model, lhs, rhs, c, "2^(2-p), lower expectation on the left", tol, (form, p), form=form, p=p,
    )


# scalar inequalities


def _rel_margin(lhs, rhs):
    return (rhs - lhs) / np.maximum(1.0, np.abs(rhs))


def _scalar_check(name: str, lhs, rhs, coords: dict, tol: float) -> CheckReport:
    lhs, rhs = np.broadcast_arrays(np.asarray(lhs, float), np.asarray(rhs, float))
    margin = _rel_margin(lhs, rhs)
    report = CheckReport(name, trials=int(margin.size))
    report.margin(float(margin.min()))
    for i in np.flatnonzero(margin < -tol)[:10]:
        report.fail({k: float(np.ravel(v)[i]) for k, v in coords.items()})
    return report


def low_p_elementary(x, y, p):
    """Left and right sides of ``|x+y|^p <= 2^(2-p)|x|^p + |y|^p + p x |y|^(p-1) sgn(y)``, 1 <= p <= 2."""
    return np.abs(x + y) ** p, 2.0 ** (2 - p) * np.abs(x) ** p + np.abs(y) ** p + p * x * np.abs(y) ** (p - 1) * np.sign(y)


def high_p_elementary(x, y, p):
    """Sides of ``|x+y|^p <= |y|^p + p x |y|^(p-1) sgn(y) + 2^p p^2 (|x|^p + x^2 |y|^(p-2))``, p >= 2."""
    rhs = np.abs(y) ** p + p * x * np.abs(y) ** (p - 1) * np.sign(y) + 2.0**p * p * p * (np.abs(x) ** p + x * x * np.abs(y) ** (p - 2))
    return np.abs(x + y) ** p, rhs


def scalar_inequality_suite(seed=0, trials: int = 10_000, tol: float = 1e-9) -> list[CheckReport]:
    """Each elementary inequality on a deterministic grid of 10^4 points plus ``trials`` random points."""
    rng = np.random.default_rng(seed)
    g = np.linspace(-5.0, 5.0, 25)
    gx, gy, gp = np.meshgrid(g, g, np.linspace(1.0, 2.0, 16), indexing="ij")
    rx, ry = rng.uniform(-10, 10, (2, trials))
    x, y = np.concatenate([gx.ravel(), rx]), np.concatenate([gy.ravel(), ry])
    p_low = np.concatenate([gp.ravel(), rng.uniform(1.0, 2.0, trials)])
    p_high = np.concatenate([2.0 + 4.0 * (gp.ravel() - 1.0), rng.uniform(2.0, 8.0, trials)])
    out = [
        _scalar_check("elementary_low_p", *low_p_elementary(x, y, p_low), {"x": x, "y": y, "p": p_low}, tol),
        _scalar_check("elementary_high_p", *high_p_elementary(x, y, p_high), {"x": x, "y": y, "p": p_high}, tol),
    ]
    t = np.concatenate([np.linspace(0.0, 0.5, 10_000), rng.uniform(0.0, 0.5, trials)])
    left = _scalar_check("exp_chain_left", np.exp(-t), 1 - t / 2, {"x": t}, tol)
    right = _scalar_check("exp_chain_right", 1 - t / 2, np.exp(-t / 2), {"x": t}, tol)
    chain = CheckReport("exponential_chain", trials=left.trials, failures=left.failures + right.failures)
    chain.margin(min(left.worst_margin, right.worst_margin))
    out.append(chain)
    return out
