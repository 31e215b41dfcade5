import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sublinear_lab.errors import ArityMismatch, BudgetExceeded, ModelError, PreconditionViolated
from sublinear_lab.functional import (
    Functional,
    coordinate,
    generate_monotone_functional,
    is_monotone_on_grid,
    lookup,
    partial_sum_max,
    product,
    reverse_sum_max,
    total_sum,
)
from sublinear_lab.generators import random_model
from sublinear_lab.model import CredalSet, FiniteSpace, RandomVar, m0
from sublinear_lab.sequence import (
    SequenceModel,
    eval_lower,
    eval_upper,
    identical_distribution_check,
    joint_tensor,
    nd_check,
)

X1X2 = product(coordinate(2, 0), coordinate(2, 1))


def model(n=2, semantics="peng-forward"):
    p, x = m0()
    return SequenceModel.iid(p, x, n, semantics)


@pytest.mark.parametrize("semantics,value", [("peng-forward", 0.2), ("peng-backward", 0.2), ("qwise", 0.04)])
def test_product_examples(semantics, value):
    assert eval_upper(model(2, semantics), X1X2) == pytest.approx(value, abs=1e-12)


def test_qwise_sum():
    assert eval_upper(model(3, "qwise"), total_sum(3)) == pytest.approx(0.6, abs=1e-12)


def test_horizon_one_matches_marginal():
    p, x = m0()
    f = coordinate(1, 0).abs_power(3).shift(-0.5)
    for s in ("peng-forward", "peng-backward", "qwise"):
        assert eval_upper(SequenceModel.iid(p, x, 1, s), f) == pytest.approx(0.5)


def test_row_major_layout():
    space = FiniteSpace.of("a", "b")
    p = CredalSet.from_weights(space, [[0.5, 0.5]])
    m = SequenceModel.iid(p, RandomVar(space, [1.0, 10.0]), 2)
    t = joint_tensor(m, Functional(2, lambda c: c[0] * 100 + c[1]))
    assert t.tolist() == [[101.0, 110.0], [1001.0, 1010.0]]


def test_budget_and_arity():
    p, x = m0()
    with pytest.raises(BudgetExceeded):
        SequenceModel.iid(p, x, 30)
    with pytest.raises(ArityMismatch):
        eval_upper(model(2), total_sum(3))
    with pytest.raises(ModelError):
        SequenceModel.iid(p, x, 2, "bogus")


def test_peng_dominates_qwise():
    rng = np.random.default_rng(4)
    for _ in range(50):
        m = random_model(rng, "qwise", max_horizon=3)
        f = generate_monotone_functional(int(rng.integers(1 << 30)), m.horizon).scale(rng.choice([-1, 1]))
        q = eval_upper(m, f)
        for s in ("peng-forward", "peng-backward"):
            assert eval_upper(m.with_semantics(s), f) >= q - 1e-12


def test_lower_le_upper():
    rng = np.random.default_rng(5)
    for _ in range(30):
        m = random_model(rng, ("peng-forward", "peng-backward", "qwise")[rng.integers(3)])
        f = partial_sum_max(m.horizon)
        assert eval_lower(m, f) <= eval_upper(m, f) + 1e-12


def test_reversal_swaps_orientation():
    rng = np.random.default_rng(6)
    for _ in range(30):
        m = random_model(rng, "peng-forward", max_horizon=4)
        f = partial_sum_max(m.horizon)
        assert eval_upper(m, reverse_sum_max(m.horizon)) == pytest.approx(eval_upper(m.reversed(), f), abs=1e-12)


def test_identical_distribution():
    rep = identical_distribution_check(model(3, "peng-backward"), [np.square, ("cube", lambda v: v**3), np.abs])
    assert rep.passed and rep.trials == 9


def test_identical_distribution_detects_distinct_rows():
    p, x = m0()
    m = SequenceModel(p, np.array([[-1.0, 1.0], [-2.0, 2.0]]))
    assert not identical_distribution_check(m, [np.square]).passed


def test_nd_check_m0_qwise():
    m = model(2, "qwise")
    x = coordinate(1, 0)
    rep = nd_check(m, 1, x.shift(1.0), x.shift(1.0))
    assert rep.passed and rep.details["orientation"] == "later-to-earlier"


def test_nd_check_preconditions():
    m = model(2, "peng-forward")
    x = coordinate(1, 0)
    with pytest.raises(PreconditionViolated):
        nd_check(m, 1, x, x.shift(1.0))  # phi1 takes negative values
    with pytest.raises(PreconditionViolated):
        nd_check(m, 1, x.shift(1.0), (-x).shift(-2.0))  # E[phi2] < 0
    with pytest.raises(PreconditionViolated):
        nd_check(m, 1, x.shift(1.0), (-x).shift(2.0))  # opposite monotonicity
    # backward: the later block must be the nonnegative factor
    mb = model(2, "peng-backward")
    assert nd_check(mb, 1, x.shift(0.5), x.shift(1.0)).details["orientation"] == "earlier-to-later"


@given(st.integers(0, 2**31), st.sampled_from(["nondecreasing", "nonincreasing"]))
def test_generated_functionals_are_monotone(seed, direction):
    f = generate_monotone_functional(seed, 2, direction)
    grid = [np.linspace(-4, 4, 9)] * 2
    assert is_monotone_on_grid(f, grid, direction)
    assert np.all(f.grid(grid) >= 0)


def test_lookup_rejects_off_grid():
    f = lookup([[0.0, 1.0]], [5.0, 7.0])
    assert f.at([1.0]) == 7.0
    with pytest.raises(KeyError):
        f.at([0.5])
