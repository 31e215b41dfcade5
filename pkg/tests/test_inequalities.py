import numpy as np
import pytest

from sublinear_lab import inequalities as I
from sublinear_lab.errors import BadExponent, HypothesisViolated
from sublinear_lab.expectation import upper_expect
from sublinear_lab.generators import random_model
from sublinear_lab.model import CredalSet, FiniteSpace, RandomVar, m0
from sublinear_lab.sequence import SequenceModel, eval_upper
from sublinear_lab.slln import truncate_f


def m0_model(n, s="peng-backward"):
    p, x = m0()
    return SequenceModel.iid(p, x, n, s)


def point_model(value, n=2, s="peng-backward"):
    space = FiniteSpace.of("a", "b")
    p = CredalSet.from_weights(space, [[1.0, 0.0]])
    return SequenceModel.iid(p, RandomVar(space, [value, 9.0]), n, s)


def test_center_upper_examples():
    c = I.center_upper(m0_model(1))
    assert c.values[0] == pytest.approx([-1.2, 0.8])
    assert np.array_equal(I.center_upper(c).values, c.values)
    assert I.center_upper(point_model(3.0)).values[0, 0] == 0.0


def test_center_lower():
    c = I.center_lower(m0_model(2))
    assert c.values[0] == pytest.approx([-0.8, 1.2])
    assert I.coordinate_lower(c) == pytest.approx([0, 0], abs=1e-12)


def test_kolmogorov_m0():
    rep = I.kolmogorov_verify(m0_model(2))
    assert rep.lhs == pytest.approx(1.408, abs=1e-9)
    assert rep.rhs == pytest.approx(2.24, abs=1e-9)
    assert rep.passed and rep.slack > 0


def test_kolmogorov_n1_and_hypothesis():
    rep = I.kolmogorov_verify(m0_model(1))
    assert rep.passed
    with pytest.raises(HypothesisViolated):
        I.kolmogorov_verify(m0_model(2), centered=True)


def test_kolmogorov_running_max_monotone_in_horizon():
    # with S_0 = 0 in the running max the integrand grows pointwise with n
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = I.center_upper(random_model(rng, "peng-backward", max_horizon=1))
        vals = [upper_expect_seq(m.with_horizon(n)) for n in range(1, 6)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def upper_expect_seq(m):
    return eval_upper(m, I.sum_form(m.horizon, "partial").pos().abs_power(2.0))


def test_kolmogorov_lhs_without_s0_can_shrink():
    # all partial sums negative: (max S_k)^2 falls from 1 to 0.0625 when a +0.75 step is appended
    space = FiniteSpace.of("a")
    p = CredalSet.from_weights(space, [[1.0]])
    one = SequenceModel.iid(p, RandomVar(space, [-1.0]), 1, "peng-backward")
    two = one.with_horizon(2).mapped(lambda v: np.array([[-1.0], [0.75]]))
    f1 = I.sum_form(1, "partial").abs_power(2.0)
    f2 = I.sum_form(2, "partial").abs_power(2.0)
    assert eval_upper(one, f1) == 1.0 and eval_upper(two, f2) == pytest.approx(0.0625)


def test_low_p_examples():
    assert I.rosenthal_low_p_verify(m0_model(2), 2.0).constant == 1.0
    assert I.rosenthal_low_p_verify(m0_model(2), 1.0).constant == 2.0
    rep = I.rosenthal_low_p_verify(m0_model(2), 1.5)
    assert rep.passed and rep.slack > 0
    for bad in (0.5, 2.5):
        with pytest.raises(BadExponent):
            I.rosenthal_low_p_verify(m0_model(2), bad)


def test_forms_follow_semantics():
    with pytest.raises(HypothesisViolated):
        I.rosenthal_low_p_verify(m0_model(2, "peng-forward"), 1.5, form="partial")
    with pytest.raises(HypothesisViolated):
        I.rosenthal_low_p_verify(m0_model(2, "peng-backward"), 1.5, form="reverse")
    for form in I.FORMS:
        assert I.rosenthal_low_p_verify(m0_model(3, "qwise"), 1.5, form=form).passed


def test_nd_pge2_examples():
    rep = I.rosenthal_nd_pge2_verify(m0_model(3), 3.0)
    assert rep.passed and rep.details["theorem_pass"]
    assert rep.details["theorem_rhs"] >= rep.rhs
    assert I.rosenthal_nd_pge2_verify(point_model(0.0, 1), 2.0).passed
    with pytest.raises(BadExponent):
        I.rosenthal_nd_pge2_verify(m0_model(2), 1.5)


def test_indep_both_orientations():
    assert I.rosenthal_indep_pge2_verify(m0_model(3, "peng-backward"), 4.0).passed
    assert I.rosenthal_indep_pge2_verify(m0_model(3, "peng-forward"), 4.0).passed
    assert I.rosenthal_indep_pge2_verify(m0_model(4, "peng-forward"), 2.5).passed
    with pytest.raises(HypothesisViolated):
        I.rosenthal_indep_pge2_verify(m0_model(2, "qwise"), 3.0)


def test_general_examples():
    c = I.center_upper(m0_model(3))
    # lower mean of the centered variable is -0.4, so the mean term is 3 * 0.4
    assert I.mean_term(c) == pytest.approx(1.2)
    rep = I.rosenthal_general_verify(c, 2.0)
    assert rep.passed
    zero = I.rosenthal_general_verify(point_model(0.0), 3.0)
    assert zero.lhs == 0.0 and zero.rhs == 0.0 and zero.passed
    assert I.rosenthal_general_verify(m0_model(2, "peng-forward"), 2.0).passed


def test_mz_examples():
    space = FiniteSpace.of("a", "b")
    single = CredalSet.from_weights(space, [[0.3, 0.7]])
    nonneg = SequenceModel.iid(single, RandomVar(space, [0.0, 2.0]), 1, "peng-backward")
    rep = I.mz_verify(nonneg, 3.0)
    assert rep.lhs == pytest.approx(upper_expect(single, RandomVar(space, [0.0, 8.0])))
    assert rep.passed
    zero = I.mz_verify(point_model(0.0), 2.0)
    assert zero.lhs == 0.0 and zero.rhs == 0.0
    assert I.mz_verify(m0_model(2), 2.0).passed


def test_lower_rosenthal_examples():
    assert I.lower_rosenthal_verify(m0_model(1), 2.0).passed
    assert I.lower_rosenthal_verify(m0_model(2), 1.5).passed
    assert I.lower_rosenthal_verify(m0_model(2, "peng-forward"), 1.0).constant == 2.0
    with pytest.raises(HypothesisViolated):
        I.lower_rosenthal_verify(m0_model(2, "qwise"), 1.5)
    with pytest.raises(HypothesisViolated):
        I.lower_rosenthal_verify(I.center_lower(m0_model(2)).shifted(0.1), 1.5, centered=True)


def test_truncated_coordinates():
    # per-coordinate truncation levels break identical distribution and centering
    rng = np.random.default_rng(9)
    for _ in range(30):
        m = random_model(rng, "peng-backward", max_horizon=4)
        levels = rng.uniform(0.2, 3.0, m.horizon)
        t = m.mapped(lambda v: np.stack([truncate_f(row, c) for row, c in zip(v, levels)]))
        for check in (
            I.kolmogorov_verify(t),
            I.rosenthal_nd_pge2_verify(t, 3.0),
            I.rosenthal_indep_pge2_verify(t, 2.5),
            I.rosenthal_general_verify(t, 3.0),
            I.mz_verify(t, 4.0),
            I.lower_rosenthal_verify(t, 1.25),
        ):
            assert check.passed, check.line()


def test_random_models_all_theorems():
    rng = np.random.default_rng(12)
    for i in range(60):
        s = ("peng-forward", "peng-backward", "qwise")[i % 3]
        m = random_model(rng, s, max_horizon=4)
        reps = [I.rosenthal_general_verify(m, 2.5), I.mz_verify(m, 3.0), I.sum_squares_verify(m, 6.0)]
        reps.append(I.rosenthal_nd_pge2_verify(m, 4.0))
        for r in reps:
            assert r.passed and r.details.get("theorem_pass", True), r.line()


def test_scalar_examples():
    lhs, rhs = I.low_p_elementary(1.0, 1.0, 1.5)
    assert lhs == pytest.approx(2**1.5) and rhs == pytest.approx(2**0.5 + 1 + 1.5)
    assert np.exp(-0.5) == pytest.approx(0.6065, abs=1e-4) and np.exp(-0.25) == pytest.approx(0.7788, abs=1e-4)
    lhs, rhs = I.low_p_elementary(0.0, 0.0, 1.2)
    assert lhs == rhs == 0.0


def test_scalar_suite():
    reports = I.scalar_inequality_suite(seed=1, trials=2000)
    assert [r.name for r in reports] == ["elementary_low_p", "elementary_high_p", "exponential_chain"]
    assert all(r.passed for r in reports)
