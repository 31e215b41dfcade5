import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sublinear_lab import constants as K
from sublinear_lab.errors import BadExponent


def test_closure_examples():
    assert K.closure_constant(4, 1, 0, 1) == 12.0
    assert K.closure_constant(3, 0, 0, 0) == 0.0
    assert K.closure_constant(5, 2.5) == 7.5
    # the largest root of x = 1 + sqrt(x) sits far below the bound
    root = ((1 + math.sqrt(5)) / 2) ** 2
    assert root == pytest.approx(2.618, abs=1e-3) and root <= 12


def test_closure_rejects_small_p():
    with pytest.raises(BadExponent):
        K.closure_constant(2, 1, 1, 1)
    with pytest.raises(ValueError):
        K.closure_constant(3, -1, 0, 0)


@given(st.floats(2.01, 10), st.floats(0, 50), st.floats(0, 50), st.floats(0, 50))
def test_closure_sound(p, a, b, c):
    assert K.closure_violations(p, a, b, c, points=501) == 0


@given(st.floats(2, 10), st.floats(0, 50), st.floats(0, 50))
def test_two_term_closure_sound(p, a, c):
    bound = K.closure_two_term(p, a, c)
    xs = np.linspace(0, 2 * bound, 501)
    feasible = xs <= a + c * xs ** (1 - 2 / p)
    assert not np.any(feasible & (xs > bound * (1 + 1e-12)))


@pytest.mark.parametrize("p", [2, 2.5, 3, 4, 5, 6, 8, 12, 16])
def test_derived_constants_admissible(p):
    for value in (K.nd_constant(p), K.indep_constant(p), K.mz_constant(p), K.general_constant(p)):
        assert math.isfinite(value) and value >= 1
    K.ConstantPolicy(p, *K.mz_coefficients(p), K.mz_constant(p), "mz")


def test_policy_invariant():
    with pytest.raises(ValueError):
        K.ConstantPolicy(2, 1, 1, 1, 0.5)
    with pytest.raises(ValueError):
        K.ConstantPolicy(2, 1, 1, 1, math.inf)


def test_theorem_forms_dominate_proof_forms():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p = rng.uniform(2, 6)
        t = rng.exponential(1, size=int(rng.integers(1, 6)))
        n = t.size
        h = K.high_moment_factor(p)
        proof = K.closure_two_term(p, h * t.sum(), h * np.sum(t[:-1] ** (2 / p)))
        assert proof <= K.nd_constant(p) * n ** (p / 2 - 1) * t.sum() * (1 + 1e-12)


def test_sum_squares_recursion_branches():
    k2, l2 = K.sum_squares_coefficients(4)
    assert (k2, l2) == (2.0**4, 2.0**3)
    k6, l6 = K.sum_squares_coefficients(6)
    a, b, g = K.general_coefficients(3)
    assert (k6, l6) == (2**3 * (a + b), 2**3 * (b + g))
