import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sublinear_lab.model import CredalSet, FiniteSpace, RandomVar, m0

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def m0_pair():
    return m0()


@st.composite
def credal_sets(draw, max_outcomes=4, max_vertices=4):
    m = draw(st.integers(1, max_outcomes))
    k = draw(st.integers(1, max_vertices))
    raw = draw(
        st.lists(
            st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=m, max_size=m).filter(lambda r: sum(r) > 1e-3),
            min_size=k,
            max_size=k,
        )
    )
    rows = np.array(raw)
    rows = rows / rows.sum(axis=1, keepdims=True)
    rows[:, -1] = np.clip(1.0 - rows[:, :-1].sum(axis=1), 0.0, None)
    rows = rows / rows.sum(axis=1, keepdims=True)
    return CredalSet.from_weights(FiniteSpace.range(m), rows)


def variables(space, lo=-5.0, hi=5.0):
    return st.lists(st.floats(lo, hi, allow_nan=False), min_size=space.size, max_size=space.size).map(
        lambda v: RandomVar(space, v)
    )


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
