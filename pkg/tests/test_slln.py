import json
import math

import numpy as np
import pytest

from sublinear_lab import slln as S
from sublinear_lab.errors import BadEpsilon
from sublinear_lab.model import CredalSet, FiniteSpace, RandomVar, m0

UP = 1  # vertex with P(+1) = 0.6


def test_truncation_examples():
    assert S.truncate_f(3.0, 2) == 2.0
    assert S.truncate_f(-3.0, 2) == -2.0
    assert S.truncate_f(1.5, 2) == 1.5 and S.f_hat(1.5, 2) == 0.0
    assert S.f_hat(5.0, 2) == 3.0
    with pytest.raises(ValueError):
        S.truncate_f(1.0, -1)


def test_smooth_indicator_examples():
    assert S.smooth_indicator_g(1.0, 0.5) == 1.0
    assert S.smooth_indicator_g(0.5, 0.5) == 0.0
    assert S.smooth_indicator_g(0.75, 0.5) == pytest.approx(0.5, abs=1e-15)
    for eps in (0.0, 1.0, -0.1):
        with pytest.raises(BadEpsilon):
            S.smooth_indicator_g(0.9, eps)


def test_smooth_indicator_sandwich():
    xs = np.linspace(-1, 3, 4001)
    for eps in (0.01, 0.3, 0.9):
        g = S.smooth_indicator_g(xs, eps)
        assert np.all((xs >= 1) <= g) and np.all(g <= (xs > 1 - eps))


def test_fixed_vertex_converges():
    p, x = m0()
    t = S.simulate(p, x, S.SelectionPolicy.fixed(UP), 100_000, seed=11)
    assert abs(t.running_means[-1] - 0.2) < 0.02
    assert -0.22 <= t.tail_min and t.tail_max <= 0.22


def test_point_mass_exact():
    space = FiniteSpace.of("a", "b")
    p = CredalSet.from_weights(space, [[0.0, 1.0]])
    x = RandomVar(space, [4.0, 0.3])
    t = S.simulate(p, x, S.SelectionPolicy.iid(), 5000, seed=1, keep_path=True)
    assert np.all(t.path == 0.3)
    assert S.band_report(t, p, x, 0.0).passed
    est = S.cluster_check(t.path, p, x)
    assert est.coverage == 1.0 and est.interval == (0.3, 0.3)


def test_schedule_matches_fixed():
    p, x = m0()
    a = S.simulate(p, x, S.SelectionPolicy.from_schedule([0]), 3000, seed=5)
    b = S.simulate(p, x, S.SelectionPolicy.fixed(0), 3000, seed=5)
    assert np.array_equal(a.running_means, b.running_means)
    assert a.csv_text() == b.csv_text()


def test_determinism_and_metadata():
    p, x = m0()
    pol = S.parse_policy("greedy:0.2")
    a = S.simulate(p, x, pol, 2000, seed=99)
    b = S.simulate(p, x, pol, 2000, seed=99)
    assert a.csv_text() == b.csv_text()
    meta = a.metadata()
    assert list(meta) == ["format_version", "seed", "policy", "n", "prng", "marginal_fingerprint"]
    assert meta["prng"].startswith("PCG64") and json.loads(json.dumps(meta)) == meta
    assert a.csv_text().splitlines()[0] == "step,running_mean,vertex_index"


def test_checkpoints():
    cps = S.checkpoints(100_000)
    assert cps[0] == 1 and cps[-1] == 100_000 and np.all(np.diff(cps) > 0)
    assert len(cps) < 1300
    assert list(S.checkpoints(1)) == [1]


def test_policy_text_roundtrip():
    for text in ("fixed:1", "iid", "periodic:100:1", "periodic:1:2", "greedy:0.2", "schedule:0,1,1"):
        assert S.parse_policy(S.parse_policy(text).spec()) == S.parse_policy(text)
    assert S.parse_policy("doubling") == S.SelectionPolicy.periodic(1, 2.0)
    for bad in ("fixed", "periodic:0", "random", "schedule:", "iid:3"):
        with pytest.raises(ValueError):
            S.parse_policy(bad)
    p, _ = m0()
    with pytest.raises(ValueError):
        S.SelectionPolicy.fixed(2).validate(p)


def test_block_lengths_double():
    v = S._block_vertices(15, 1, 2.0, 1, 0)
    assert v.tolist() == [1, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0]


def test_greedy_tracks_upper_mean():
    p, x = m0()
    t = S.simulate(p, x, S.SelectionPolicy.greedy(0.2), 100_000, seed=3)
    assert abs(t.running_means[-1] - 0.2) < 0.02


def test_band_check_flags_excursions():
    p, x = m0()
    trajs = S.run_trajectories(p, x, [S.SelectionPolicy.fixed(UP)], 20_000, [1, 2, 3])
    assert S.slln_band_check(trajs, p, x, 0.02).passed
    # pretend the upper mean were 0: the +0.2 trajectories leave the band
    shifted = RandomVar(x.space, x.values - 0.2)
    assert not S.slln_band_check(trajs, p, shifted, 0.02).passed
    with pytest.raises(ValueError):
        S.slln_band_check([], p, x, 0.02)


def test_workers_do_not_change_output():
    p, x = m0()
    pols = [S.SelectionPolicy.iid(), S.SelectionPolicy.periodic(50)]
    a = S.run_trajectories(p, x, pols, 5000, [4, 5, 6], workers=1)
    b = S.run_trajectories(p, x, pols, 5000, [4, 5, 6], workers=4)
    assert [t.csv_text() for t in a] == [t.csv_text() for t in b]


def test_cluster_monotone_on_prefixes():
    p, x = m0()
    t = S.simulate(p, x, S.SelectionPolicy.doubling(), 200_000, seed=8, keep_path=True)
    covs = [S.cluster_check(t.path[:k], p, x).coverage for k in (5_000, 20_000, 50_000, 100_000, 200_000)]
    assert all(b >= a for a, b in zip(covs, covs[1:]))


def test_cluster_fixed_vertex_low_coverage():
    p, x = m0()
    t = S.simulate(p, x, S.SelectionPolicy.fixed(UP), 100_000, seed=2, keep_path=True)
    est = S.cluster_check(t.path, p, x)
    assert est.coverage <= 0.25 and est.n_bins == 8


def test_choquet_moment_condition():
    p, x = m0()
    r = S.choquet_moment_condition(p, x)
    assert r.passed and r.details["choquet_abs"] == pytest.approx(1.0)
    space = FiniteSpace.range(4)
    q = CredalSet.from_weights(space, [[0.25] * 4, [0.7, 0.1, 0.1, 0.1]])
    r = S.choquet_moment_condition(q, RandomVar(space, [0.0, 1.0, 2.0, 5.0]))
    assert r.passed and r.constant == 5.0
    zero = S.choquet_moment_condition(p, RandomVar(x.space, [0.0, 0.0]))
    assert zero.details["choquet_abs"] == 0.0


def test_write_trajectory(tmp_path):
    p, x = m0()
    t = S.simulate(p, x, S.SelectionPolicy.iid(), 500, seed=0)
    S.write_trajectory(t, tmp_path / "t.csv", tmp_path / "t.json")
    rows = (tmp_path / "t.csv").read_text().splitlines()
    assert len(rows) == len(t.checkpoints) + 1
    k, m, v = rows[-1].split(",")
    assert int(k) == 500 and math.isclose(float(m), t.running_means[-1]) and int(v) in (0, 1)
