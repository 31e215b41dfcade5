"""Named verification suites: randomized trials producing :class:`InequalityReport` rows.

Each suite turns the master seed into its own base seed (a SeedSequence over
the master seed and a hash of the suite name); trial ``i`` then draws its
instance from ``default_rng(derive_seeds(base, trials)[i])``. Output depends only
on ``(suite, trials, master seed, model)``, never on the number of worker threads.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import inequalities as ineq
from .capacity import CapacityView, choquet, choquet_vs_riemann, tail_sum_bound, mean_choquet_domination
from .expectation import factorization_check, holder_check
from .generators import derive_seeds, random_credal_set, random_model, random_space, random_variable
from .oracle import oracle_choquet
from .reports import DEFAULT_TOL, InequalityReport, equality_report, fingerprint
from .sequence import PENG_BACKWARD, PENG_FORWARD, QWISE, SEMANTICS, SequenceModel

LOW_P = (1.0, 1.25, 1.5, 2.0)
HIGH_P = (2.0, 2.5, 3.0, 4.0)
GENERAL_P = (2.0, 2.5, 3.0, 4.0, 6.0)


@dataclass(frozen=True)
class SuiteConfig:
    trials: int = 200
    seed: int = 0
    tol: float = DEFAULT_TOL
    workers: int = 1
    max_horizon: int = 5


@dataclass(frozen=True)
class Trial:
    rng: np.random.Generator
    seed: int
    doc: object  # ModelDoc or None
    cfg: SuiteConfig

    def choice(self, options):
        return options[int(self.rng.integers(len(options)))]

    def model(self, semantics_options=SEMANTICS, min_horizon: int = 1) -> SequenceModel:
        semantics = self.choice(semantics_options)
        if self.doc is None:
            return random_model(self.rng, semantics, max_horizon=self.cfg.max_horizon, min_horizon=min_horizon)
        n = int(self.rng.integers(min_horizon, self.cfg.max_horizon + 1))
        while n > 1 and self.doc.marginal.space.size**n > 10**5:
            n -= 1
        return SequenceModel.iid(self.doc.marginal, self.doc.x, n, semantics)

    def marginal(self):
        if self.doc is None:
            space = random_space(self.rng, max_outcomes=5)
            return random_credal_set(self.rng, space, max_vertices=5), random_variable(self.rng, space)
        return self.doc.marginal, self.doc.x


def _form(trial: Trial, model: SequenceModel, table: dict) -> str:
    return trial.choice(table[model.semantics])


def _kolmogorov(t: Trial):
    m = t.model((PENG_BACKWARD, QWISE))
    return [ineq.kolmogorov_verify(m, form=_form(t, m, ineq.ND_FORMS), tol=t.cfg.tol)]


def _low_p(t: Trial):
    m = t.model()
    return [ineq.rosenthal_low_p_verify(m, t.choice(LOW_P), _form(t, m, ineq.ND_FORMS), tol=t.cfg.tol)]


def _nd_pge2(t: Trial):
    m = t.model()
    return [ineq.rosenthal_nd_pge2_verify(m, t.choice(HIGH_P), _form(t, m, ineq.ND_FORMS), tol=t.cfg.tol)]


def _indep_pge2(t: Trial):
    m = t.model((PENG_FORWARD, PENG_BACKWARD))
    return [ineq.rosenthal_indep_pge2_verify(m, t.choice(HIGH_P), _form(t, m, ineq.INDEP_FORMS), tol=t.cfg.tol)]


def _general(t: Trial):
    return [ineq.rosenthal_general_verify(t.model(), t.choice(GENERAL_P), tol=t.cfg.tol)]


def _mz(t: Trial):
    return [ineq.mz_verify(t.model(), t.choice(GENERAL_P), tol=t.cfg.tol)]


def _sum_squares(t: Trial):
    return [ineq.sum_squares_verify(t.model(), t.choice(GENERAL_P + (9.0,)), tol=t.cfg.tol)]


def _lower(t: Trial):
    m = t.model((PENG_FORWARD, PENG_BACKWARD))
    return [ineq.lower_rosenthal_verify(m, t.choice(LOW_P), _form(t, m, ineq.INDEP_FORMS), tol=t.cfg.tol)]


def _holder(t: Trial):
    p, x = t.marginal()
    y = random_variable(t.rng, p.space)
    return [holder_check(p, x, y, t.choice((1.5, 2.0, 3.0)), tol=t.cfg.tol)]


def _factorization(t: Trial):
    m = t.model((PENG_FORWARD, PENG_BACKWARD)).with_horizon(2)
    return factorization_check(m, shift=-float(m.values.min()) + float(t.rng.uniform(0, 1)))


def _choquet(t: Trial):
    p, x = t.marginal()
    out = []
    for mode in ("upper", "lower"):
        view = CapacityView(p, mode)
        out.append(
            equality_report(
                f"choquet_{mode}_vs_quadrature",
                choquet(view, x).value,
                oracle_choquet(view, x),
                tol=1e-10,
                fingerprint=fingerprint(p, x, mode),
                constant_provenance="level sum against adaptive quadrature",
            )
        )
    out.append(choquet_vs_riemann(CapacityView(p), x))
    return out


def _tail_bound(t: Trial):
    p, x = t.marginal()
    return [tail_sum_bound(p, x * float(t.rng.uniform(0.5, 20)), tol=t.cfg.tol), mean_choquet_domination(p, x, tol=t.cfg.tol)]


SUITES: dict[str, Callable[[Trial], list[InequalityReport]]] = {
    "kolmogorov": _kolmogorov,
    "rosenthal_low_p": _low_p,
    "rosenthal_nd_pge2": _nd_pge2,
    "rosenthal_indep_pge2": _indep_pge2,
    "rosenthal_general": _general,
    "mz": _mz,
    "lower_rosenthal": _lower,
    "sum_squares": _sum_squares,
    "holder": _holder,
    "factorization": _factorization,
    "choquet": _choquet,
    "tail_bound": _tail_bound,
}
GROUPS = {
    "rosenthal": ("rosenthal_low_p", "rosenthal_nd_pge2", "rosenthal_indep_pge2", "rosenthal_general", "mz", "lower_rosenthal"),
    "capacity": ("choquet", "tail_bound"),
    "all": tuple(SUITES),
}


def suite_names(name: str) -> tuple[str, ...]:
    if name in SUITES:
        return (name,)
    if name in GROUPS:
        return GROUPS[name]
    raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES) + sorted(GROUPS)}")


def run_suite(name: str, cfg: SuiteConfig = SuiteConfig(), doc=None) -> list[InequalityReport]:
    """All trials of every suite in ``name``, each report tagged with its trial seed."""
    jobs = []
    for sub in suite_names(name):
        # each suite gets its own seed stream so adding suites never shifts others
        base = int(np.random.SeedSequence([cfg.seed, _stable_id(sub)]).generate_state(1, dtype=np.uint64)[0])
        jobs += [(sub, s) for s in derive_seeds(base, cfg.trials)]

    def run(job):
        sub, s = job
        trial = Trial(np.random.default_rng(s), s, doc, cfg)
        return [replace(r, seed=s) for r in SUITES[sub](trial)]

    if cfg.workers <= 1:
        results = [run(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run, jobs))
    return [r for rs in results for r in rs]


def _stable_id(name: str) -> int:
    return int(hashlib.sha256(name.encode()).hexdigest()[:15], 16)
