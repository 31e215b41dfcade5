"""Random admissible instances for property tests and verification suites."""

from __future__ import annotations

import numpy as np

from .model import CredalSet, FiniteSpace, RandomVar
from .sequence import SequenceModel


def derive_seeds(master: int, count: int) -> list[int]:
    """Per-trial 64-bit seeds: the first word of each child of ``SeedSequence(master)``."""
    children = np.random.SeedSequence(master).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def random_space(rng: np.random.Generator, min_outcomes: int = 1, max_outcomes: int = 6) -> FiniteSpace:
    return FiniteSpace.range(int(rng.integers(min_outcomes, max_outcomes + 1)))


def random_credal_set(
    rng: np.random.Generator,
    space: FiniteSpace | None = None,
    max_vertices: int = 6,
    max_outcomes: int = 6,
    sparse: float = 0.2,
) -> CredalSet:
    """Dirichlet vertices, some with zeroed entries so boundary measures occur."""
    space = space or random_space(rng, max_outcomes=max_outcomes)
    k = int(rng.integers(1, max_vertices + 1))
    rows = []
    for _ in range(k):
        w = rng.dirichlet(np.full(space.size, rng.uniform(0.3, 3.0)))
        if space.size > 1 and rng.random() < sparse:
            w[rng.integers(space.size)] = 0.0
            w = w / w.sum() if w.sum() > 0 else np.full(space.size, 1.0 / space.size)
        rows.append(w)
    rows = np.array(rows)
    rows[:, -1] = 1.0 - rows[:, :-1].sum(axis=1)
    rows = np.clip(rows, 0.0, None)
    rows /= rows.sum(axis=1, keepdims=True)
    return CredalSet.from_weights(space, rows)


def random_values(rng: np.random.Generator, size: int, scale: float = 2.0, integer: bool = False) -> np.ndarray:
    if integer:
        return rng.integers(-3, 4, size).astype(float)
    return np.round(rng.normal(0.0, scale, size), 6)


def random_variable(rng: np.random.Generator, space: FiniteSpace, **kw) -> RandomVar:
    return RandomVar(space, random_values(rng, space.size, **kw))


def random_model(
    rng: np.random.Generator,
    semantics: str,
    max_horizon: int = 4,
    max_outcomes: int = 3,
    max_vertices: int = 3,
    min_horizon: int = 1,
    budget: int = 10**5,
) -> SequenceModel:
    """An identically distributed sequence model whose joint tensor fits in ``budget``."""
    space = random_space(rng, max_outcomes=max_outcomes)
    marginal = random_credal_set(rng, space, max_vertices=max_vertices)
    x = random_variable(rng, space, integer=bool(rng.random() < 0.3))
    n = int(rng.integers(min_horizon, max_horizon + 1))
    while n > 1 and space.size**n > budget:
        n -= 1
    return SequenceModel.iid(marginal, x, n, semantics)
