"""Finite sample spaces, measures, random variables, credal sets and events.

Every sigma-field here is the full power set and every real function on the
space counts as a random variable; on a finite space the local-Lipschitz
membership conditions are vacuous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    LengthMismatch,
    ModelError,
    NegativeWeight,
    NotNormalized,
    SpaceMismatch,
)

NORMALIZATION_TOL = 1e-12


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FiniteSpace:
    outcome_labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(label) for label in self.outcome_labels)
        if not labels:
            raise ModelError("a finite space needs at least one outcome")
        if len(set(labels)) != len(labels):
            raise ModelError(f"outcome labels must be distinct: {labels}")
        object.__setattr__(self, "outcome_labels", labels)

    @property
    def size(self) -> int:
        return len(self.outcome_labels)

    def index(self, label: str) -> int:
        return self.outcome_labels.index(str(label))

    @classmethod
    def of(cls, *labels) -> "FiniteSpace":
        return cls(tuple(str(label) for label in labels))

    @classmethod
    def range(cls, size: int) -> "FiniteSpace":
        return cls(tuple(f"w{i}" for i in range(size)))


def _check_length(space: FiniteSpace, values: np.ndarray) -> None:
    if values.ndim != 1 or values.shape[0] != space.size:
        raise LengthMismatch(
            f"expected {space.size} entries for space {space.outcome_labels}, got shape {values.shape}"
        )


@dataclass(frozen=True, eq=False)
class Measure:
    space: FiniteSpace
    weights: np.ndarray

    def __post_init__(self):
        w = _frozen_array(self.weights)
        _check_length(self.space, w)
        if not np.all(np.isfinite(w)):
            raise ModelError("measure weights must be finite")
        if np.any(w < 0):
            raise NegativeWeight(f"negative weight in {w.tolist()}")
        total = float(w.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"weights sum to {total!r}, not 1")
        object.__setattr__(self, "weights", w)

    def __eq__(self, other):
        return (
            isinstance(other, Measure)
            and self.space == other.space
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.space, self.weights.tobytes()))

    def __repr__(self):
        return f"Measure({self.weights.tolist()})"


def make_measure(space: FiniteSpace, weights: Sequence[float]) -> Measure:
    """Validate ``weights`` against ``space``; no renormalization is applied."""
    return Measure(space, np.asarray(weights, dtype=float))


def point_mass(space: FiniteSpace, label) -> Measure:
    w = np.zeros(space.size)
    w[space.index(label)] = 1.0
    return Measure(space, w)


@dataclass(frozen=True, eq=False)
class RandomVar:
    space: FiniteSpace
    values: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.values)
        _check_length(self.space, v)
        if not np.all(np.isfinite(v)):
            raise ModelError("random variable values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, space: FiniteSpace, c: float) -> "RandomVar":
        return cls(space, np.full(space.size, float(c)))

    def map(self, fn) -> "RandomVar":
        return RandomVar(self.space, fn(self.values))

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, RandomVar):
            if other.space != self.space:
                raise SpaceMismatch("random variables live on different spaces")
            return other.values
        return np.asarray(other, dtype=float)

    def __add__(self, other):
        return RandomVar(self.space, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RandomVar(self.space, self.values - self._coerce(other))

    def __rsub__(self, other):
        return RandomVar(self.space, self._coerce(other) - self.values)

    def __mul__(self, other):
        return RandomVar(self.space, self.values * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return RandomVar(self.space, -self.values)

    def __abs__(self):
        return RandomVar(self.space, np.abs(self.values))

    def __pow__(self, p):
        return RandomVar(self.space, self.values**p)

    def __eq__(self, other):
        return (
            isinstance(other, RandomVar)
            and self.space == other.space
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.space, self.values.tobytes()))

    def __repr__(self):
        return f"RandomVar({self.values.tolist()})"


@dataclass(frozen=True, eq=False)
class CredalSet:
    """A finite family of measures given by its vertex list."""

    space: FiniteSpace
    vertices: tuple[Measure, ...]
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        verts = tuple(self.vertices)
        if not verts:
            raise ModelError("a credal set needs at least one vertex")
        for q in verts:
            if q.space != self.space:
                raise SpaceMismatch("all vertices must share the credal set's space")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "matrix", _frozen_array([q.weights for q in verts]))

    @classmethod
    def from_weights(cls, space: FiniteSpace, rows) -> "CredalSet":
        return cls(space, tuple(make_measure(space, row) for row in rows))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def duplicate_vertices(self) -> list[tuple[int, int]]:
        """Pairs ``(i, j)``, ``i < j``, of vertices with identical weights."""
        dups = []
        for j in range(self.n_vertices):
            for i in range(j):
                if np.array_equal(self.matrix[i], self.matrix[j]):
                    dups.append((i, j))
                    break
        return dups

    def normalized(self) -> "CredalSet":
        """Drop repeated vertices, keeping the first occurrence."""
        dropped = {j for _, j in self.duplicate_vertices()}
        keep = tuple(q for k, q in enumerate(self.vertices) if k not in dropped)
        return CredalSet(self.space, keep)

    def __eq__(self, other):
        return (
            isinstance(other, CredalSet)
            and self.space == other.space
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.space, self.matrix.tobytes()))

    def __repr__(self):
        return f"CredalSet({self.matrix.tolist()})"


@dataclass(frozen=True, eq=False)
class EventSet:
    space: FiniteSpace
    membership: np.ndarray

    def __post_init__(self):
        m = _frozen_array(self.membership, dtype=bool)
        _check_length(self.space, m)
        object.__setattr__(self, "membership", m)

    @classmethod
    def of(cls, space: FiniteSpace, labels) -> "EventSet":
        m = np.zeros(space.size, dtype=bool)
        for label in labels:
            m[space.index(label)] = True
        return cls(space, m)

    @classmethod
    def everything(cls, space: FiniteSpace) -> "EventSet":
        return cls(space, np.ones(space.size, dtype=bool))

    @classmethod
    def empty(cls, space: FiniteSpace) -> "EventSet":
        return cls(space, np.zeros(space.size, dtype=bool))

    @classmethod
    def from_mask(cls, space: FiniteSpace, mask: int) -> "EventSet":
        """Event whose i-th outcome is included iff bit i of ``mask`` is set."""
        return cls(space, np.array([(mask >> i) & 1 for i in range(space.size)], dtype=bool))

    def indicator(self) -> RandomVar:
        return RandomVar(self.space, self.membership.astype(float))

    def __eq__(self, other):
        return (
            isinstance(other, EventSet)
            and self.space == other.space
            and np.array_equal(self.membership, other.membership)
        )

    def __hash__(self):
        return hash((self.space, self.membership.tobytes()))

    def __repr__(self):
        labels = [l for l, m in zip(self.space.outcome_labels, self.membership) if m]
        return f"EventSet({labels})"


def linear_expect(q: Measure, x: RandomVar) -> float:
    if q.space != x.space:
        raise SpaceMismatch("measure and random variable live on different spaces")
    return float(np.dot(q.weights, x.values))


def complement(a: EventSet) -> EventSet:
    return EventSet(a.space, ~a.membership)


def check_same_space(p: CredalSet, x) -> None:
    if p.space != x.space:
        raise SpaceMismatch("credal set and argument live on different spaces")


def m0() -> tuple[CredalSet, RandomVar]:
    """The two-point reference model: outcomes -1/+1, P(+1) in {0.4, 0.6}, X(w) = w."""
    space = FiniteSpace.of("-1", "+1")
    p = CredalSet.from_weights(space, [[0.6, 0.4], [0.4, 0.6]])
    return p, RandomVar(space, [-1.0, 1.0])
