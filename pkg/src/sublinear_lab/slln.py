"""Running means of sequences sampled under measure-selection policies.

Each step a policy picks one vertex of the credal set, an outcome is drawn from
it by inverse CDF and the running mean ``S_k/k`` is updated. The draws use
numpy's PCG64 bit generator seeded with a 64-bit integer; outcome uniforms are
generated first (one per step) and any policy randomness afterwards, so the
outcome stream does not depend on the policy.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .capacity import CapacityView, choquet
from .errors import BadEpsilon
from .expectation import expectation_pair, upper_expect
from .model import CredalSet, RandomVar, check_same_space
from .reports import FORMAT_VERSION, CheckReport, InequalityReport, equality_report, fingerprint

PRNG = f"PCG64/numpy-{np.__version__}"

FIXED = "fixed"
IID = "iid"
PERIODIC = "periodic"
GREEDY = "greedy"
SCHEDULE = "schedule"
POLICY_KINDS = (FIXED, IID, PERIODIC, GREEDY, SCHEDULE)


def truncate_f(x, c: float):
    """``(-c) v (x ^ c)``."""
    if c < 0:
        raise ValueError("truncation level must be >= 0")
    return np.clip(x, -c, c)


def f_hat(x, c: float):
    """Truncation remainder ``x - f_c(x)``."""
    return np.asarray(x) - truncate_f(x, c)


def smooth_indicator_g(x, eps: float):
    """Smooth step from 0 at ``1 - eps`` to 1 at ``1``, so that
    ``1{x >= 1} <= g(x) <= 1{x > 1 - eps}``."""
    if not 0 < eps < 1:
        raise BadEpsilon(f"eps must lie in (0, 1), got {eps}")
    u = np.clip((np.asarray(x, dtype=float) - (1.0 - eps)) / eps, 0.0, 1.0)
    return (1.0 - np.cos(np.pi * u)) / 2.0


@dataclass(frozen=True)
class SelectionPolicy:
    """How the vertex for each step is chosen.

    ``periodic`` alternates between the upper-mean and lower-mean vertices in
    blocks; block ``j`` has length ``ceil(block_length * growth^j)``, so
    ``growth=1`` gives fixed blocks and ``growth=2`` doubling ones.
    """

    kind: str
    vertex: int = 0
    block_length: int = 1
    growth: float = 1.0
    target: float = 0.0
    schedule: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.block_length < 1:
            raise ValueError("block_length must be >= 1")
        if self.growth < 1:
            raise ValueError("growth must be >= 1")
        if self.kind == SCHEDULE and not self.schedule:
            raise ValueError("schedule must be nonempty")
        object.__setattr__(self, "schedule", tuple(int(i) for i in self.schedule))

    @classmethod
    def fixed(cls, i: int):
        return cls(FIXED, vertex=i)

    @classmethod
    def iid(cls):
        return cls(IID)

    @classmethod
    def periodic(cls, block_length: int = 1, growth: float = 1.0):
        return cls(PERIODIC, block_length=block_length, growth=growth)

    @classmethod
    def doubling(cls):
        return cls.periodic(1, 2.0)

    @classmethod
    def greedy(cls, target: float):
        return cls(GREEDY, target=target)

    @classmethod
    def from_schedule(cls, indices):
        return cls(SCHEDULE, schedule=tuple(indices))

    def validate(self, marginal: CredalSet) -> None:
        k = marginal.n_vertices
        used = [self.vertex] if self.kind == FIXED else list(self.schedule) if self.kind == SCHEDULE else []
        for i in used:
            if not 0 <= i < k:
                raise ValueError(f"vertex index {i} out of range for {k} vertices")

    def spec(self) -> str:
        """Compact text form, inverse of :func:`parse_policy`."""
        if self.kind == FIXED:
            return f"fixed:{self.vertex}"
        if self.kind == IID:
            return "iid"
        if self.kind == PERIODIC:
            return f"periodic:{self.block_length}:{self.growth:g}"
        if self.kind == GREEDY:
            return f"greedy:{self.target!r}"
        return "schedule:" + ",".join(map(str, self.schedule))


def parse_policy(text: str) -> SelectionPolicy:
    """``fixed:I``, ``iid``, ``periodic:L[:G]``, ``doubling``, ``greedy:T`` or ``schedule:I,J,...``."""
    kind, _, rest = text.strip().partition(":")
    try:
        if kind == FIXED:
            return SelectionPolicy.fixed(int(rest))
        if kind == IID and not rest:
            return SelectionPolicy.iid()
        if kind == "doubling" and not rest:
            return SelectionPolicy.doubling()
        if kind == PERIODIC:
            parts = rest.split(":")
            return SelectionPolicy.periodic(int(parts[0]), float(parts[1]) if len(parts) > 1 else 1.0)
        if kind == GREEDY:
            return SelectionPolicy.greedy(float(rest))
        if kind == SCHEDULE:
            return SelectionPolicy.from_schedule(int(i) for i in rest.split(","))
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad policy {text!r}: {exc}") from None
    raise ValueError(f"bad policy {text!r}")


@dataclass(frozen=True, eq=False)
class Trajectory:
    seed: int
    policy: SelectionPolicy
    steps: int
    checkpoints: np.ndarray
    running_means: np.ndarray
    vertex_index: np.ndarray
    tail_fraction: float
    tail_min: float
    tail_max: float
    marginal_fingerprint: str = ""
    path: np.ndarray | None = field(default=None, repr=False)

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "running_mean", "vertex_index"])
        for k, m, v in zip(self.checkpoints, self.running_means, self.vertex_index):
            w.writerow([int(k), repr(float(m)), int(v)])
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "seed": self.seed,
            "policy": self.policy.spec(),
            "n": self.steps,
            "prng": PRNG,
            "marginal_fingerprint": self.marginal_fingerprint,
        }


def checkpoints(n: int, ratio: float = 1.01) -> np.ndarray:
    """Geometric step indices ``1 = k_0 < k_1 < ...`` with ``k_{i+1} = max(k_i + 1, ceil(ratio k_i))``, ending at ``n``."""
    out, k = [], 1
    while k < n:
        out.append(k)
        k = max(k + 1, math.ceil(k * ratio))
    out.append(n)
    return np.array(out, dtype=np.int64)


def _extreme_vertices(marginal: CredalSet, x: RandomVar) -> tuple[int, int]:
    means = marginal.matrix @ x.values
    return int(np.argmax(means)), int(np.argmin(means))


def _block_vertices(n: int, first_len: int, growth: float, hi: int, lo: int) -> np.ndarray:
    out = np.empty(n, dtype=np.int64)
    start, length, j = 0, float(first_len), 0
    while start < n:
        stop = min(n, start + math.ceil(length))
        out[start:stop] = hi if j % 2 == 0 else lo
        start, length, j = stop, length * growth, j + 1
    return out


def _draw(cdf_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    # outcome = number of interior cdf breakpoints at or below u
    return np.sum(u[:, None] >= cdf_rows[:, :-1], axis=1)


def simulate(
    marginal: CredalSet,
    x: RandomVar,
    policy: SelectionPolicy,
    n: int,
    seed: int,
    tail_fraction: float = 0.2,
    keep_path: bool = False,
    checkpoint_ratio: float = 1.01,
) -> Trajectory:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    check_same_space(marginal, x)
    policy.validate(marginal)
    rng = np.random.Generator(np.random.PCG64(seed))
    u = rng.random(n)
    weights = marginal.matrix
    cdf = np.cumsum(weights, axis=1)
    k_vert = marginal.n_vertices

    if policy.kind == GREEDY:
        vertices, outcomes = _greedy(weights, cdf, x.values, u, policy.target)
    else:
        if policy.kind == FIXED:
            vertices = np.full(n, policy.vertex, dtype=np.int64)
        elif policy.kind == IID:
            vertices = rng.integers(0, k_vert, n)
        elif policy.kind == PERIODIC:
            hi, lo = _extreme_vertices(marginal, x)
            vertices = _block_vertices(n, policy.block_length, policy.growth, hi, lo)
        else:
            sched = np.array(policy.schedule, dtype=np.int64)
            vertices = np.resize(sched, n)
        outcomes = _draw(cdf[vertices], u)

    counts = np.zeros((n, x.space.size))
    counts[np.arange(n), outcomes] = 1.0
    np.cumsum(counts, axis=0, out=counts)
    steps = np.arange(1, n + 1, dtype=float)
    # frequency-weighted values: a point mass at c reproduces c exactly
    means = (counts / steps[:, None]) @ x.values
    tail_start = min(n - 1, int(math.floor(n * (1.0 - tail_fraction))))
    tail = means[tail_start:]
    cps = checkpoints(n, checkpoint_ratio)
    return Trajectory(
        seed=int(seed),
        policy=policy,
        steps=n,
        checkpoints=cps,
        running_means=means[cps - 1],
        vertex_index=vertices[cps - 1],
        tail_fraction=tail_fraction,
        tail_min=float(tail.min()),
        tail_max=float(tail.max()),
        marginal_fingerprint=fingerprint(marginal, x),
        path=means if keep_path else None,
    )


def _greedy(weights, cdf, values, u, target):
    """Pick the vertex whose mean moves the running mean closest to ``target``."""
    n = u.size
    vertex_means = weights @ values
    # candidate outcome of every vertex at every step, so the loop only chooses
    cand = np.stack([_draw(np.broadcast_to(cdf[q], (n, cdf.shape[1])), u) for q in range(len(weights))], axis=1)
    # scalar loop on Python floats; numpy per-step overhead dominates otherwise
    vm = vertex_means.tolist()
    vals = np.asarray(values, dtype=float).tolist()
    order = range(len(vm))
    chosen = []
    total = 0.0
    for k, row in enumerate(cand.tolist()):
        q = min(order, key=lambda i: abs((total + vm[i]) / (k + 1) - target))
        chosen.append(q)
        total += vals[row[q]]
    vertices = np.array(chosen, dtype=np.int64)
    return vertices, cand[np.arange(n), vertices]


def run_trajectories(
    marginal: CredalSet,
    x: RandomVar,
    policies: list[SelectionPolicy],
    n: int,
    seeds: list[int],
    tail_fraction: float = 0.2,
    workers: int = 1,
) -> list[Trajectory]:
    """Every (policy, seed) pair, policy-major; output order is independent of ``workers``."""
    jobs = [(p, s) for p in policies for s in seeds]

    def run(job):
        return simulate(marginal, x, job[0], n, job[1], tail_fraction)

    if workers <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))


def band_report(traj: Trajectory, marginal: CredalSet, x: RandomVar, delta: float) -> InequalityReport:
    """Distance of the tail interval outside ``[lower E X, upper E X]`` against ``delta``."""
    pair = expectation_pair(marginal, x)
    excursion = max(0.0, pair.lower - traj.tail_min, traj.tail_max - pair.upper)
    return InequalityReport(
        "slln_band",
        excursion,
        float(delta),
        constant=float(delta),
        constant_provenance="statistical band tolerance",
        fingerprint=fingerprint(traj.marginal_fingerprint, traj.policy.spec(), traj.steps, traj.tail_fraction),
        seed=traj.seed,
        tol=0.0,
        details={"tail_min": traj.tail_min, "tail_max": traj.tail_max},
    )


def slln_band_check(trajectories: list[Trajectory], marginal: CredalSet, x: RandomVar, delta: float) -> CheckReport:
    if not trajectories:
        raise ValueError("no trajectories")
    pair = expectation_pair(marginal, x)
    report = CheckReport("slln_band", details={"band": (pair.lower - delta, pair.upper + delta)})
    for t in trajectories:
        r = band_report(t, marginal, x, delta)
        report.trials += 1
        report.margin(r.slack)
        if not r.passed:
            report.fail({"seed": t.seed, "policy": t.policy.spec(), "tail": (t.tail_min, t.tail_max)})
    return report


@dataclass(frozen=True)
class ClusterEstimate:
    interval: tuple[float, float]
    coverage: float
    bins_visited: int
    n_bins: int

    def __post_init__(self):
        if not 0 <= self.coverage <= 1:
            raise ValueError("coverage must lie in [0, 1]")


def cluster_check(path: np.ndarray, marginal: CredalSet, x: RandomVar, width: float = 0.05, burn_in: int = 1000) -> ClusterEstimate:
    """Share of width-``width`` bins of ``[lower E X, upper E X]`` that the running
    means after step ``burn_in`` fall into. ``path`` is the full running-mean array
    (``simulate(..., keep_path=True).path``). With a fixed burn-in, coverage can
    only grow along nested prefixes."""
    if width <= 0:
        raise ValueError("width must be positive")
    pair = expectation_pair(marginal, x)
    window = np.asarray(path, dtype=float)[min(burn_in, len(path) - 1):]
    interval = (float(window.min()), float(window.max()))
    span = pair.upper - pair.lower
    if span <= 1e-12:
        return ClusterEstimate(interval, 1.0, 1, 1)
    n_bins = max(1, math.ceil(span / width - 1e-9))
    inside = window[(window >= pair.lower) & (window <= pair.upper)]
    idx = np.minimum(((inside - pair.lower) / width).astype(np.int64), n_bins - 1)
    visited = int(np.unique(idx).size)
    return ClusterEstimate(interval, visited / n_bins, visited, n_bins)


def choquet_moment_condition(marginal: CredalSet, x: RandomVar) -> InequalityReport:
    """``E[(|X| - c)^+] = 0`` at ``c = max|X|``; the Choquet integral of ``|X|`` is recorded."""
    ax = abs(x)
    c = float(ax.values.max())
    tail = upper_expect(marginal, RandomVar(x.space, np.maximum(ax.values - c, 0.0)))
    return equality_report(
        "choquet_moment_condition",
        tail,
        0.0,
        tol=0.0,
        constant=c,
        constant_provenance="truncation level max|X|",
        fingerprint=fingerprint(marginal, x),
        details={"choquet_abs": choquet(CapacityView(marginal), ax).value, "level": c},
    )


def write_trajectory(traj: Trajectory, csv_path, meta_path=None) -> None:
    with open(csv_path, "w", newline="") as fh:
        fh.write(traj.csv_text())
    if meta_path is not None:
        with open(meta_path, "w") as fh:
            fh.write(json.dumps(traj.metadata()) + "\n")
