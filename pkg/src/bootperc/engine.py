"""One-vertex-per-step exploration of bootstrap percolation.

Active vertices wait in a FIFO queue.  Each step pops one vertex ``u_t``,
gives every neighbor of ``u_t`` a mark, and activates the inactive
neighbors whose mark count now satisfies the rule; those join the back of
the queue in ascending label order.  The run stops when the queue is
empty, at which point the number of steps equals the final active count.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np
from numba import njit

from ._rng import as_seed, new_state, randbelow, uniform
from .graph import GraphSample, InvalidParameter

KIND_PROPORTIONAL = 0
KIND_CLASSICAL = 1

_ALPHA_MAX_DEN = 10**6


@dataclass(frozen=True)
class ActivationRule:
    """Threshold family deciding when marks activate a vertex.

    Proportional(alpha) activates on ``marks >= max(alpha * deg, 1)``; with
    ``strict_majority`` the degree comparison becomes strict.  Majority is
    Proportional(1/2).  Classical(r) activates on ``marks >= r``.
    """

    variant: str = "majority"
    alpha: Fraction | None = None
    r: int | None = None
    strict_majority: bool = False

    def __post_init__(self):
        if self.variant == "majority":
            object.__setattr__(self, "alpha", Fraction(1, 2))
        elif self.variant == "proportional":
            a = self.alpha
            if a is None:
                raise InvalidParameter("proportional rule needs alpha")
            if not isinstance(a, Fraction):
                a = Fraction(str(a)) if isinstance(a, float) else Fraction(a)
                a = a.limit_denominator(_ALPHA_MAX_DEN)
            if not 0 < a < 1:
                raise InvalidParameter(f"alpha must lie in (0, 1), got {self.alpha}")
            object.__setattr__(self, "alpha", a)
        elif self.variant == "classical":
            if self.r is None or int(self.r) < 1:
                raise InvalidParameter(f"classical rule needs r >= 1, got {self.r}")
            object.__setattr__(self, "r", int(self.r))
        else:
            raise InvalidParameter(f"unknown rule variant {self.variant!r}")

    @classmethod
    def majority(cls, strict: bool = False) -> "ActivationRule":
        return cls("majority", strict_majority=strict)

    @classmethod
    def proportional(cls, alpha, strict: bool = False) -> "ActivationRule":
        return cls("proportional", alpha=alpha, strict_majority=strict)

    @classmethod
    def classical(cls, r: int) -> "ActivationRule":
        return cls("classical", r=r)

    def kernel_args(self) -> tuple[int, int, int, int, bool]:
        """(kind, alpha numerator, alpha denominator, r, strict)."""
        if self.variant == "classical":
            return KIND_CLASSICAL, 0, 1, self.r, False
        return (KIND_PROPORTIONAL, self.alpha.numerator, self.alpha.denominator, 0,
                bool(self.strict_majority))

    def admits(self, marks, degree):
        """Vectorized rule test on integer marks / degrees (exact arithmetic)."""
        kind, num, den, r, strict = self.kernel_args()
        marks = np.asarray(marks, dtype=np.int64)
        degree = np.asarray(degree, dtype=np.int64)
        if kind == KIND_CLASSICAL:
            return marks >= r
        lhs, rhs = marks * den, degree * num
        return ((lhs > rhs) if strict else (lhs >= rhs)) & (marks >= 1)

    def describe(self) -> dict:
        d = {"variant": self.variant, "strict_majority": self.strict_majority}
        if self.variant == "proportional":
            d["alpha"] = str(self.alpha)
        if self.variant == "classical":
            d["r"] = self.r
        return d


@njit(cache=True)
def _admits(m, d, kind, num, den, r, strict):
    if kind == 1:
        return m >= r
    if m < 1:
        return False
    if strict:
        return m * den > d * num
    return m * den >= d * num


@njit(cache=True)
def _draw_fixed(n, a0, seed):
    # partial Fisher-Yates over 0..n-1
    st = new_state(seed)
    perm = np.arange(n, dtype=np.int64)
    for i in range(a0):
        j = i + randbelow(st, n - i)
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
    return np.sort(perm[:a0])


@njit(cache=True)
def _draw_bernoulli(n, q, seed):
    st = new_state(seed)
    out = np.empty(n, dtype=np.int64)
    k = 0
    for v in range(n):
        if uniform(st) < q:
            out[k] = v
            k += 1
    return out[:k]


@dataclass(frozen=True)
class InitialSpec:
    """How the initially active set is chosen.

    ``fixed``: a uniform subset of exactly ``a0`` vertices.  ``bernoulli``:
    each vertex independently with probability ``q``.  ``explicit``: the
    given vertices.
    """

    mode: str
    a0: int | None = None
    q: float | None = None
    vertices: tuple[int, ...] | None = None
    seed: int | None = 0

    @classmethod
    def fixed_size(cls, a0: int, seed: int) -> "InitialSpec":
        return cls("fixed", a0=int(a0), seed=as_seed(seed))

    @classmethod
    def bernoulli(cls, q: float, seed: int) -> "InitialSpec":
        return cls("bernoulli", q=float(q), seed=as_seed(seed))

    @classmethod
    def explicit(cls, vertices) -> "InitialSpec":
        return cls("explicit", vertices=tuple(sorted({int(v) for v in vertices})), seed=None)

    def draw(self, n: int) -> np.ndarray:
        """Sorted int64 array of initially active vertices on an n-vertex graph."""
        if self.mode == "fixed":
            if not 0 <= self.a0 <= n:
                raise InvalidParameter(f"A0={self.a0} outside [0, {n}]")
            return _draw_fixed(n, self.a0, np.uint64(self.seed))
        if self.mode == "bernoulli":
            if not 0.0 <= self.q <= 1.0:
                raise InvalidParameter(f"q={self.q} outside [0, 1]")
            return _draw_bernoulli(n, self.q, np.uint64(self.seed))
        if self.mode == "explicit":
            arr = np.asarray(self.vertices, dtype=np.int64)
            if arr.size and (arr[0] < 0 or arr[-1] >= n):
                raise InvalidParameter("initial vertex outside 0..n-1")
            return arr
        raise InvalidParameter(f"unknown initial mode {self.mode!r}")


@njit(cache=True, nogil=True)
def _explore(indptr, indices, init, kind, num, den, r, strict, order_seed, randomized):
    n = indptr.shape[0] - 1
    active = np.zeros(n, dtype=np.bool_)
    marks = np.zeros(n, dtype=np.int64)
    act_time = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    a_series = np.empty(n + 1, dtype=np.int64)
    tail = 0
    for i in range(init.shape[0]):
        v = init[i]
        active[v] = True
        act_time[v] = 0
        queue[tail] = v
        tail += 1
    a_series[0] = tail
    st = new_state(order_seed)
    head = 0
    t = 0
    while head < tail:
        if randomized:
            j = head + randbelow(st, tail - head)
            tmp = queue[head]
            queue[head] = queue[j]
            queue[j] = tmp
        u = queue[head]
        head += 1
        t += 1
        # neighbors are sorted, so activations append in label order
        for e in range(indptr[u], indptr[u + 1]):
            w = indices[e]
            marks[w] += 1
            if not active[w]:
                if _admits(marks[w], indptr[w + 1] - indptr[w], kind, num, den, r, strict):
                    active[w] = True
                    act_time[w] = t
                    queue[tail] = w
                    tail += 1
        a_series[t] = tail
    return a_series[:t + 1], act_time, t


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A(t) for t = 0..T together with the final active set.

    ``activation_time[v]`` is the step at which ``v`` became active
    (0 for initial vertices, -1 if never).
    """

    n: int
    A_series: np.ndarray
    T: int
    A_star: int
    final_set: np.ndarray
    activation_time: np.ndarray
    generations: dict | None = None

    @property
    def A0(self) -> int:
        return int(self.A_series[0])

    @property
    def S_series(self) -> np.ndarray:
        return self.A_series - self.A_series[0]

    @property
    def R_series(self) -> np.ndarray:
        return self.n - self.A_series

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["t", "A_t"])
            for t, a in enumerate(self.A_series.tolist()):
                w.writerow([t, a])


def _run(g: GraphSample, init: InitialSpec, rule: ActivationRule, order_seed, randomized) -> Trajectory:
    seeds = init.draw(g.n)
    kind, num, den, r, strict = rule.kernel_args()
    a_series, act_time, T = _explore(g.indptr, g.indices, seeds, kind, num, den, r, strict,
                                     np.uint64(order_seed), randomized)
    final = np.flatnonzero(act_time >= 0)
    return Trajectory(g.n, a_series, int(T), int(final.size), final, act_time)


def run_percolation(g: GraphSample, init: InitialSpec, rule: ActivationRule | None = None) -> Trajectory:
    """FIFO exploration; initial vertices are queued in ascending label order."""
    return _run(g, init, rule or ActivationRule.majority(), 0, False)


def run_with_order(g: GraphSample, init: InitialSpec, rule: ActivationRule | None, order_seed: int) -> Trajectory:
    """Same process, but each step pops a uniformly random pending vertex."""
    return _run(g, init, rule or ActivationRule.majority(), as_seed(order_seed), True)


class FixedPoint(NamedTuple):
    final_set: np.ndarray
    generations: dict[int, int]


def final_active_fixed_point(g: GraphSample, init: InitialSpec, rule: ActivationRule | None = None) -> FixedPoint:
    """Synchronous generation sweeps against full degrees until nothing changes.

    Vertex ``v`` gets generation ``k`` if it activates in sweep ``k``
    (initial vertices are generation 0).
    """
    rule = rule or ActivationRule.majority()
    kind, num, den, r, strict = rule.kernel_args()
    gen = _sweeps(g.indptr, g.indices, init.draw(g.n), kind, num, den, r, strict)
    final = np.flatnonzero(gen >= 0)
    return FixedPoint(final, dict(zip(final.tolist(), gen[final].tolist())))


@njit(cache=True, nogil=True)
def _sweeps(indptr, indices, init, kind, num, den, r, strict):
    n = indptr.shape[0] - 1
    gen = np.full(n, -1, dtype=np.int64)
    for i in range(init.shape[0]):
        gen[init[i]] = 0
    fresh = np.empty(n, dtype=np.int64)
    sweep = 0
    while True:
        sweep += 1
        k = 0
        # counts are taken against the state at the start of the sweep
        for v in range(n):
            if gen[v] >= 0:
                continue
            c = 0
            for e in range(indptr[v], indptr[v + 1]):
                if gen[indices[e]] >= 0:
                    c += 1
            if _admits(c, indptr[v + 1] - indptr[v], kind, num, den, r, strict):
                fresh[k] = v
                k += 1
        if k == 0:
            return gen
        for i in range(k):
            gen[fresh[i]] = sweep


@dataclass
class ExplorationState:
    """Snapshot of the exploration after ``used_count`` steps."""

    marks: list[int]
    queue: list[int]
    used_count: int
    active_flags: list[bool]
    activation_time: list[int | None]
    used: list[int] = field(default_factory=list)

    @property
    def active_count(self) -> int:
        return sum(self.active_flags)


def iter_exploration(g: GraphSample, init: InitialSpec, rule: ActivationRule | None = None
                     ) -> Iterator[ExplorationState]:
    """Step-by-step pure-Python exploration, yielding a copy of the state at
    t = 0, 1, ..., T.  Meant for inspection and invariant checks on small
    graphs; :func:`run_percolation` is the fast path.
    """
    rule = rule or ActivationRule.majority()
    n = g.n
    adj = g.adjacency
    seeds = init.draw(n).tolist()
    marks = [0] * n
    active = [False] * n
    act_time: list[int | None] = [None] * n
    for v in seeds:
        active[v] = True
        act_time[v] = 0
    queue = list(seeds)
    used: list[int] = []

    def snap():
        return ExplorationState(marks[:], queue[:], len(used), active[:], act_time[:], used[:])

    yield snap()
    t = 0
    while queue:
        u = queue.pop(0)
        used.append(u)
        t += 1
        for w in adj[u]:
            marks[w] += 1
        fresh = [w for w in adj[u] if not active[w] and bool(rule.admits(marks[w], len(adj[w])))]
        for w in sorted(fresh):
            active[w] = True
            act_time[w] = t
            queue.append(w)
        yield snap()
