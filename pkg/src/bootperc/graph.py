"""Erdos-Renyi G(n, p) sampling into compressed sparse adjacency."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from ._rng import as_seed, new_state, uniform

P_SWITCH = 0.1


class InvalidParameter(ValueError):
    """A parameter lies outside its documented domain."""


@njit(cache=True)
def _grow(buf, size):
    out = np.empty(max(2 * buf.shape[0], 16), dtype=buf.dtype)
    out[:size] = buf[:size]
    return out


@njit(cache=True)
def _sample_edges(n, p, st, dense):
    """Edges (v, w) with w < v, emitted in lexicographic (v, w) order.

    Sparse path skips geometric gaps over the linearized pairs
    (Batagelj-Brandes); dense path tests every pair.  Both consume the
    same kind of uniform draws and produce the same law.
    """
    npairs = n * (n - 1) // 2
    mean = npairs * p
    cap = int(mean + 6.0 * math.sqrt(mean + 1.0)) + 16
    vs = np.empty(cap, dtype=np.int32)
    ws = np.empty(cap, dtype=np.int32)
    m = 0
    if p <= 0.0 or n < 2:
        return vs[:0], ws[:0]
    if dense or p >= 1.0:
        for v in range(1, n):
            for w in range(v):
                if p >= 1.0 or uniform(st) < p:
                    if m == vs.shape[0]:
                        vs = _grow(vs, m)
                        ws = _grow(ws, m)
                    vs[m] = v
                    ws[m] = w
                    m += 1
        return vs[:m], ws[:m]
    lq = math.log1p(-p)
    v = 1
    w = -1
    while v < n:
        r = uniform(st)
        fgap = math.log1p(-r) / lq
        # compare as float: flooring a huge gap to int64 would wrap
        if fgap > npairs:
            break
        w += 1 + np.int64(math.floor(fgap))
        while w >= v and v < n:
            w -= v
            v += 1
        if v < n:
            if m == vs.shape[0]:
                vs = _grow(vs, m)
                ws = _grow(ws, m)
            vs[m] = v
            ws[m] = w
            m += 1
    return vs[:m], ws[:m]


@njit(cache=True)
def _csr_from_ordered(n, vs, ws):
    # (v, w) lexicographic order makes every neighbor list come out sorted
    deg = np.zeros(n, dtype=np.int64)
    for e in range(vs.shape[0]):
        deg[vs[e]] += 1
        deg[ws[e]] += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    for i in range(n):
        indptr[i + 1] = indptr[i] + deg[i]
    fill = indptr[:-1].copy()
    indices = np.empty(indptr[n], dtype=np.int32)
    for e in range(vs.shape[0]):
        v = vs[e]
        w = ws[e]
        indices[fill[v]] = w
        fill[v] += 1
        indices[fill[w]] = v
        fill[w] += 1
    return indptr, indices


@njit(cache=True)
def _sample_csr(n, p, seed, dense):
    st = new_state(seed)
    vs, ws = _sample_edges(n, p, st, dense)
    return _csr_from_ordered(n, vs, ws)


def _check_np(n, p):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameter(f"n must be a positive integer, got {n!r}")
    if not (0.0 <= p <= 1.0):
        raise InvalidParameter(f"p must lie in [0, 1], got {p!r}")


def use_dense(p: float, method: str = "auto") -> bool:
    if method == "auto":
        return p >= P_SWITCH
    if method not in ("sparse", "dense"):
        raise InvalidParameter(f"unknown sampling method {method!r}")
    return method == "dense"


@dataclass(frozen=True, eq=False)
class GraphSample:
    """Immutable simple undirected graph on vertices 0..n-1.

    Neighborhoods live in CSR form: the neighbors of ``v`` are
    ``indices[indptr[v]:indptr[v + 1]]``, sorted ascending.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    p: float | None = None
    seed: int | None = None
    _degrees: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        deg = np.diff(self.indptr)
        deg.setflags(write=False)
        object.__setattr__(self, "_degrees", deg)

    @classmethod
    def from_edges(cls, n: int, edges, p=None, seed=None) -> "GraphSample":
        """Build from an iterable of (u, v) pairs; duplicates and orientation are folded."""
        if n < 1:
            raise InvalidParameter("n must be positive")
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise InvalidParameter("edge endpoint outside 0..n-1")
        if np.any(arr[:, 0] == arr[:, 1]):
            raise InvalidParameter("self-loops are not allowed")
        hi = np.maximum(arr[:, 0], arr[:, 1])
        lo = np.minimum(arr[:, 0], arr[:, 1])
        key = np.unique(hi * n + lo)
        hi, lo = key // n, key % n
        indptr, indices = _csr_from_ordered(n, hi.astype(np.int32), lo.astype(np.int32))
        return cls(n, indptr, indices, p=p, seed=seed)

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def edge_count(self) -> int:
        return int(self.indptr[-1]) // 2

    def degree(self, v: int) -> int:
        return int(self._degrees[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        ind = self.indices.tolist()
        ptr = self.indptr.tolist()
        return [ind[ptr[v]:ptr[v + 1]] for v in range(self.n)]

    def edges(self) -> np.ndarray:
        """(m, 2) array of edges with u < v, sorted lexicographically."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self._degrees)
        dst = self.indices.astype(np.int64)
        keep = src < dst
        return np.column_stack([src[keep], dst[keep]])

    def same_structure(self, other: "GraphSample") -> bool:
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))


def sample_gnp(n: int, p: float, seed: int, method: str = "auto") -> GraphSample:
    """Sample G(n, p); identical (n, p, seed, path) gives an identical graph.

    ``method="auto"`` uses geometric gap skipping below ``P_SWITCH`` and a
    per-pair Bernoulli sweep above it.
    """
    _check_np(n, p)
    s = as_seed(seed)
    indptr, indices = _sample_csr(int(n), float(p), np.uint64(s), use_dense(p, method))
    return GraphSample(int(n), indptr, indices, p=float(p), seed=s)


def degree_histogram(g: GraphSample) -> dict[int, int]:
    counts = np.bincount(g.degrees, minlength=1) if g.n else np.zeros(0, dtype=np.int64)
    return {int(d): int(c) for d, c in enumerate(counts) if c}


def write_edgelist(g: GraphSample, path) -> None:
    e = g.edges()
    lines = [f"{g.n} {len(e)}"] + [f"{u} {v}" for u, v in e.tolist()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_edgelist(path) -> GraphSample:
    text = Path(path).read_text(encoding="ascii").split("\n")
    head = text[0].split()
    if len(head) != 2:
        raise InvalidParameter("edge-list header must be 'n m'")
    n, m = int(head[0]), int(head[1])
    rows = [ln.split() for ln in text[1:] if ln.strip()]
    if len(rows) != m:
        raise InvalidParameter(f"header announces {m} edges, found {len(rows)}")
    edges = [(int(a), int(b)) for a, b in rows]
    if any(u >= v for u, v in edges):
        raise InvalidParameter("edge lines must satisfy u < v")
    return GraphSample.from_edges(n, edges)


def check_simple(g: GraphSample) -> None:
    """Raise AssertionError if any GraphSample invariant is broken."""
    n = g.n
    assert g.indptr.shape == (n + 1,) and g.indptr[0] == 0
    assert int(g.indptr[-1]) % 2 == 0
    adj = g.adjacency
    pairs = Counter()
    for v, nb in enumerate(adj):
        assert all(0 <= u < n for u in nb)
        assert v not in nb
        assert nb == sorted(set(nb))
        for u in nb:
            pairs[(min(u, v), max(u, v))] += 1
    assert all(c == 2 for c in pairs.values())
    assert g.edge_count == len(pairs) == sum(len(a) for a in adj) // 2
