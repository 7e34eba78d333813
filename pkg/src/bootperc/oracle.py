"""Slow, deliberately plain reference implementations.

Nothing here imports the engine or the analytics; the only shared piece is
the :class:`GraphSample` container.  Thresholds are evaluated with
``fractions.Fraction`` and probabilities by exact rational enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .graph import GraphSample

MAX_EXHAUSTIVE_N = 6
MAX_ENUMERATION_N = 20


class OracleRefused(ValueError):
    """Input too large for exhaustive enumeration."""


@dataclass(frozen=True)
class RuleSpec:
    """Oracle-side rule description: ("majority"|"proportional"|"classical", param, strict)."""

    variant: str = "majority"
    alpha: Fraction = Fraction(1, 2)
    r: int = 0
    strict: bool = False

    @classmethod
    def coerce(cls, rule) -> "RuleSpec":
        if rule is None:
            return cls()
        if isinstance(rule, RuleSpec):
            return rule
        # duck-typed ActivationRule
        if rule.variant == "classical":
            return cls("classical", Fraction(0), int(rule.r), False)
        return cls(rule.variant, Fraction(rule.alpha), 0, bool(rule.strict_majority))

    def ok(self, active_nbrs: int, degree: int) -> bool:
        if self.variant == "classical":
            return active_nbrs >= self.r
        if active_nbrs < 1:
            return False
        need = self.alpha * degree
        return active_nbrs > need if self.strict else active_nbrs >= need


@dataclass(frozen=True)
class ExhaustiveCase:
    n: int
    graph_code: int
    initial_mask: int

    def __post_init__(self):
        assert 0 <= self.graph_code < 2 ** math.comb(self.n, 2)
        assert 0 <= self.initial_mask < 2 ** self.n


def _rational(p) -> Fraction:
    return Fraction(repr(p)) if isinstance(p, float) else Fraction(p)


def pair_list(n: int) -> list[tuple[int, int]]:
    """Bit ``i`` of a graph code is the i-th pair in (u, v), u < v, lexicographic order."""
    return list(itertools.combinations(range(n), 2))


def decode_graph(n: int, code: int) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, (u, v) in enumerate(pair_list(n)):
        if code >> i & 1:
            adj[u].append(v)
            adj[v].append(u)
    return adj


def graph_from_code(n: int, code: int) -> GraphSample:
    return GraphSample.from_edges(n, [e for i, e in enumerate(pair_list(n)) if code >> i & 1])


def reference_final_set(adj: list[list[int]], initial, rule=None) -> set[int]:
    """Full rescans, activating in place, until a whole pass changes nothing."""
    spec = RuleSpec.coerce(rule)
    active = set(initial)
    changed = True
    while changed:
        changed = False
        for v in range(len(adj)):
            if v in active:
                continue
            hits = sum(1 for u in adj[v] if u in active)
            if spec.ok(hits, len(adj[v])):
                active.add(v)
                changed = True
    return active


def mc_reference_percolation(g: GraphSample, initial, rule=None) -> set[int]:
    """Reference final active set on a GraphSample for an explicit initial set."""
    return reference_final_set(g.adjacency, initial, rule)


def iter_cases(n: int):
    """All (graph_code, initial_mask) pairs for n vertices, graph_code ascending."""
    for code in range(2 ** math.comb(n, 2)):
        for mask in range(2 ** n):
            yield ExhaustiveCase(n, code, mask)


def mask_to_set(mask: int) -> set[int]:
    return {i for i in range(mask.bit_length()) if mask >> i & 1}


def exact_expected_final_size(n: int, p, a0: int, rule=None) -> float:
    """E[A*] over G(n, p) and a uniform a0-subset, by total enumeration.

    Computed in exact rationals; floats enter through their shortest
    decimal repr.
    """
    if n > MAX_EXHAUSTIVE_N:
        raise OracleRefused(f"n={n} exceeds {MAX_EXHAUSTIVE_N}")
    p = _rational(p)
    pairs = math.comb(n, 2)
    subsets = list(itertools.combinations(range(n), a0))
    total = Fraction(0)
    for code in range(2 ** pairs):
        m = bin(code).count("1")
        weight = p ** m * (1 - p) ** (pairs - m)
        if weight == 0:
            continue
        adj = decode_graph(n, code)
        s = sum(len(reference_final_set(adj, init, rule)) for init in subsets)
        total += weight * Fraction(s, len(subsets))
    return float(total)


def exact_pi_plus_enumeration(n: int, t: int, p) -> float:
    """P{X >= max(Y, 1)} over the full joint support, in exact rationals."""
    if n > MAX_ENUMERATION_N:
        raise OracleRefused(f"n={n} exceeds {MAX_ENUMERATION_N}")
    p = _rational(p)
    q = 1 - p
    m = n - 1 - t
    px = [math.comb(t, k) * p**k * q**(t - k) for k in range(t + 1)]
    py = [math.comb(m, k) * p**k * q**(m - k) for k in range(m + 1)]
    total = Fraction(0)
    for x in range(t + 1):
        for y in range(m + 1):
            if x >= max(y, 1):
                total += px[x] * py[y]
    return float(total)


def exact_binomial_tail(m: int, p, lo: int | None = None, hi: int | None = None) -> float:
    """P{lo <= Bin(m, p) <= hi} by direct summation in rationals."""
    p = _rational(p)
    lo = 0 if lo is None else max(lo, 0)
    hi = m if hi is None else min(hi, m)
    return float(sum((math.comb(m, k) * p**k * (1 - p) ** (m - k) for k in range(lo, hi + 1)),
                     Fraction(0)))
