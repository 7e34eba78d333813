"""Cross-checks between the engine and the oracles (shared by tests and the CLI)."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from . import oracle
from .analytics import pi_plus_exact
from .engine import ActivationRule, InitialSpec, final_active_fixed_point, run_percolation


@dataclass
class EquivalenceReport:
    n: int
    rule: dict
    cases: int = 0
    mismatches: int = 0
    first_failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    def to_dict(self) -> dict:
        return asdict(self) | {"passed": self.passed}


def exhaustive_equivalence(n: int, rule: ActivationRule | None = None,
                           codes=None, keep: int = 5) -> EquivalenceReport:
    """Engine vs fixed-point sweeps vs naive rescans on every (graph, initial set)."""
    rule = rule or ActivationRule.majority()
    rep = EquivalenceReport(n, rule.describe())
    masks = [sorted(oracle.mask_to_set(m)) for m in range(2 ** n)]
    codes = range(2 ** math.comb(n, 2)) if codes is None else codes
    for code in codes:
        g = oracle.graph_from_code(n, code)
        adj = oracle.decode_graph(n, code)
        for mask, init in enumerate(masks):
            spec = InitialSpec.explicit(init)
            a = run_percolation(g, spec, rule).final_set.tolist()
            b = final_active_fixed_point(g, spec, rule).final_set.tolist()
            c = sorted(oracle.reference_final_set(adj, init, rule))
            rep.cases += 1
            if not a == b == c:
                rep.mismatches += 1
                if len(rep.first_failures) < keep:
                    rep.first_failures.append({"graph_code": code, "initial_mask": mask,
                                               "engine": a, "fixed_point": b, "reference": c})
    return rep


def pi_plus_grid_check(max_n: int = 20, ps=(0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
                       tol: float = 1e-12) -> dict:
    worst = 0.0
    where = None
    count = 0
    for n in range(1, max_n + 1):
        for t in range(n):
            for p in ps:
                d = abs(pi_plus_exact(n, t, p) - oracle.exact_pi_plus_enumeration(n, t, p))
                count += 1
                if d > worst:
                    worst, where = d, (n, t, p)
    return {"points": count, "max_abs_diff": worst, "worst_at": where, "tol": tol,
            "passed": worst <= tol}
