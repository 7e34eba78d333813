"""Seeded Monte Carlo ensembles, parameter sweeps and comparison with the analytics.

Run ``k`` of an ensemble samples its graph from ``derive_seed(base, k, 0)``
and its initial set from ``derive_seed(base, k, 1)``, so any single run can
be replayed through the public ``sample_gnp`` / ``run_percolation`` API.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from numba import njit

from . import analytics as an
from ._rng import SEED_SCHEME, derive2, derive_seed
from .engine import ActivationRule, InitialSpec, _draw_bernoulli, _draw_fixed, _explore
from .graph import InvalidParameter, _sample_csr, use_dense

DEFAULT_BUDGET = 4 * 10**9
GRAPH_STREAM = 0
INIT_STREAM = 1

_MODE_FIXED = 0
_MODE_BERNOULLI = 1


class BudgetExceeded(InvalidParameter):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One parameter point (optionally swept along ``sweep_param``).

    Exactly one of ``a0``, ``theta``, ``q`` selects the initial set.
    """

    n: int
    p: float
    runs: int
    a0: int | None = None
    theta: float | None = None
    q: float | None = None
    rule: ActivationRule = field(default_factory=ActivationRule.majority)
    base_seed: int = 0
    sweep_param: str | None = None
    sweep_values: tuple[float, ...] | None = None
    almost_percolation_fraction: float = 0.99
    eps: float = 0.1
    budget: int = DEFAULT_BUDGET
    method: str = "auto"

    def __post_init__(self):
        if int(self.n) < 1:
            raise InvalidParameter("n must be a positive integer")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidParameter(f"p must lie in [0, 1], got {self.p}")
        if self.runs < 1:
            raise InvalidParameter("runs must be >= 1")
        chosen = [k for k in ("a0", "theta", "q") if getattr(self, k) is not None]
        if len(chosen) != 1:
            raise InvalidParameter(f"exactly one of a0/theta/q must be set, got {chosen or 'none'}")
        if self.a0 is not None and not 0 <= self.a0 <= self.n:
            raise InvalidParameter(f"a0 must lie in [0, n], got {self.a0}")
        for k in ("theta", "q"):
            v = getattr(self, k)
            if v is not None and not 0.0 <= v <= 1.0:
                raise InvalidParameter(f"{k} must lie in [0, 1], got {v}")
        if not 0.0 < self.almost_percolation_fraction <= 1.0:
            raise InvalidParameter("almost_percolation_fraction must lie in (0, 1]")
        if self.eps < 0:
            raise InvalidParameter("eps must be non-negative")
        use_dense(self.p, self.method)

    @property
    def fixed_a0(self) -> int | None:
        if self.a0 is not None:
            return int(self.a0)
        if self.theta is not None:
            return int(round(self.theta * self.n))
        return None

    def at(self, param: str, value: float) -> "ExperimentConfig":
        """Copy with one parameter replaced; init keys displace each other."""
        changes: dict = {"sweep_param": None, "sweep_values": None}
        if param in ("a0", "theta", "q"):
            changes.update(a0=None, theta=None, q=None)
            changes[param] = int(value) if param == "a0" else float(value)
        elif param == "p":
            changes["p"] = float(value)
        elif param == "c":
            changes["p"] = float(value) / self.n
        elif param == "n":
            changes["n"] = int(value)
        else:
            raise InvalidParameter(f"cannot sweep over {param!r}")
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rule"] = self.rule.describe()
        if d["sweep_values"] is not None:
            d["sweep_values"] = list(d["sweep_values"])
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@njit(cache=True, nogil=True)
def _ensemble_chunk(n, p, dense, mode, a0, q, kind, num, den, r, strict, base, k0, k1):
    m = k1 - k0
    out_a0 = np.empty(m, dtype=np.int64)
    out_star = np.empty(m, dtype=np.int64)
    out_t = np.empty(m, dtype=np.int64)
    for i in range(m):
        k = k0 + i
        indptr, indices = _sample_csr(n, p, derive2(base, k, 0), dense)
        if mode == 0:
            init = _draw_fixed(n, a0, derive2(base, k, 1))
        else:
            init = _draw_bernoulli(n, q, derive2(base, k, 1))
        a_series, act, t = _explore(indptr, indices, init, kind, num, den, r, strict,
                                    np.uint64(0), False)
        out_a0[i] = init.shape[0]
        out_star[i] = a_series[t]
        out_t[i] = t
    return out_a0, out_star, out_t


def worker_count() -> int:
    env = os.environ.get("PERCO_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_seeds(cfg: ExperimentConfig, k: int) -> tuple[int, int]:
    """(graph seed, initial-set seed) of run ``k``."""
    return (derive_seed(cfg.base_seed, k, GRAPH_STREAM),
            derive_seed(cfg.base_seed, k, INIT_STREAM))


def replay_run(cfg: ExperimentConfig, k: int):
    """Re-run ensemble member ``k`` through the public API; returns its Trajectory."""
    from .engine import run_percolation
    from .graph import sample_gnp

    gs, is_ = run_seeds(cfg, k)
    g = sample_gnp(cfg.n, cfg.p, gs, cfg.method)
    init = (InitialSpec.bernoulli(cfg.q, is_) if cfg.q is not None
            else InitialSpec.fixed_size(cfg.fixed_a0, is_))
    return run_percolation(g, init, cfg.rule)


def simulate(cfg: ExperimentConfig, workers: int | None = None
             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-run (A0, A*, T) arrays indexed by run number."""
    if cfg.n * cfg.runs > cfg.budget:
        raise BudgetExceeded(f"n*runs = {cfg.n * cfg.runs} exceeds budget {cfg.budget}; "
                             "raise the budget explicitly to proceed")
    kind, num, den, r, strict = cfg.rule.kernel_args()
    mode = _MODE_BERNOULLI if cfg.q is not None else _MODE_FIXED
    a0 = cfg.fixed_a0 or 0
    q = cfg.q or 0.0
    dense = use_dense(cfg.p, cfg.method)
    base = np.uint64(cfg.base_seed & ((1 << 64) - 1))
    workers = workers or worker_count()
    nchunks = min(cfg.runs, max(1, workers * 4))
    edges = np.linspace(0, cfg.runs, nchunks + 1).astype(np.int64)

    def job(i):
        return _ensemble_chunk(cfg.n, cfg.p, dense, mode, a0, q, kind, num, den, r, strict,
                               base, edges[i], edges[i + 1])

    if workers == 1 or nchunks == 1:
        parts = [job(i) for i in range(nchunks)]
    else:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(job, range(nchunks)))
    return tuple(np.concatenate([pt[j] for pt in parts]) for j in range(3))


def _quantile(xs: list[float], q: float) -> float:
    h = (len(xs) - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (h - lo) * (xs[hi] - xs[lo])


@dataclass(frozen=True)
class EnsembleSummary:
    param_value: float | None
    runs: int
    n: int
    mean_Astar_frac: float
    std: float
    min: float
    max: float
    q05: float
    q50: float
    q95: float
    frac_full_perc: float
    frac_almost_perc: float
    frac_spread_gt_eps: float
    mean_T: float
    mean_A0: float
    a_star: np.ndarray = field(repr=False, compare=False, default=None)

    CSV_COLUMNS = ("param_value", "runs", "mean_Astar_frac", "std", "q05", "q50", "q95",
                   "frac_full_perc", "frac_almost_perc", "frac_spread_gt_eps", "mean_T")

    @classmethod
    def from_runs(cls, n, a0s, a_star, ts, almost=0.99, eps=0.1, param_value=None):
        a0s, a_star, ts = (np.asarray(x, dtype=np.int64) for x in (a0s, a_star, ts))
        k = len(a_star)
        if k == 0:
            nan = math.nan
            return cls(param_value, 0, n, nan, nan, nan, nan, nan, nan, nan, nan, nan, nan,
                       nan, nan, a_star)
        frac = sorted((a_star / n).tolist())
        mean = math.fsum(frac) / k
        std = math.sqrt(math.fsum((x - mean) ** 2 for x in frac) / (k - 1)) if k > 1 else 0.0
        return cls(
            param_value, k, n, mean, std, frac[0], frac[-1],
            _quantile(frac, 0.05), _quantile(frac, 0.5), _quantile(frac, 0.95),
            float(np.mean(a_star == n)),
            float(np.mean(a_star >= almost * n)),
            float(np.mean(a_star > (1.0 + eps) * a0s)),
            math.fsum(ts.tolist()) / k,
            math.fsum(a0s.tolist()) / k,
            a_star,
        )

    def csv_row(self) -> list:
        return [getattr(self, c) for c in self.CSV_COLUMNS]

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "a_star"}
        return d


def run_ensemble(cfg: ExperimentConfig, workers: int | None = None) -> EnsembleSummary:
    a0s, a_star, ts = simulate(cfg, workers)
    return EnsembleSummary.from_runs(cfg.n, a0s, a_star, ts, cfg.almost_percolation_fraction,
                                     cfg.eps)


@dataclass
class SweepResult:
    param: str
    points: list[EnsembleSummary]
    crossing: float | None
    status: str

    @property
    def table(self) -> list[tuple[float, float]]:
        return [(s.param_value, s.frac_almost_perc) for s in self.points]


def estimate_crossing(values, fractions, level: float = 0.5) -> float | None:
    """Linear interpolation where ``fractions`` first passes ``level``."""
    for i in range(len(values) - 1):
        f0, f1 = fractions[i], fractions[i + 1]
        if f0 == level:
            return float(values[i])
        if (f0 - level) * (f1 - level) < 0:
            return float(values[i] + (level - f0) * (values[i + 1] - values[i]) / (f1 - f0))
    if len(values) > 1 and fractions[-1] == level:
        return float(values[-1])
    return None


def sweep_transition(cfg: ExperimentConfig, workers: int | None = None) -> SweepResult:
    if not cfg.sweep_param or not cfg.sweep_values:
        raise InvalidParameter("sweep needs sweep_param and sweep_values")
    values = list(cfg.sweep_values)
    if values != sorted(values):
        raise InvalidParameter("sweep grid must be sorted ascending")
    points = []
    for v in values:
        sub = cfg.at(cfg.sweep_param, v)
        s = run_ensemble(sub, workers)
        points.append(replace(s, param_value=float(v)))
    crossing = estimate_crossing(values, [s.frac_almost_perc for s in points])
    return SweepResult(cfg.sweep_param, points, crossing,
                       "inside grid" if crossing is not None else "outside grid")


@dataclass(frozen=True)
class Check:
    name: str
    bound: str
    statistic: float
    passed: bool


def compare_to_analytic(summary: EnsembleSummary | None, params: an.AnalyticParams,
                        thresholds: an.RegimeThresholds = an.RegimeThresholds(),
                        x0_slack: float = 0.02, bound_slack: float = 0.1,
                        event_tol: float = 0.02) -> list[Check]:
    """Hold an ensemble against the bounds that apply to its regime."""
    if summary is None or summary.runs == 0:
        return []
    n = params.n
    a0 = round(params.theta * n)
    reg = an.classify_regime(params, a0, thresholds)
    mean_star = summary.mean_Astar_frac * n
    out = [Check("regime", reg.tag, float("nan"), True)]
    if reg.tag in (an.SPARSE_SUBCRITICAL, an.DENSE_SUBCRITICAL):
        out.append(Check("no significant spread", f"P{{A* > (1+eps)A0}} <= {event_tol}",
                         summary.frac_spread_gt_eps, summary.frac_spread_gt_eps <= event_tol))
    elif reg.tag == an.CRITICAL_WINDOW and reg.bound_name == "subcritical_bound":
        cap = reg.bound * (1 + bound_slack)
        out.append(Check("subcritical bound", f"mean A* <= {cap:.6g}", mean_star,
                         mean_star <= cap))
    elif reg.tag == an.CRITICAL_WINDOW:
        x0 = reg.bound
        th = summary.mean_Astar_frac
        ok = x0 is not None and params.theta < th <= x0 + x0_slack
        out.append(Check("theta* window", f"({params.theta:g}, {x0:.6g} + {x0_slack}]", th, ok))
        out.append(Check("no full percolation", "frac A* = n == 0", summary.frac_full_perc,
                         summary.frac_full_perc == 0.0))
    elif reg.tag == an.DENSE_SUPERCRITICAL:
        mean_r = n - mean_star
        out.append(Check("expected R bound", f"n - mean A* <= {reg.bound:.6g}", mean_r,
                         mean_r <= reg.bound))
        out.append(Check("almost percolation", f"frac A* >= almost*n >= {1 - event_tol}",
                         summary.frac_almost_perc, summary.frac_almost_perc >= 1 - event_tol))
    return out


# ------------------------------------------------------------------ output

def write_sweep_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(EnsembleSummary.CSV_COLUMNS)
        for s in points:
            w.writerow(s.csv_row())


def summary_json(cfg: ExperimentConfig, points, crossing=None) -> dict:
    doc = {
        "seed_scheme": SEED_SCHEME,
        "base_seed": cfg.base_seed,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "points": [s.to_dict() for s in points],
    }
    if crossing is not None or cfg.sweep_param:
        doc["crossing"] = crossing
    return doc


def dump_json(doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
