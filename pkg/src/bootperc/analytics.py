"""Closed-form activation probabilities, the root x0, tail bounds and regime tags.

Conventions: ``pi_plus`` is the probability that a vertex with ``t``
explored potential neighbors and ``n - 1 - t`` unexplored ones satisfies
``X >= max(Y, 1)`` with X ~ Bin(t, p), Y ~ Bin(n-1-t, p) independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import InvalidParameter

_TINY = 1e-300
_REL_TAIL = 1e-14


class InconsistentParameters(ArithmeticError):
    """Numerical evaluation produced a state the parameters should exclude."""


@dataclass(frozen=True)
class AnalyticParams:
    n: int
    p: float
    theta: float = 0.0
    alpha: float = 0.5
    c: float = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter("n must be positive")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidParameter(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.theta <= 1.0:
            raise InvalidParameter(f"theta must lie in [0, 1], got {self.theta}")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParameter(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "c", self.n * self.p)

    @classmethod
    def from_c(cls, n: int, c: float, theta: float = 0.0, alpha: float = 0.5) -> "AnalyticParams":
        return cls(n, c / n, theta, alpha)


@dataclass(frozen=True)
class RootResult:
    x0: float | None
    bracket: tuple[float, float] | None
    sign_change: bool
    double_root_suspected: bool = False


# ---------------------------------------------------------------- pmfs

def binom_pmf(m: int, p: float) -> tuple[int, np.ndarray]:
    """PMF of Bin(m, p) on its numerically non-negligible support.

    Returns ``(lo, w)`` with ``w[k] = P{Bin = lo + k}``.  Terms come from
    the multiplicative recurrence started at the mode.
    """
    if m == 0 or p == 0.0:
        return 0, np.ones(1)
    if p == 1.0:
        return m, np.ones(1)
    mode = min(m, int((m + 1) * p))
    logc = math.lgamma(m + 1) - math.lgamma(mode + 1) - math.lgamma(m - mode + 1)
    peak = math.exp(logc + mode * math.log(p) + (m - mode) * math.log1p(-p))
    odds = p / (1.0 - p)
    up = [peak]
    k, v = mode, peak
    while k < m:
        v *= (m - k) / (k + 1) * odds
        k += 1
        if v < _TINY * peak:
            break
        up.append(v)
    down = []
    k, v = mode, peak
    while k > 0:
        v *= k / (m - k + 1) / odds
        k -= 1
        if v < _TINY * peak:
            break
        down.append(v)
    lo = mode - len(down)
    w = np.array(down[::-1] + up)
    # the lgamma peak carries ~1e-12 relative error at large m; the
    # recurrence ratios do not, so renormalizing removes it
    return lo, w / math.fsum(w)


def _survival(lo: int, w: np.ndarray, size: int) -> np.ndarray:
    """``s[k] = sum_{j >= k} w_j`` for k = 0..size-1 (index is the value)."""
    s = np.zeros(size + 1)
    hi = lo + len(w)
    tail = np.cumsum(w[::-1])[::-1]  # smallest terms accumulate first
    a, b = min(lo, size), min(hi, size)
    s[:a] = tail[0] if len(tail) else 0.0
    s[a:b] = tail[a - lo:b - lo]
    return s[:size]


def _check_nt(n, t, p):
    if not 0 <= t <= n - 1:
        raise InvalidParameter(f"need 0 <= t <= n-1, got n={n}, t={t}")
    if not 0.0 <= p <= 1.0:
        raise InvalidParameter(f"p must lie in [0, 1], got {p}")


def pi_plus_exact(n: int, t: int, p: float) -> float:
    """P{X >= max(Y, 1)}, X ~ Bin(t, p), Y ~ Bin(n-1-t, p), by convolution."""
    _check_nt(n, t, p)
    if t == 0 or p == 0.0:
        return 0.0
    xlo, xw = binom_pmf(t, p)
    ylo, yw = binom_pmf(n - 1 - t, p)
    sx = _survival(xlo, xw, t + 2)
    ys = np.arange(ylo, ylo + len(yw))
    need = np.maximum(ys, 1)
    ok = need <= t
    terms = yw[ok] * sx[need[ok]]
    return min(1.0, math.fsum(np.sort(terms)))


def _logaddexp(a: float, b: float) -> float:
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def _poisson_dominance_sum(mu1: float, mu2: float, kmax: float) -> float:
    """sum_{k=1}^{kmax} P{Po(mu1) = k} P{Po(mu2) <= k}.

    Stops once the geometric majorant of the remaining outer terms is
    below ``1e-14`` of the accumulated value.
    """
    if mu1 <= 0.0 or kmax < 1:
        return 0.0
    lmu1 = math.log(mu1)
    lmu2 = math.log(mu2) if mu2 > 0 else -math.inf
    # inner Po(mu2) cdf accumulated in log space to survive large means
    log_inner_term = -mu2  # log P{Po(mu2) = 0}
    log_cdf = -mu2
    log_outer = -mu1
    acc = []
    total = 0.0
    k = 0
    while k < kmax:
        k += 1
        log_outer += lmu1 - math.log(k)
        if mu2 > 0:
            log_inner_term += lmu2 - math.log(k)
            log_cdf = _logaddexp(log_cdf, log_inner_term)
        else:
            log_cdf = 0.0
        term = math.exp(log_outer + min(log_cdf, 0.0))
        acc.append(term)
        total += term
        ratio = mu1 / (k + 1)
        if ratio < 1.0:
            # remaining terms are at most outer_k * ratio^j with the cdf <= 1
            majorant = math.exp(log_outer) * ratio / (1.0 - ratio)
            if majorant <= _REL_TAIL * total or (total == 0.0 and majorant < _TINY):
                break
    return math.fsum(acc)


def pi_plus_poisson(n: int, t: int, p: float) -> float:
    """Poisson replacement of both binomials in :func:`pi_plus_exact` (O(p) error)."""
    _check_nt(n, t, p)
    return _poisson_dominance_sum(t * p, (n - t - 1) * p, t)


def pi_upper_first_mark(n: int, t: int, p: float) -> float:
    """P{Bin(t, p) > 0} = 1 - (1-p)^t, an upper bound on pi_plus."""
    if t < 0:
        raise InvalidParameter("t must be non-negative")
    if t == 0:
        return 0.0
    return -math.expm1(t * math.log1p(-p)) if p < 1.0 else 1.0


# --------------------------------------------------- critical window p = c/n

def g_of_c(c: float) -> float:
    if c < 0:
        raise InvalidParameter("c must be non-negative")
    return (1.0 + c) * c * math.exp(-c)


def subcritical_bound(a0: float, c: float) -> float:
    """A0 / (1 - g(c)): asymptotic cap on A* when A0 = o(n), p = c/n."""
    return a0 / (1.0 - g_of_c(c))


def f_c_theta(x: float, params: AnalyticParams, limit: bool = False) -> float:
    """theta - x + (1-theta) e^p e^{-c} sum_{k=1}^{floor(xn)} (cx)^k/k! sum_{j<=k} ((1-x)c)^j/j!.

    ``limit=True`` takes n -> infinity: drops e^p and lets the outer sum run
    to infinity.
    """
    if not 0.0 <= x <= 1.0:
        raise InvalidParameter(f"x must lie in [0, 1], got {x}")
    c, th = params.c, params.theta
    if limit:
        s = _poisson_dominance_sum(c * x, c * (1.0 - x), math.inf)
        return th - x + (1.0 - th) * s
    kmax = math.floor(x * params.n)
    s = _poisson_dominance_sum(c * x, c * (1.0 - x), kmax)
    return th - x + (1.0 - th) * math.exp(params.p) * s


def find_x0(params: AnalyticParams, grid_step: float = 1e-3, tol: float = 1e-9,
            limit: bool = False, touch_tol: float = 1e-10) -> RootResult:
    """Smallest x >= theta past which f_{c,theta} turns negative.

    Grid scan from theta, then bisection on the first bracket.  A grid
    local minimum with ``0 <= f <= touch_tol`` ahead of any sign change is
    reported as a suspected double root instead.
    """
    if not 0.0 < grid_step <= 0.01:
        raise InvalidParameter("grid_step must lie in (0, 0.01]")
    if not 0.0 < tol < grid_step:
        raise InvalidParameter("tol must lie in (0, grid_step)")

    def f(x):
        return f_c_theta(min(max(x, 0.0), 1.0), params, limit)

    th = params.theta
    prev_x, prev_f = th, f(th)
    if prev_f < 0:
        raise InconsistentParameters(f"f(theta) = {prev_f} < 0")
    before_f = math.inf
    k = 0
    while prev_x < 1.0:
        k += 1
        x = min(th + k * grid_step, 1.0)
        fx = f(x)
        if fx < 0:
            lo, hi = prev_x, x
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if f(mid) >= 0:
                    lo = mid
                else:
                    hi = mid
            return RootResult(0.5 * (lo + hi), (lo, hi), True, False)
        if prev_f <= touch_tol and prev_f <= before_f and prev_f <= fx and prev_x > th:
            return RootResult(prev_x, (prev_x - grid_step, x), False, True)
        before_f, prev_x, prev_f = prev_f, x, fx
    return RootResult(None, None, False, False)


# ------------------------------------------------------------- tail bounds

def chernoff_upper(mean: float, z: float) -> float:
    """exp(-z^2 / (2 (mean + z/3))) >= P{X >= mean + z} for binomial X."""
    if mean < 0 or z < 0:
        raise InvalidParameter("mean and z must be non-negative")
    if z == 0:
        return 1.0
    return min(1.0, math.exp(-z * z / (2.0 * (mean + z / 3.0))))


def chernoff_lower(mean: float, z: float) -> float:
    """exp(-z^2 / (2 mean)) >= P{X <= mean - z} for binomial X."""
    if mean < 0 or z < 0:
        raise InvalidParameter("mean and z must be non-negative")
    if z == 0:
        return 1.0
    if mean == 0:
        return 0.0
    return min(1.0, math.exp(-z * z / (2.0 * mean)))


def delta_upper_bound(n: int, p: float, t: float) -> float:
    """2 exp(-(n/2 - t)^2 p / n), clamped to 1; a bound on 1 - pi(t) for t > n/2."""
    if t <= n / 2:
        raise InvalidParameter("delta bound needs t > n/2")
    return min(1.0, 2.0 * math.exp(-((n / 2 - t) ** 2) * p / n))


def supercritical_margin(n: int, p: float, a0: float) -> float:
    """(A0 - n/2) / sqrt(n/p)."""
    return (a0 - n / 2) / math.sqrt(n / p) if p > 0 else -math.inf


def expected_R_bound(n: int, p: float, a0: float) -> float:
    """2 n exp(-omega^2 / 2) with omega the supercritical margin."""
    w = supercritical_margin(n, p, a0)
    return 2.0 * n * math.exp(-0.5 * w * w)


# ------------------------------------------------------------------ regimes

SPARSE_SUBCRITICAL = "SPARSE_SUBCRITICAL"
CRITICAL_WINDOW = "CRITICAL_WINDOW"
DENSE_SUBCRITICAL = "DENSE_SUBCRITICAL"
DENSE_NEAR_CRITICAL = "DENSE_NEAR_CRITICAL"
DENSE_SUPERCRITICAL = "DENSE_SUPERCRITICAL"


@dataclass(frozen=True)
class RegimeThresholds:
    """Finite-n stand-ins for asymptotic regime boundaries (all heuristic)."""

    sparse_c: float = 0.01
    dense_c: float = 50.0
    small_theta: float = 0.01
    margin: float = 3.0
    theta_gap: float = 0.02


@dataclass(frozen=True)
class Regime:
    tag: str
    prediction: str
    bound: float | None
    bound_name: str | None


def classify_regime(params: AnalyticParams, a0: int,
                    th: RegimeThresholds = RegimeThresholds()) -> Regime:
    n, p, c = params.n, params.p, params.c
    if c <= th.sparse_c:
        return Regime(SPARSE_SUBCRITICAL, "A* ≈ A0", float(a0), "A0")
    if c <= th.dense_c:
        theta = a0 / n
        if theta <= th.small_theta:
            return Regime(CRITICAL_WINDOW, "A* ≤ A0/(1-g(c))", subcritical_bound(a0, c),
                          "subcritical_bound")
        root = find_x0(AnalyticParams(n, p, theta))
        return Regime(CRITICAL_WINDOW, f"θ* ∈ ({theta:g}, x0]", root.x0, "x0")
    w = supercritical_margin(n, p, a0)
    if w >= th.margin or a0 / n - 0.5 >= th.theta_gap:
        return Regime(DENSE_SUPERCRITICAL, "A* = n - o(n)", expected_R_bound(n, p, a0),
                      "expected_R_bound")
    if a0 < n / 2:
        return Regime(DENSE_SUBCRITICAL, "A* ≈ A0", n * math.exp(-c / 3.0), "n·exp(-np/3)")
    return Regime(DENSE_NEAR_CRITICAL, "inside the √(n/p) window; no prediction", w, "margin")
