import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from bootperc import oracle
from bootperc.analytics import (CRITICAL_WINDOW, DENSE_SUBCRITICAL, DENSE_SUPERCRITICAL,
                                SPARSE_SUBCRITICAL, AnalyticParams, InconsistentParameters,
                                RegimeThresholds, binom_pmf, chernoff_lower, chernoff_upper,
                                classify_regime, delta_upper_bound, expected_R_bound, f_c_theta,
                                find_x0, g_of_c, pi_plus_exact, pi_plus_poisson,
                                pi_upper_first_mark, subcritical_bound)
from bootperc.graph import InvalidParameter

PHI = (1 + math.sqrt(5)) / 2


# ---- pi_plus ----

def test_pi_plus_examples():
    assert pi_plus_exact(4, 1, 0.5) == pytest.approx(0.375, abs=1e-15)
    for n in (1, 7, 1000):
        assert pi_plus_exact(n, 0, 0.3) == 0.0
        assert pi_plus_poisson(n, 0, 0.3) == 0.0
    for n in (2, 9, 500):
        assert pi_plus_exact(n, n - 1, 1.0) == pytest.approx(1.0, abs=1e-15)
        assert pi_plus_exact(n, n // 2, 0.0) == 0.0


def test_pi_plus_rejects_t_out_of_range():
    with pytest.raises(InvalidParameter):
        pi_plus_exact(5, 5, 0.5)
    with pytest.raises(InvalidParameter):
        pi_plus_poisson(5, 7, 0.5)


@pytest.mark.parametrize("n", [1, 2, 5, 11, 20])
def test_pi_plus_matches_rational_enumeration(n):
    for t in range(n):
        for p in (0.05, 0.3, 0.5, 0.77, 0.95):
            assert abs(pi_plus_exact(n, t, p) - oracle.exact_pi_plus_enumeration(n, t, p)) <= 1e-12


def test_pi_plus_large_n_against_scipy():
    n, p = 10**5, 2e-5
    for t in (10, 5000, 60000, 99999):
        x = stats.binom(t, p)
        y = stats.binom(n - 1 - t, p)
        ks = np.arange(1, 80)
        ref = float(np.sum(x.pmf(ks) * y.cdf(ks)))
        assert pi_plus_exact(n, t, p) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("n,t,p", [(1000, 300, 0.002), (10**4, 3000, 2e-4)])
def test_poisson_examples(n, t, p):
    assert abs(pi_plus_poisson(n, t, p) - pi_plus_exact(n, t, p)) <= 10 * p


@pytest.mark.parametrize("n", [50, 200, 1000])
@pytest.mark.parametrize("c", [0.1, 1.0, 2.5, 5.0])
def test_poisson_envelope_on_grids(n, c):
    p = c / n
    for t in np.linspace(0, n - 1, 41).astype(int).tolist():
        assert abs(pi_plus_poisson(n, t, p) - pi_plus_exact(n, t, p)) <= 10 * p


@pytest.mark.parametrize("n,p", [(30, 0.1), (200, 0.01), (1000, 0.004), (40, 0.6)])
def test_pi_plus_monotone_and_below_first_mark(n, p):
    vals = [pi_plus_exact(n, t, p) for t in range(n)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    assert all(v <= pi_upper_first_mark(n, t, p) + 1e-15 for t, v in enumerate(vals))


def test_first_mark_examples():
    assert pi_upper_first_mark(10, 0, 0.4) == 0.0
    assert pi_upper_first_mark(10, 3, 1.0) == 1.0
    v = pi_upper_first_mark(1000, 100, 1e-3)
    assert v == pytest.approx(1 - 0.999**100, rel=1e-13)
    assert v == pytest.approx(oracle.exact_binomial_tail(100, 1e-3, lo=1), rel=1e-12)
    assert v == pytest.approx(0.09521, abs=1e-5)


@given(st.integers(0, 3000), st.floats(0, 1))
def test_binom_pmf_sums_to_one(m, p):
    lo, w = binom_pmf(m, p)
    assert 0 <= lo <= m and lo + len(w) - 1 <= m
    assert abs(math.fsum(w) - 1.0) < 1e-12


# ---- g and the subcritical bound ----

def test_g_examples():
    assert g_of_c(0) == 0.0
    assert g_of_c(1) == pytest.approx(2 / math.e, rel=1e-15)
    assert g_of_c(PHI) < 0.84


def test_g_maximum_location():
    cs = np.arange(0, 10 + 1e-12, 1e-4)
    vals = np.array([g_of_c(c) for c in cs])
    assert vals.max() < 0.84
    assert abs(cs[vals.argmax()] - PHI) < 1e-3


def test_subcritical_bound_examples():
    assert subcritical_bound(100, 1) == pytest.approx(100 / (1 - 2 / math.e))
    assert subcritical_bound(100, 1) == pytest.approx(378.5, abs=0.1)
    assert subcritical_bound(0, 3.3) == 0.0
    assert subcritical_bound(50, 1e-12) == pytest.approx(50)


# ---- f and x0 ----

def _f_oracle(xs, n, c, theta):
    # direct Poisson pmf/cdf products, independent of the library's series
    xs = np.asarray(xs)[:, None]
    ks = np.arange(1, 120)[None, :]
    terms = stats.poisson.pmf(ks, c * xs) * stats.poisson.cdf(ks, c * (1 - xs))
    terms = np.where(ks <= np.floor(xs * n + 1e-9), terms, 0.0)
    return theta - xs[:, 0] + (1 - theta) * math.exp(c / n) * terms.sum(axis=1)


@given(st.integers(100, 10**5), st.floats(0.5, 5), st.floats(0.05, 0.95), st.floats(0, 1))
def test_f_against_oracle_and_endpoints(n, c, theta, x):
    prm = AnalyticParams.from_c(n, c, theta)
    assert f_c_theta(0.0, prm) == theta
    # at x = 1 only j = 0 survives: f(1) = (1-theta)(e^p (1 - e^-c) - 1) up to the
    # Poisson tail beyond n, so it is negative exactly when e^p (1 - e^-c) < 1
    closed = (1 - theta) * (math.exp(c / n) * -math.expm1(-c) - 1)
    assert f_c_theta(1.0, prm) == pytest.approx(closed, abs=1e-12)
    if n >= 1000:
        assert f_c_theta(1.0, prm) < 0
    assert f_c_theta(theta, prm) > 0
    assert f_c_theta(x, prm) == pytest.approx(float(_f_oracle([x], n, c, theta)[0]), abs=1e-12)


def test_f_at_one_can_be_positive_for_small_n():
    # e^p overshoots 1/(1 - e^-c) when p > ~e^-c
    assert f_c_theta(1.0, AnalyticParams.from_c(100, 4.0, 0.5)) > 0
    assert f_c_theta(1.0, AnalyticParams.from_c(100, 4.0, 0.5), limit=True) < 0


def test_f_rejects_x_outside_unit_interval():
    with pytest.raises(InvalidParameter):
        f_c_theta(1.2, AnalyticParams(100, 0.01, 0.2))


def test_x0_small_c_limit():
    r = find_x0(AnalyticParams.from_c(10**4, 1e-9, 0.3), limit=True)
    assert r.sign_change and r.x0 == pytest.approx(0.3, abs=1e-6)


def test_x0_against_fine_grid():
    n, c, theta = 10**4, 2.0, 0.3
    r = find_x0(AnalyticParams.from_c(n, c, theta))
    assert r.sign_change and 0.3 < r.x0 < 1
    xs = np.arange(theta, 1.0, 1e-6)
    vals = np.concatenate([_f_oracle(chunk, n, c, theta) for chunk in np.array_split(xs, 70)])
    first = int(np.argmax(vals < 0))
    assert vals[first] < 0 and np.all(vals[:first] >= 0)
    assert xs[first - 1] - 1e-9 <= r.x0 <= xs[first] + 1e-9


@given(st.floats(0.5, 5), st.floats(0.05, 0.95))
def test_root_result_invariants(c, theta):
    prm = AnalyticParams.from_c(10**4, c, theta)
    r = find_x0(prm)
    assert r.x0 is not None and r.x0 >= theta
    if r.sign_change:
        lo, hi = r.bracket
        assert f_c_theta(lo, prm) >= 0 > f_c_theta(hi, prm)
        assert hi - lo <= 1e-9
    else:
        assert r.double_root_suspected


def test_find_x0_guards():
    prm = AnalyticParams(100, 0.02, 0.3)
    with pytest.raises(InvalidParameter):
        find_x0(prm, grid_step=0.05)
    with pytest.raises(InvalidParameter):
        find_x0(prm, grid_step=1e-3, tol=1e-3)


def test_touching_root_is_flagged(monkeypatch):
    # f(x) = (x - 0.5)^2 touches zero at 0.5 and turns negative only after 0.9
    import bootperc.analytics as an
    monkeypatch.setattr(an, "f_c_theta",
                        lambda x, prm, limit=False: (x - 0.5) ** 2 if x < 0.9 else -1.0)
    r = an.find_x0(AnalyticParams(100, 0.02, 0.2), grid_step=1e-3)
    assert not r.sign_change and r.double_root_suspected
    assert r.x0 == pytest.approx(0.5, abs=1e-3)


def test_negative_start_is_inconsistent(monkeypatch):
    import bootperc.analytics as an
    monkeypatch.setattr(an, "f_c_theta", lambda x, prm, limit=False: -1.0)
    with pytest.raises(InconsistentParameters):
        an.find_x0(AnalyticParams(100, 0.02, 0.2))


# ---- tail bounds ----

def test_chernoff_examples():
    assert chernoff_upper(10, 0) == 1.0 == chernoff_lower(10, 0)
    assert chernoff_lower(10, 10) == pytest.approx(math.exp(-5))
    assert oracle.exact_binomial_tail(1000, 0.01, hi=0) == pytest.approx(4.317e-5, rel=1e-3)
    assert oracle.exact_binomial_tail(1000, 0.01, hi=0) <= chernoff_lower(10, 10)
    assert oracle.exact_binomial_tail(1000, 0.01, lo=20) <= chernoff_upper(10, 10)


@given(st.floats(0, 1e4), st.floats(0, 1e3), st.floats(0, 1e3))
def test_chernoff_shape(mean, z1, z2):
    lo, hi = sorted((z1, z2))
    assert 0 <= chernoff_upper(mean, hi) <= chernoff_upper(mean, lo) <= 1
    assert 0 <= chernoff_lower(mean, hi) <= chernoff_lower(mean, lo) <= 1


def test_chernoff_dominates_exact_tails():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m = int(rng.integers(5, 400))
        p = float(rng.uniform(0.01, 0.9))
        mean = m * p
        z = float(rng.uniform(0, 3 * math.sqrt(mean) + 1))
        upper = oracle.exact_binomial_tail(m, p, lo=math.ceil(mean + z))
        lower = oracle.exact_binomial_tail(m, p, hi=math.floor(mean - z))
        assert upper <= chernoff_upper(mean, z) * (1 + 1e-12)
        assert lower <= chernoff_lower(mean, z) * (1 + 1e-12)


def test_delta_bound_examples():
    n, p = 10**6, 0.01
    for w in (1.0, 1.5, 2.0):
        t = n / 2 + math.sqrt(n / p) * w
        assert delta_upper_bound(n, p, t) == pytest.approx(2 * math.exp(-w * w), rel=1e-9)
    assert delta_upper_bound(10**4, 0.02, 5500) == 1.0
    with pytest.raises(InvalidParameter):
        delta_upper_bound(100, 0.1, 50)


def test_expected_remainder_bound():
    n, p = 10**4, 0.05
    a0 = n / 2 + 2 * math.sqrt(n / p)
    assert expected_R_bound(n, p, a0) == pytest.approx(2 * n * math.exp(-2))


# ---- regimes ----

def test_classify_examples():
    r = classify_regime(AnalyticParams(10**5, 1e-7), 1000)
    assert r.tag == SPARSE_SUBCRITICAL and r.prediction == "A* ≈ A0"
    r = classify_regime(AnalyticParams.from_c(10**4, 2.0), 3000)
    assert r.tag == CRITICAL_WINDOW and "0.3" in r.prediction
    assert r.bound == pytest.approx(find_x0(AnalyticParams.from_c(10**4, 2.0, 0.3)).x0)
    n = 2 * 10**4
    r = classify_regime(AnalyticParams.from_c(n, 200.0), int(0.55 * n))
    assert r.tag == DENSE_SUPERCRITICAL and r.prediction == "A* = n - o(n)"
    r = classify_regime(AnalyticParams.from_c(n, 200.0), int(0.3 * n))
    assert r.tag == DENSE_SUBCRITICAL


def test_thresholds_are_configurable():
    prm = AnalyticParams(10**5, 1e-7)
    assert classify_regime(prm, 1000, RegimeThresholds(sparse_c=0.001)).tag == CRITICAL_WINDOW


def test_params_validation():
    assert AnalyticParams.from_c(1000, 2.0).p == pytest.approx(0.002)
    assert AnalyticParams(1000, 0.002).c == pytest.approx(2.0)
    for bad in (dict(n=0, p=0.1), dict(n=5, p=1.5), dict(n=5, p=0.1, theta=2.0),
                dict(n=5, p=0.1, alpha=1.0)):
        with pytest.raises(InvalidParameter):
            AnalyticParams(**bad)


@pytest.mark.parametrize("n", [200, 2000])
@pytest.mark.parametrize("c", [5, 50, 150])
def test_delta_bound_dominates_exact_failure_probability(n, c):
    # delta(t) = P{X < max(Y, 1)}, summed directly so it is not lost to 1 - pi cancellation
    p = c / n
    for t in range(n // 2 + 1, n, max(1, n // 100)):
        m = n - 1 - t
        ys = np.arange(m + 1)
        delta = float(np.sum(stats.binom.pmf(ys, m, p) * stats.binom.cdf(np.maximum(ys, 1) - 1, t, p)))
        assert delta <= delta_upper_bound(n, p, t) * (1 + 1e-9)
