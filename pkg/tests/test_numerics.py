import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from shtarkov.numerics import (
    BOTTOM,
    log_add,
    log_factorial,
    log_factorial_array,
    log_poisson_pmf,
    log_poisson_pmf_array,
    log_sum_exp,
    poisson_cdf,
    poisson_sf,
    poisson_tail_bound,
    stirling_log_factorial_bracket,
    to_bits,
)


def test_log_sum_exp_edge_cases():
    assert log_sum_exp([]) == BOTTOM
    assert log_sum_exp([BOTTOM]) == BOTTOM
    assert log_sum_exp([BOTTOM, BOTTOM]) == BOTTOM
    assert log_sum_exp([0.7]) == 0.7
    assert log_sum_exp([BOTTOM, 1.5]) == 1.5
    assert log_sum_exp([math.log(2), math.log(3)]) == pytest.approx(math.log(5), rel=1e-15)
    assert log_sum_exp([1000.0, 1000.0]) == pytest.approx(1000 + math.log(2))


def test_log_add():
    assert log_add(BOTTOM, BOTTOM) == BOTTOM
    assert log_add(BOTTOM, 2.0) == 2.0
    assert log_add(math.log(0.25), math.log(0.75)) == pytest.approx(0.0, abs=1e-16)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=40), st.randoms(use_true_random=False))
def test_log_sum_exp_permutation_invariant(xs, rnd):
    a = log_sum_exp(xs)
    ys = list(xs)
    rnd.shuffle(ys)
    b = log_sum_exp(ys)
    assert abs(a - b) <= 1e-13 * max(1.0, abs(a))


def test_to_bits():
    assert to_bits(math.log(8)) == pytest.approx(3.0, rel=1e-15)
    assert to_bits(BOTTOM) == BOTTOM


def test_log_factorial_small_values():
    assert log_factorial(0) == 0.0
    assert log_factorial(1) == 0.0
    assert log_factorial(5) == pytest.approx(math.log(120), rel=1e-15)
    assert log_factorial(20) == pytest.approx(math.log(math.factorial(20)), rel=1e-15)


def test_log_factorial_50_stirling_window():
    v = log_factorial(50)
    stirling = 0.5 * math.log(2 * math.pi * 50) + 50 * math.log(50 / math.e)
    assert 1 / 601 < v - stirling < 1 / 600


@pytest.mark.parametrize("i", [0, 1, 7, 255, 256, 257, 1000, 10**6])
def test_log_factorial_matches_lgamma(i):
    assert log_factorial(i) == pytest.approx(math.lgamma(i + 1), rel=1e-14, abs=1e-14)


def test_log_factorial_array_agrees_with_scalar():
    idx = np.array([0, 3, 256, 257, 5000])
    out = log_factorial_array(idx)
    for i, v in zip(idx, out):
        assert v == pytest.approx(log_factorial(int(i)), rel=1e-14, abs=1e-14)


def test_stirling_bracket_holds_up_to_1e4():
    for n in range(1, 10**4 + 1):
        lo, hi = stirling_log_factorial_bracket(n)
        v = log_factorial(n)
        assert lo <= v + 1e-12 * v and v <= hi + 1e-12 * v


def _mp_log_pmf(lam, i):
    with mpmath.workdps(40):
        return float(-mpmath.mpf(lam) + i * mpmath.log(lam) - mpmath.loggamma(i + 1))


@pytest.mark.parametrize("lam", [1e-300, 0.3, 2.5, 40.0, 1e4, 2e5, 3e7])
def test_poisson_pmf_against_mpmath(lam):
    for i in sorted({0, 1, 5, 9, 10, 11, int(lam / 2), int(lam), int(lam) + 17, int(lam + 5 * math.sqrt(lam))}):
        exact = _mp_log_pmf(lam, i)
        tol = 1e-13 * max(1.0, abs(exact))
        assert abs(log_poisson_pmf(lam, i) - exact) <= tol
        assert abs(log_poisson_pmf_array(lam, np.array([i]))[0] - exact) <= tol


def test_poisson_pmf_edge_values():
    assert log_poisson_pmf(0.0, 0) == 0.0
    assert log_poisson_pmf(0.0, 3) == BOTTOM
    arr = log_poisson_pmf_array(3.0, np.arange(6))
    assert np.allclose(arr, stats.poisson.logpmf(np.arange(6), 3.0), rtol=1e-13)


def test_poisson_cdf_examples():
    assert poisson_cdf(2.5, 2) == pytest.approx(math.log(0.5438131), abs=2e-7)
    exact = math.exp(-2.5) * (1 + 2.5 + 3.125)
    assert math.exp(poisson_cdf(2.5, 2)) == pytest.approx(exact, rel=1e-14)
    assert poisson_cdf(0.0, 0) == 0.0
    for lam in (0.5, 7.0, 300.0):
        assert abs(poisson_cdf(lam, int(lam + 60 * math.sqrt(lam) + 60))) <= 1e-14


@pytest.mark.parametrize("lam", [0.01, 0.7, 3.0, 25.0, 400.0, 5000.0, 2e5])
def test_poisson_cdf_and_sf_against_incomplete_gamma(lam):
    for m in sorted({0, 1, int(lam / 2), int(lam), int(lam + 3 * math.sqrt(lam))}):
        with mpmath.workdps(60):
            upper_gamma = mpmath.gammainc(m + 1, lam, mpmath.inf, regularized=True)
            cdf, sf = float(upper_gamma), float(1 - upper_gamma)
        assert math.exp(poisson_cdf(lam, m)) == pytest.approx(cdf, rel=1e-11)
        assert math.exp(poisson_sf(lam, m)) == pytest.approx(sf, rel=1e-11)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 60.0), st.integers(0, 120))
def test_cdf_equals_log_sum_exp_of_pmf(lam, m):
    direct = log_sum_exp([log_poisson_pmf(lam, i) for i in range(m + 1)])
    assert abs(poisson_cdf(lam, m) - direct) <= 1e-12 * max(1.0, abs(direct))


def test_tail_bound_examples():
    assert poisson_tail_bound(1.0, 1.0) == 1.0
    assert poisson_tail_bound(1.0, 2.0) == pytest.approx(math.exp(-0.25), rel=1e-15)
    assert poisson_tail_bound(4.0, 2.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    with pytest.raises(ValueError):
        poisson_tail_bound(1.0, -0.5)


def test_tail_bound_dominates_exact_tails_on_grid():
    for lam in (0.5, 1.0, 5.0, 20.0):
        for x in range(0, int(lam + 10 * math.sqrt(lam)) + 1):
            if x >= lam:
                exact = stats.poisson.sf(x - 1, lam)
            else:
                exact = stats.poisson.cdf(x, lam)
            bound = poisson_tail_bound(lam, x)
            assert 0 < bound <= 1
            assert exact <= bound


def test_negative_lambda_rejected():
    with pytest.raises(ValueError):
        log_poisson_pmf(-1.0, 0)
    with pytest.raises(ValueError):
        poisson_cdf(float("nan"), 2)


