import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from shtarkov.classes import FiniteClass, FiniteDistribution, shtarkov_iid_types
from shtarkov.poissonization import (
    IidFamily,
    PoissonizedClassHandle,
    UnusableBracket,
    fixed_upper_from_poisson,
    poisson_lower_from_fixed,
    poisson_type_redundancy_check,
    poissonized_shtarkov,
    verify_conditional_length,
    verify_multiplicity_independence,
)

SINGLETON = FiniteClass.from_rows([(0.3, 0.7)])


def mp_poissonized_iid(k, n):
    """High-precision Poisson mixture of the per-length sums, the latter from
    the multinomial recurrence (independent of the type enumerator)."""
    # S(D_k^m) <= k^m, so past this length the mixture tail is below 1e-20
    top = int(n * k + 12 * math.sqrt(n * k) + 40)
    with mpmath.workdps(30):
        def c(kk, m):
            if m == 0:
                return mpmath.mpf(1)
            c1 = mpmath.mpf(1)
            c2 = mpmath.fsum(mpmath.binomial(m, h) * mpmath.mpf(h / m) ** h * mpmath.mpf((m - h) / m) ** (m - h)
                             for h in range(m + 1))
            cs = [None, c1, c2]
            for j in range(1, kk - 1):
                cs.append(cs[j + 1] + mpmath.mpf(m) / j * cs[j])
            return cs[kk]
        n = mpmath.mpf(n)
        return float(mpmath.fsum(mpmath.exp(-n) * n**m / mpmath.factorial(m) * c(k, m) for m in range(top)))


def test_handle_validation():
    with pytest.raises(ValueError):
        PoissonizedClassHandle(IidFamily(2), 0)
    with pytest.raises(ValueError):
        PoissonizedClassHandle(IidFamily(2), math.inf)
    with pytest.raises(ValueError):
        IidFamily(0)


@pytest.mark.parametrize("n", [0.3, 1.0, 7.5])
def test_singleton_class_is_one(n):
    b = poissonized_shtarkov(PoissonizedClassHandle(SINGLETON, n))
    assert b.s_lower <= 1.0 + 1e-12 and b.s_upper >= 1.0 - 1e-12
    assert b.s_upper - b.s_lower <= 1e-8


def test_d2_at_two_examples():
    h = PoissonizedClassHandle(IidFamily(2), 2.0)
    b = poissonized_shtarkov(h, n_max=4, tol=math.inf)
    explicit = math.exp(-2) * (1 + 2 * 2 + 2 * 2.5 + (4 / 3) * (2 + 8 / 9) + (2 / 3) * 3.21875)
    assert b.s_lower == pytest.approx(explicit, rel=1e-12)
    assert b.s_lower >= 2.165 - 1e-3
    full = poissonized_shtarkov(h)
    assert full.s_lower >= shtarkov_iid_types(2, 2).shtarkov / 2 == 1.25


@pytest.mark.parametrize("k,n", [(2, 2.0), (2, 10.0), (3, 4.0), (3, 15.0), (4, 6.5)])
def test_bracket_contains_high_precision_value(k, n):
    b = poissonized_shtarkov(PoissonizedClassHandle(IidFamily(k), n), tol=1e-10)
    exact = mp_poissonized_iid(k, n)
    assert b.s_lower <= exact * (1 + 1e-13)
    assert exact * (1 - 1e-13) <= b.s_upper


def test_unusable_bracket():
    with pytest.raises(UnusableBracket):
        poissonized_shtarkov(PoissonizedClassHandle(IidFamily(3), 10.0), n_max=5, tol=1e-8)


def test_bracket_tightens_with_cutoff():
    h = PoissonizedClassHandle(IidFamily(3), 3.0)
    prev = None
    for n_max in range(0, 45):
        b = poissonized_shtarkov(h, n_max=n_max, tol=math.inf)
        if prev is not None:
            assert b.s_lower >= prev.s_lower
            assert b.s_upper <= prev.s_upper
        prev = b


def test_residual_certificate():
    for k, n in ((2, 2.0), (3, 6.0), (2, 12.0)):
        h = PoissonizedClassHandle(IidFamily(k), n)
        first = poissonized_shtarkov(h, tol=1e-8)
        later = poissonized_shtarkov(h, n_max=first.n_max + 5, tol=math.inf)
        assert abs(later.s_lower - first.s_lower) <= first.residual
        assert later.s_upper <= first.s_upper


def test_half_and_transfer_inequalities():
    for k in (1, 2, 3):
        for n in range(1, 16):
            fixed = shtarkov_iid_types(k, n)
            b = poissonized_shtarkov(PoissonizedClassHandle(IidFamily(k), n), tol=1e-8)
            assert b.s_lower >= fixed.shtarkov / 2
            assert fixed.bits <= b.bits_lower + 1


def test_fixed_upper_from_poisson():
    assert fixed_upper_from_poisson(PoissonizedClassHandle(SINGLETON, 3.0)) == pytest.approx(1.0, abs=1e-8)
    for n in (2, 10):
        bound = fixed_upper_from_poisson(PoissonizedClassHandle(IidFamily(2), n))
        assert bound >= shtarkov_iid_types(2, n).bits
    assert fixed_upper_from_poisson(PoissonizedClassHandle(IidFamily(2), 2)) >= 1.3219


def test_explicit_class_transfer():
    c = FiniteClass.from_rows([(0.5, 0.5), (0.9, 0.1), (0.2, 0.8)])
    from shtarkov.classes import shtarkov_class_product_power

    for n in (1, 3, 8):
        b = poissonized_shtarkov(PoissonizedClassHandle(c, n))
        fixed = shtarkov_class_product_power(c, n)
        assert b.s_lower >= fixed.shtarkov / 2
        assert fixed.bits <= b.bits_upper + 1


def test_lower_transfer_examples():
    r = poisson_lower_from_fixed(SINGLETON, 4)
    assert r is not None and r.n1 == 4 and r.bound_bits == pytest.approx(0.0, abs=1e-12) and r.holds
    r = poisson_lower_from_fixed(2, 64)
    assert r is not None and r.holds
    assert r.bound_bits < 4
    assert r.n1 == math.floor(64 - 3 * math.sqrt(64 * r.bound_bits))
    assert r.poisson_bits_upper <= r.bound_bits
    assert poisson_lower_from_fixed(2, 4) is None
    assert poisson_lower_from_fixed(2, 3) is None


def test_lower_transfer_sweep():
    for n in (64, 100, 200, 400):
        r = poisson_lower_from_fixed(2, n)
        assert r is not None and r.holds


def test_independence_examples():
    point = verify_multiplicity_independence(FiniteDistribution((1.0, 0.0)), 5.0, trials=10**4, seed=1)
    assert point.passed
    assert point.means[1] == 0 and point.variances[1] == 0
    assert point.means[0] == pytest.approx(5.0, abs=0.2)
    half = verify_multiplicity_independence(FiniteDistribution((0.5, 0.5)), 8.0, trials=10**5, seed=11)
    assert half.passed
    assert half.means == pytest.approx([4.0, 4.0], abs=0.08)
    assert abs(half.covariances[0, 1]) < 0.08
    skew = verify_multiplicity_independence(FiniteDistribution((0.9, 0.1)), 20.0, trials=10**5, seed=5)
    assert skew.passed and skew.means == pytest.approx([18.0, 2.0], abs=0.1)
    with pytest.raises(ValueError):
        verify_multiplicity_independence(FiniteDistribution((0.5, 0.5)), 8.0, trials=10)


def test_independence_is_deterministic():
    p = FiniteDistribution((0.2, 0.3, 0.5))
    a = verify_multiplicity_independence(p, 6.0, trials=5000, seed=9)
    b = verify_multiplicity_independence(p, 6.0, trials=5000, seed=9)
    assert (a.means == b.means).all() and (a.covariances == b.covariances).all()


def test_fixed_length_sampling_is_not_independent():
    # control: with the length fixed, counts are negatively correlated, and
    # the same statistic must notice
    import numpy as np

    rng = np.random.default_rng(0)
    counts = rng.multinomial(8, [0.5, 0.5], size=10**5).astype(float)
    cov = np.cov(counts, rowvar=False)[0, 1]
    se = math.sqrt(16 / 10**5)
    assert abs(cov) / se > 4


def test_conditional_length_examples():
    r = verify_conditional_length(FiniteDistribution((0.3, 0.7)), 2.0, 0)
    assert r.passed and r.instances_tested == 1
    assert verify_conditional_length(FiniteDistribution((0.5, 0.5)), 3.0, 2).passed
    r = verify_conditional_length(FiniteDistribution((2 / 3, 1 / 3)), 1.0, 2)
    assert r.passed and r.instances_tested == 4


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=4), st.floats(0.1, 20.0), st.integers(0, 5))
def test_conditional_length_property(w, n, n_prime):
    total = sum(w)
    p = FiniteDistribution(tuple(x / total for x in w[:-1]) + (1 - sum(x / total for x in w[:-1]),))
    assert verify_conditional_length(p, n, n_prime).passed


def test_poisson_type_redundancy():
    r = poisson_type_redundancy_check(1, 3.0, 6)
    assert r.passed
    for n in (2.0, 0.5):
        assert poisson_type_redundancy_check(2, n, 6).worst_violation <= 1e-10
