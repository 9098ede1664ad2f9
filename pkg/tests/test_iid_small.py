import math

import pytest

from shtarkov.classes import shtarkov_iid_types
from shtarkov.iid_small import (
    SmallAlphabetQuery,
    abbreviated_type_count,
    full_type_count,
    iid_exact,
    iid_lower_chain,
    iid_upper_bound,
)
from shtarkov.poisson_class import shtarkov_bounded_poisson


def test_query_validation():
    for k, n in ((0, 3), (2, 0), (-1, 1)):
        with pytest.raises(ValueError):
            SmallAlphabetQuery(k, n)


def test_upper_examples():
    assert iid_upper_bound(SmallAlphabetQuery(1, 50)) == 1.0
    assert iid_upper_bound(SmallAlphabetQuery(2, 2)) == pytest.approx(1.9722, abs=1e-4)
    assert iid_upper_bound(SmallAlphabetQuery(2, 2)) == pytest.approx(shtarkov_bounded_poisson(2).bits + 1, rel=1e-15)
    q = SmallAlphabetQuery(3, 10)
    assert iid_upper_bound(q) == pytest.approx(2 * shtarkov_bounded_poisson(10).bits + 1, rel=1e-15)
    assert iid_exact(q).bits <= iid_upper_bound(q)


def test_exact_examples():
    assert iid_exact(SmallAlphabetQuery(1, 5)).bits == pytest.approx(0.0, abs=1e-15)
    assert iid_exact(SmallAlphabetQuery(2, 2)).bits == pytest.approx(1.3219281, abs=1e-7)
    assert iid_exact(SmallAlphabetQuery(2, 3)).bits == pytest.approx(math.log2(2 + 8 / 9), rel=1e-14)
    assert iid_exact(SmallAlphabetQuery(2, 3)).bits == pytest.approx(1.5305, abs=1e-4)
    assert iid_exact(SmallAlphabetQuery(3, 2)).bits == pytest.approx(math.log2(4.5), rel=1e-14)
    assert iid_exact(SmallAlphabetQuery(3, 2)).bits == pytest.approx(2.1699, abs=1e-4)


def test_upper_chain_exhaustive():
    for k in range(1, 5):
        for n in range(1, 11):
            q = SmallAlphabetQuery(k, n)
            assert iid_exact(q).bits <= iid_upper_bound(q) + 1e-10


def test_lower_chain():
    assert iid_lower_chain(SmallAlphabetQuery(2, 10)) is None
    with pytest.raises(ValueError):
        iid_lower_chain(SmallAlphabetQuery(1, 100))
    for k in (2, 3):
        r = iid_lower_chain(SmallAlphabetQuery(k, 10**6))
        assert r is not None and r.advisory
        assert r.n_prime == pytest.approx(1e6 - 1e6**0.75 * k**0.25 * math.log2(1e6))
        assert 0 < r.bits < iid_upper_bound(SmallAlphabetQuery(k, 10**6))
    r = iid_lower_chain(SmallAlphabetQuery(3, 10**6))
    assert r.bits == pytest.approx(2 * shtarkov_bounded_poisson(r.n_prime / 2).bits, rel=1e-14)


def test_growth_trend_k3():
    # (k-1)/2 log2 n up to a bounded offset
    for n in (100, 400, 1600, 6400):
        bits = shtarkov_iid_types(3, n).bits
        assert abs(bits - math.log2(n)) <= 2.0


def test_abbreviated_types_are_a_bijection():
    for k in range(1, 5):
        for n in range(0, 9):
            assert abbreviated_type_count(k, n) == full_type_count(k, n) == math.comb(n + k - 1, k - 1)
