"""I.i.d. sources over a small alphabet ``[k]``.

Dropping the last count of a type is a bijection at fixed length, so the
redundancy equals that of ``k-1`` counts.  Under Poisson sampling those
counts are independent Poissons with means at most ``n``, which gives the
upper chain ``(k-1) R(Poi <= n) + 1``.  The matching lower chain is only
asymptotically justified and is reported as advisory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .classes import RedundancyValue, count_types, enumerate_types, shtarkov_iid_types
from .poisson_class import shtarkov_bounded_poisson


@dataclass(frozen=True)
class SmallAlphabetQuery:
    k: int
    n: int

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ValueError("k and n must be positive")


@dataclass(frozen=True)
class ChainBound:
    bits: float
    n_prime: float
    advisory: bool = True


def iid_upper_bound(q: SmallAlphabetQuery) -> float:
    return (q.k - 1) * shtarkov_bounded_poisson(q.n).bits + 1.0


def iid_lower_chain(q: SmallAlphabetQuery) -> ChainBound | None:
    """``(k-1) R(Poi <= n'/(k-1))`` with ``n' = n - n^(3/4) k^(1/4) log2 n``.

    ``None`` when ``n' <= 0`` (up to rounding).  Always advisory: the transfer step needs
    ``R < n/16`` at length ``n``, which is not checked here.
    """
    if q.k < 2:
        raise ValueError("the lower chain needs k >= 2")
    n_prime = q.n - q.n**0.75 * q.k**0.25 * math.log2(q.n)
    # relative guard: n' = 0 exactly can come out as a rounding residue
    if n_prime <= 1e-12 * q.n:
        return None
    bits = (q.k - 1) * shtarkov_bounded_poisson(n_prime / (q.k - 1)).bits
    return ChainBound(bits, n_prime)


def iid_exact(q: SmallAlphabetQuery, budget: int | None = None) -> RedundancyValue:
    return shtarkov_iid_types(q.k, q.n, budget=budget)


def abbreviated_type_count(k: int, n: int) -> int:
    """Number of distinct ``(m_1..m_{k-1})`` obtained by dropping the last
    count from every type of length ``n``."""
    return len({t.counts[:-1] for t in enumerate_types(n, k)})


def full_type_count(k: int, n: int) -> int:
    return count_types(n, k)
