"""Explicit finite distribution classes and brute-force Shtarkov sums.

These engines are the ground truth the rest of the package is checked
against.  Suprema over the full simplex use the closed-form empirical
maximum-likelihood estimate; explicit classes take a plain maximum over
their members.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .numerics import BOTTOM, LN2, log_factorial, log_factorial_array, log_sum_exp

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured item budget."""


def enumeration_budget() -> int:
    """Item budget per call; ``SHTARKOV_BUDGET`` overrides the default."""
    raw = os.environ.get("SHTARKOV_BUDGET")
    if raw is None or raw.strip() == "":
        return DEFAULT_BUDGET
    return int(float(raw))


def _guard(count: int, what: str, budget: int | None) -> None:
    limit = enumeration_budget() if budget is None else budget
    if count > limit:
        raise BudgetExceeded(f"{what}: {count} items exceeds budget {limit}")


@dataclass(frozen=True)
class FiniteDistribution:
    probs: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if not probs:
            raise ValueError("distribution over an empty alphabet")
        # rounding can push a single mass a few ulps past 1
        probs = tuple(1.0 if 1.0 < p <= 1.0 + 1e-12 else p for p in probs)
        object.__setattr__(self, "probs", probs)
        if any(not (0.0 <= p <= 1.0) for p in probs):
            raise ValueError(f"probabilities must lie in [0, 1]: {probs}")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, not 1")

    @property
    def k(self) -> int:
        return len(self.probs)


@dataclass(frozen=True)
class FiniteClass:
    members: tuple[FiniteDistribution, ...]

    def __post_init__(self):
        members = tuple(
            m if isinstance(m, FiniteDistribution) else FiniteDistribution(tuple(m))
            for m in self.members
        )
        object.__setattr__(self, "members", members)
        if not members:
            raise ValueError("a class needs at least one distribution")
        sizes = {m.k for m in members}
        if len(sizes) != 1:
            raise ValueError(f"members disagree on alphabet size: {sorted(sizes)}")

    @classmethod
    def from_rows(cls, rows) -> "FiniteClass":
        return cls(tuple(FiniteDistribution(tuple(r)) for r in rows))

    @property
    def alphabet_size(self) -> int:
        return self.members[0].k

    def matrix(self) -> np.ndarray:
        """Members as rows of a ``(len(members), k)`` array."""
        return np.array([m.probs for m in self.members], dtype=float)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class TypeVector:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"negative multiplicity in {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class RedundancyValue:
    """Worst-case redundancy with its Shtarkov sum (stored as ``ln S``)."""

    shtarkov_log: float

    @property
    def bits(self) -> float:
        return self.shtarkov_log / LN2

    @property
    def shtarkov(self) -> float:
        return math.exp(self.shtarkov_log)


def shtarkov_sum_explicit(c: FiniteClass) -> RedundancyValue:
    """``S = sum_x max_P P(x)`` for an explicit single-letter class."""
    if not isinstance(c, FiniteClass) or len(c) == 0:
        raise ValueError("need a nonempty FiniteClass")
    best = c.matrix().max(axis=0)
    return RedundancyValue(math.log(math.fsum(best)))


def count_types(n: int, k: int) -> int:
    return math.comb(n + k - 1, k - 1)


def enumerate_types(n: int, k: int) -> Iterator[TypeVector]:
    """All compositions of ``n`` into ``k`` nonnegative parts, lexicographically
    descending in the first coordinate: ``(n,0,..), (n-1,1,..), ...``."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    for counts in _compositions(n, k):
        yield TypeVector(counts)


def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def ml_prob_type_full_iid(t: TypeVector) -> float:
    """``log [ multinomial(n; m) * prod (m_i/n)^m_i ]`` with ``0^0 = 1``."""
    n = t.n
    if n < 1:
        raise ValueError("type of an empty sequence has no ML probability")
    out = log_factorial(n)
    for m in t.counts:
        if m:
            out += m * math.log(m / n) - log_factorial(m)
    return out


def _per_count_terms(n: int) -> np.ndarray:
    """``m log(m/n) - log m!`` for ``m = 0..n``: one type coordinate's share."""
    m = np.arange(n + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ml = np.where(m > 0, m * np.log(np.maximum(m, 1) / n), 0.0)
    return ml - log_factorial_array(m)


def shtarkov_iid_types(k: int, n: int, budget: int | None = None) -> RedundancyValue:
    """Shtarkov sum of all i.i.d. length-``n`` sources over ``[k]``, summed
    over types.

    The last free coordinate is vectorised: for every prefix
    ``(m_1..m_{k-2})`` the pairs ``(m_{k-1}, m_k)`` are handled as one array.
    """
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    if n == 0 or k == 1:
        return RedundancyValue(0.0)
    _guard(count_types(n, k), f"types of length {n} over {k} symbols", budget)
    share = _per_count_terms(n)
    base = log_factorial(n)
    chunks = []
    for prefix in _compositions_upto(n, k - 2):
        used = sum(prefix)
        rest = n - used
        a = np.arange(rest + 1)
        head = base + sum(float(share[m]) for m in prefix)
        logs = head + share[a] + share[rest - a]
        chunks.append(math.fsum(np.exp(logs)))
    return RedundancyValue(math.log(math.fsum(chunks)))


def _compositions_upto(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Tuples of ``parts`` nonnegative integers with sum at most ``n``."""
    if parts == 0:
        yield ()
        return
    for first in range(n, -1, -1):
        for rest in _compositions_upto(n - first, parts - 1):
            yield (first,) + rest


def shtarkov_iid_sequences(k: int, n: int, budget: int | None = None) -> RedundancyValue:
    """The same sum taken over every one of the ``k**n`` sequences."""
    if k < 1 or n < 0:
        raise ValueError("need k >= 1 and n >= 0")
    if n == 0:
        return RedundancyValue(0.0)
    _guard(k**n, f"{k}^{n} sequences", budget)
    terms = []
    for seq in itertools.product(range(k), repeat=n):
        counts = np.bincount(seq, minlength=k)
        nz = counts[counts > 0]
        terms.append(float(np.sum(nz * np.log(nz / n))))
    return RedundancyValue(log_sum_exp(terms))


def shtarkov_class_product_power(c: FiniteClass, n: int, budget: int | None = None) -> RedundancyValue:
    """``S(c^n)`` over types: ``sum_t multinomial(n; t) * max_P prod p_i^t_i``."""
    if n < 0:
        raise ValueError("need n >= 0")
    if n == 0:
        return RedundancyValue(0.0)
    k = c.alphabet_size
    _guard(count_types(n, k) * len(c), f"types x members for n={n}, k={k}", budget)
    with np.errstate(divide="ignore"):
        logp = np.log(c.matrix())
    lf = log_factorial_array(np.arange(n + 1))
    terms = []
    block = []

    def flush():
        t = np.array(block, dtype=np.int64)
        # 0 * log 0 = 0: a zero count never penalises a zero probability
        with np.errstate(invalid="ignore"):
            weighted = np.where(t[:, None, :] > 0, t[:, None, :] * logp[None, :, :], 0.0)
        best = weighted.sum(axis=2).max(axis=1)
        coef = lf[n] - lf[t].sum(axis=1)
        terms.extend((coef + best).tolist())
        block.clear()

    for counts in _compositions(n, k):
        block.append(counts)
        if len(block) >= 4096:
            flush()
    if block:
        flush()
    return RedundancyValue(log_sum_exp(terms))


def product_class(cx: FiniteClass, cy: FiniteClass, budget: int | None = None) -> FiniteClass:
    """All pairwise products ``P_X x P_Y`` over the alphabet ``[k_x] x [k_y]``
    (flattened with the first coordinate major)."""
    _guard(len(cx) * len(cy), "product class members", budget)
    mx, my = cx.matrix(), cy.matrix()
    rows = [np.outer(px, py).ravel() for px in mx for py in my]
    return FiniteClass.from_rows(rows)


def simplex_grid(k: int, steps: int) -> FiniteClass:
    """All distributions over ``[k]`` whose entries are multiples of ``1/steps``."""
    rows = [np.array(t.counts, dtype=float) / steps for t in enumerate_types(steps, k)]
    return FiniteClass.from_rows(rows)


__all__ = [
    "BOTTOM",
    "BudgetExceeded",
    "FiniteClass",
    "FiniteDistribution",
    "RedundancyValue",
    "TypeVector",
    "count_types",
    "enumerate_types",
    "enumeration_budget",
    "ml_prob_type_full_iid",
    "product_class",
    "shtarkov_class_product_power",
    "shtarkov_iid_sequences",
    "shtarkov_iid_types",
    "shtarkov_sum_explicit",
    "simplex_grid",
]
