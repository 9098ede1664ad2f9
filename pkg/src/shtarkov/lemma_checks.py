"""Brute-force checks of the basic redundancy properties on small classes.

Each check returns a :class:`CheckReport` whose ``worst_violation`` is the
signed slack of the asserted relation (positive means violated).  Equalities
report the absolute difference in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classes import (
    FiniteClass,
    product_class,
    shtarkov_iid_sequences,
    shtarkov_iid_types,
    shtarkov_sum_explicit,
)

TOL = 1e-10


@dataclass
class CheckReport:
    name: str
    instances_tested: int = 0
    worst_violation: float = -math.inf
    passed: bool = True
    tolerance: float = TOL
    failures: list[str] = field(default_factory=list)

    def record(self, violation: float, instance: str = "") -> None:
        self.instances_tested += 1
        self.worst_violation = max(self.worst_violation, violation)
        if violation > self.tolerance:
            self.passed = False
            self.failures.append(f"violation {violation:.3g} on {instance}")

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.instances_tested += other.instances_tested
        self.worst_violation = max(self.worst_violation, other.worst_violation)
        self.passed = self.passed and other.passed
        self.failures.extend(other.failures)
        return self

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<34} instances={self.instances_tested:<6} worst_violation={self.worst_violation:.3e}"


def _bits(c: FiniteClass) -> float:
    return shtarkov_sum_explicit(c).bits


def random_distribution(rng: np.random.Generator, k: int) -> np.ndarray:
    """Normalised independent uniform(0, 1] coordinates."""
    x = 1.0 - rng.random(k)
    return x / x.sum()


def random_class(rng: np.random.Generator, members: int, k: int) -> FiniteClass:
    return FiniteClass.from_rows([random_distribution(rng, k) for _ in range(members)])


def check_subset(c: FiniteClass, sub: FiniteClass) -> CheckReport:
    rows = {m.probs for m in c.members}
    if any(m.probs not in rows for m in sub.members):
        raise ValueError("sub is not a subset of c")
    report = CheckReport("subset")
    report.record(_bits(sub) - _bits(c), repr(sub))
    return report


def union_class(parts: Sequence[FiniteClass]) -> FiniteClass:
    return FiniteClass(tuple(m for part in parts for m in part.members))


def check_union(parts: Sequence[FiniteClass]) -> CheckReport:
    """``max_i R(P_i) <= R(union) <= max_i R(P_i) + log2(#parts)``."""
    if not parts:
        raise ValueError("need at least one part")
    best = max(_bits(p) for p in parts)
    whole = _bits(union_class(parts))
    report = CheckReport("union")
    report.record(max(best - whole, whole - best - math.log2(len(parts))), repr(parts))
    return report


def image_class(c: FiniteClass, mapping: Sequence[int]) -> FiniteClass:
    """Push every member forward through ``mapping`` (symbol -> symbol)."""
    mapping = np.asarray(mapping, dtype=np.int64)
    if mapping.shape != (c.alphabet_size,) or mapping.min() < 0:
        raise ValueError("mapping must send every symbol to a nonnegative index")
    size = int(mapping.max()) + 1
    rows = []
    for probs in c.matrix():
        out = np.zeros(size)
        np.add.at(out, mapping, probs)
        rows.append(out)
    return FiniteClass.from_rows(rows)


def check_function(c: FiniteClass, mapping: Sequence[int]) -> CheckReport:
    """Image redundancy never exceeds the original; a bijection preserves it."""
    image = _bits(image_class(c, mapping))
    original = _bits(c)
    violation = image - original
    injective = len(set(mapping)) == len(mapping)
    if injective:
        violation = max(violation, abs(image - original))
    report = CheckReport("function_bijection" if injective else "function")
    report.record(violation, f"{c!r} via {list(mapping)}")
    return report


def marginals(c: FiniteClass, kx: int, ky: int) -> tuple[FiniteClass, FiniteClass]:
    """Marginal classes of a class over ``[kx] x [ky]`` (first coordinate major)."""
    joint = c.matrix().reshape(len(c), kx, ky)
    return FiniteClass.from_rows(joint.sum(axis=2)), FiniteClass.from_rows(joint.sum(axis=1))


def check_product(cx: FiniteClass, cy: FiniteClass, sub_rows: Sequence[int] | None = None) -> CheckReport:
    """Full product class: redundancies add exactly.  A strict subclass of the
    product stays below the sum of its own marginal redundancies."""
    prod = product_class(cx, cy)
    report = CheckReport("product")
    report.record(abs(_bits(prod) - _bits(cx) - _bits(cy)), f"{cx!r} x {cy!r}")
    if len(prod) > 1:
        keep = list(sub_rows) if sub_rows is not None else list(range(0, len(prod), 2))
        sub = FiniteClass(tuple(prod.members[j] for j in keep))
        mx, my = marginals(sub, cx.alphabet_size, cy.alphabet_size)
        report.record(_bits(sub) - _bits(mx) - _bits(my), f"subclass rows {keep}")
    return report


def check_monotone_subadditive(k: int, n_max: int) -> CheckReport:
    """Monotone in length and subadditive over every split, for the full
    i.i.d. family over ``[k]``."""
    bits = [shtarkov_iid_types(k, n).bits for n in range(n_max + 1)]
    report = CheckReport("monotone_subadditive")
    for n in range(n_max):
        report.record(bits[n] - bits[n + 1], f"monotone k={k} n={n}")
    for total in range(2, n_max + 1):
        for n1 in range(1, total // 2 + 1):
            report.record(bits[total] - bits[n1] - bits[total - n1], f"split k={k} {n1}+{total - n1}")
    return report


def check_type_equality(k: int, n_max: int) -> CheckReport:
    """Type sums and sequence sums agree (relative difference)."""
    report = CheckReport("type_equality")
    for n in range(n_max + 1):
        a = shtarkov_iid_types(k, n).shtarkov
        b = shtarkov_iid_sequences(k, n).shtarkov
        report.record(abs(a - b) / max(a, b), f"k={k} n={n}")
    return report
