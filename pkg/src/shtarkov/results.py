"""Result records shared by the bound computations."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .numerics import LN2


@dataclass(frozen=True)
class RedundancyInterval:
    """Lower and upper redundancy in bits.

    ``truncation_bits`` is the certified slack from cutting an infinite sum,
    already folded into ``upper_bits``.  ``asymptotic`` marks closed forms
    whose finite-``n`` validity is not certified.
    """

    lower_bits: float
    upper_bits: float
    truncation_bits: float = 0.0
    asymptotic: bool = False
    note: str = ""

    def __post_init__(self):
        if self.truncation_bits < 0:
            raise ValueError("truncation slack cannot be negative")
        if self.lower_bits > self.upper_bits + 1e-12 * max(1.0, abs(self.upper_bits)):
            raise ValueError(f"inverted interval [{self.lower_bits}, {self.upper_bits}]")

    @property
    def gap_bits(self) -> float:
        return self.upper_bits - self.lower_bits

    def contains(self, bits: float, slack: float = 0.0) -> bool:
        return self.lower_bits - slack <= bits <= self.upper_bits + slack

    def as_dict(self, nats: bool = False) -> dict:
        d = asdict(self)
        if nats:
            for key in ("lower_bits", "upper_bits", "truncation_bits"):
                d[key] = d[key] * LN2
        return d


def finite_or_none(x: float):
    return x if math.isfinite(x) else None
