"""The class of Poisson distributions whose mean is at most ``upper``.

For symbol ``i`` the largest probability in the class comes from mean ``i``
while ``i <= upper`` and from mean ``upper`` afterwards, so

    S = sum_{i <= floor(upper)} e^-i i^i / i!  +  P(Poi(upper) > floor(upper)).

The second term is a complementary CDF, evaluated exactly rather than by
truncating a series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classes import RedundancyValue
from .results import RedundancyInterval
from .numerics import _DEVIANCE_MIN, LOG2E, _stirling_correction, log_factorial_array, poisson_sf, to_bits

# beyond this mean the diagonal sum is bracketed with Stirling's remainder
STIRLING_THRESHOLD = 10**7
_CHUNK = 1 << 20


@dataclass(frozen=True)
class BoundedPoissonClass:
    upper: float

    def __post_init__(self):
        upper = float(self.upper)
        if not math.isfinite(upper) or upper < 0:
            raise ValueError(f"mean cap must be finite and >= 0, got {self.upper}")
        object.__setattr__(self, "upper", upper)


def _as_class(c) -> BoundedPoissonClass:
    return c if isinstance(c, BoundedPoissonClass) else BoundedPoissonClass(c)


def _diagonal_sum(top: int) -> float:
    """``sum_{i=0}^{top} e^-i i^i / i!`` (the ``i = 0`` term is 1).

    Each term equals ``e^-theta(i) / sqrt(2 pi i)`` with ``theta`` the
    Stirling correction, which avoids cancelling ``i log i`` against
    ``log i!``.
    """
    parts = [1.0]
    for lo in range(1, top + 1, _CHUNK):
        i = np.arange(lo, min(top, lo + _CHUNK - 1) + 1, dtype=np.int64)
        small = i < _DEVIANCE_MIN
        logs = np.empty(i.shape)
        logs[small] = i[small] * (np.log(i[small]) - 1.0) - log_factorial_array(i[small])
        big = i[~small].astype(float)
        logs[~small] = -_stirling_correction(big) - 0.5 * np.log(2.0 * math.pi * big)
        parts.append(math.fsum(np.exp(logs)))
    return math.fsum(parts)


def _power_sum_bracket(s: float, a: int, b: int) -> tuple[float, float]:
    """Bracket on ``sum_{a<i<=b} i^-s`` for ``s > 0``: trapezoid below and
    midpoint above, both valid because the summand is convex."""
    def integral(x0, x1):
        if s == 1.0:
            return math.log(x1 / x0)
        return (x1 ** (1 - s) - x0 ** (1 - s)) / (1 - s)

    if b <= a:
        return 0.0, 0.0
    lo = integral(a + 1, b) + 0.5 * ((a + 1) ** -s + b ** -s)
    hi = integral(a + 0.5, b + 0.5)
    return lo, hi


def _diagonal_sum_bracket(top: int, exact_upto: int) -> tuple[float, float]:
    """Bracket on the diagonal sum from the Stirling remainder bounds.

    Each term equals ``e^-theta_i / sqrt(2 pi i)`` with
    ``1/(12i+1) < theta_i < 1/(12i)``.  From ``1 - x <= e^-x <= 1 - x + x^2/2``
    the term lies between ``g (1 - 1/(12i))`` and
    ``g (1 - 1/(12i) + 1/(96 i^2))`` with ``g = 1/sqrt(2 pi i)``; the power
    sums are then bracketed by integral comparison.
    """
    head = _diagonal_sum(exact_upto)
    a, b = exact_upto, top
    h_lo, h_hi = _power_sum_bracket(0.5, a, b)
    t_lo, t_hi = _power_sum_bracket(1.5, a, b)
    _, f_hi = _power_sum_bracket(2.5, a, b)
    norm = 1.0 / math.sqrt(2.0 * math.pi)
    lo = head + norm * (h_lo - t_hi / 12.0)
    hi = head + norm * (h_hi - t_lo / 12.0 + f_hi / 96.0)
    return lo, hi


def _log_shtarkov_exact(upper: float) -> float:
    if upper < 1.0:
        # 2 - e^-L, written to keep full precision for tiny L
        return math.log1p(-math.expm1(-upper))
    top = int(math.floor(upper))
    tail = math.exp(poisson_sf(upper, top))
    return math.log(_diagonal_sum(top) + tail)


def shtarkov_bounded_poisson(c) -> RedundancyValue:
    """Exact Shtarkov sum of the bounded-Poisson class (cost linear in the cap)."""
    c = _as_class(c)
    if c.upper == 0.0:
        return RedundancyValue(0.0)
    return RedundancyValue(_log_shtarkov_exact(c.upper))


def bounded_poisson_log_bracket(upper: float) -> tuple[float, float]:
    """``(ln S_lo, ln S_hi)``; degenerate unless ``upper`` exceeds
    ``STIRLING_THRESHOLD``, where the diagonal sum is bracketed instead."""
    c = _as_class(upper)
    if c.upper <= STIRLING_THRESHOLD:
        v = 0.0 if c.upper == 0.0 else _log_shtarkov_exact(c.upper)
        return v, v
    top = int(math.floor(c.upper))
    tail = math.exp(poisson_sf(c.upper, top))
    lo, hi = _diagonal_sum_bracket(top, STIRLING_THRESHOLD)
    return math.log(lo + tail), math.log(hi + tail)


def bounded_poisson_bits_many(uppers) -> np.ndarray:
    """Exact redundancies (bits) for an array of caps; caps below 1 use the
    closed form ``log2(2 - e^-L)`` in one vectorised pass."""
    lam = np.asarray(uppers, dtype=float)
    out = np.empty_like(lam)
    small = lam < 1.0
    out[small] = np.log1p(-np.expm1(-lam[small])) * LOG2E
    for j in np.flatnonzero(~small):
        out[j] = to_bits(_log_shtarkov_exact(float(lam[j])))
    return out


def closed_form_bounds_bounded_poisson(c) -> RedundancyInterval:
    """Closed-form bracket on the redundancy, in bits.

    Caps at most 1 have the exact value ``log2(2 - e^-L)``, which is reported
    as both ends; the weaker ``L log2 e`` cap is carried in ``note``.  Larger
    caps get ``log2 sqrt((2L+2)/pi) <= R <= log2(sqrt(2L/pi) + 2)``.
    """
    c = _as_class(c)
    lam = c.upper
    if lam <= 1.0:
        exact = math.log1p(-math.expm1(-lam)) * LOG2E
        return RedundancyInterval(exact, exact, 0.0, note=f"cap {lam * LOG2E:.7g}")
    lower = 0.5 * math.log2((2.0 * lam + 2.0) / math.pi)
    upper = math.log2(math.sqrt(2.0 * lam / math.pi) + 2.0)
    return RedundancyInterval(lower, upper, 0.0)


def linear_cap_bits(upper: float) -> float:
    """``L log2 e``: the simple upper bound valid for every cap ``L``."""
    return _as_class(upper).upper * LOG2E
