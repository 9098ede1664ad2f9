"""Log-domain arithmetic and Poisson primitives.

Every probability and every Shtarkov summand lives in natural-log space as a
plain ``float``; ``BOTTOM`` (``-inf``) is the log of zero.  Conversion to bits
happens only when results are reported.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np
from scipy.special import gammaln

BOTTOM = -math.inf
LN2 = math.log(2.0)
LOG2E = 1.0 / LN2

# log i! is summed exactly (correctly rounded) up to this index, log-gamma beyond
EXACT_FACTORIAL_MAX = 256
# scalar forward recurrence below this many terms, vectorised evaluation above
_RECURRENCE_MAX = 4096
# terms further than this many standard deviations from the mean are < e^-800
_WINDOW_SIGMAS = 40.0


def _exact_log_factorials(upto: int) -> np.ndarray:
    table = np.zeros(upto + 1)
    logs = [0.0]
    for j in range(1, upto + 1):
        logs.append(math.log(j))
        table[j] = math.fsum(logs)
    return table


_LOG_FACT_TABLE = _exact_log_factorials(EXACT_FACTORIAL_MAX)


def to_bits(log_value: float) -> float:
    """Natural-log quantity expressed in bits."""
    return log_value / LN2


def log_sum_exp(terms: Iterable[float]) -> float:
    """``log(sum(exp(t)))`` with max-shift; empty input gives ``BOTTOM``.

    The shifted exponentials are added with ``math.fsum``, which is correctly
    rounded, so the result does not depend on the order of ``terms``.
    """
    arr = np.asarray(list(terms) if not isinstance(terms, np.ndarray) else terms, dtype=float)
    if arr.size == 0:
        return BOTTOM
    top = float(arr.max())
    if top == BOTTOM:
        return BOTTOM
    if math.isinf(top):
        return top
    if arr.size == 1:
        return top
    return top + math.log(math.fsum(np.exp(arr - top)))


def log_add(a: float, b: float) -> float:
    if a == BOTTOM:
        return b
    if b == BOTTOM:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def log_factorial(i: int) -> float:
    if i < 0:
        raise ValueError(f"factorial of negative integer {i}")
    if i <= EXACT_FACTORIAL_MAX:
        return float(_LOG_FACT_TABLE[i])
    return math.lgamma(i + 1.0)


def log_factorial_array(idx) -> np.ndarray:
    """Vectorised :func:`log_factorial` for an integer array."""
    idx = np.asarray(idx, dtype=np.int64)
    out = gammaln(idx + 1.0)
    small = idx <= EXACT_FACTORIAL_MAX
    if np.any(small):
        out = np.where(small, _LOG_FACT_TABLE[np.minimum(idx, EXACT_FACTORIAL_MAX)], out)
    return out


def stirling_log_factorial_bracket(n: int) -> tuple[float, float]:
    """Open bracket on ``log n!`` from Stirling's formula with remainder.

    ``n! = sqrt(2 pi n) (n/e)^n e^theta`` with ``1/(12n+1) < theta < 1/(12n)``.
    """
    if n < 1:
        raise ValueError("Stirling bracket needs n >= 1")
    base = 0.5 * math.log(2.0 * math.pi * n) + n * (math.log(n) - 1.0)
    return base + 1.0 / (12 * n + 1), base + 1.0 / (12 * n)


# log i! - [log sqrt(2 pi i) + i log i - i] as an asymptotic series; with these
# terms the truncation error is below 1e-17 from i = 10 on
_STIRLING_SERIES = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360, 1 / 156, -3617 / 122400)
_DEVIANCE_MIN = 10


def _stirling_correction(i):
    inv = 1.0 / i
    inv2 = inv * inv
    acc = 0.0
    for coef in reversed(_STIRLING_SERIES):
        acc = acc * inv2 + coef
    return acc * inv


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not math.isfinite(lam) or lam < 0:
        raise ValueError(f"Poisson mean must be finite and >= 0, got {lam}")
    return lam


def log_poisson_pmf(lam: float, i: int) -> float:
    """``log Poi(lam)(i) = -lam + i log lam - log i!``.

    From ``i = 10`` on (and ``lam >= 1``) this is evaluated as ``-[i log(i/lam) + lam - i]``
    minus Stirling's formula with its correction series, which keeps full
    relative accuracy when ``lam`` and ``i`` are large.
    """
    lam = _check_lambda(lam)
    if i < 0:
        raise ValueError("Poisson support is the nonnegative integers")
    if lam == 0.0:
        return 0.0 if i == 0 else BOTTOM
    if i < _DEVIANCE_MIN or lam < 1.0:
        return -lam + i * math.log(lam) - log_factorial(i)
    d = (i - lam) / lam
    # i log(i/lam) + lam - i, free of the cancellation in -lam + i log lam
    deviance = i * math.log1p(d) - lam * d
    return -deviance - 0.5 * math.log(2.0 * math.pi * i) - float(_stirling_correction(np.float64(i)))


def log_poisson_pmf_array(lam: float, idx) -> np.ndarray:
    lam = _check_lambda(lam)
    idx = np.asarray(idx, dtype=np.int64)
    if lam == 0.0:
        return np.where(idx == 0, 0.0, BOTTOM)
    out = np.empty(idx.shape)
    small = (idx < _DEVIANCE_MIN) | (lam < 1.0)
    i = idx[small]
    out[small] = -lam + i * math.log(lam) - log_factorial_array(i)
    i = idx[~small].astype(float)
    d = (i - lam) / lam
    out[~small] = -(i * np.log1p(d) - lam * d) - 0.5 * np.log(2.0 * math.pi * i) - _stirling_correction(i)
    return out


def _upper_window(lam: float) -> int:
    return int(math.ceil(lam + _WINDOW_SIGMAS * math.sqrt(lam) + 60.0))


def poisson_cdf(lam: float, m: int) -> float:
    """``log P(X <= m)`` for ``X ~ Poi(lam)``.

    Short sums use the forward recurrence ``p[i+1] = p[i] * lam / (i+1)`` in
    linear space, carrying ``e^-lam`` in a separate log scale that is
    re-anchored if the running sum grows large.  Long sums evaluate the pmf
    terms directly in log space.  Terms beyond ``lam + 40 sqrt(lam)`` (and,
    when ``m >= lam``, below ``lam - 40 sqrt(lam)``) are below ``e^-800`` by
    the Poisson tail bound and are skipped.
    """
    lam = _check_lambda(lam)
    if m < 0:
        return BOTTOM
    if lam == 0.0:
        return 0.0
    top = min(int(m), _upper_window(lam))
    start = 0
    if top >= lam and lam > 1000.0:
        start = max(0, int(math.floor(lam - _WINDOW_SIGMAS * math.sqrt(lam))))
    if top - start <= _RECURRENCE_MAX and start == 0:
        log_scale = -lam
        p = 1.0
        total = 1.0
        for i in range(top):
            p *= lam / (i + 1)
            total += p
            if total > 1e250:
                log_scale += math.log(total)
                p /= total
                total = 1.0
        out = log_scale + math.log(total)
    else:
        out = log_sum_exp(log_poisson_pmf_array(lam, np.arange(start, top + 1)))
    return min(out, 0.0)


def poisson_sf(lam: float, m: int) -> float:
    """``log P(X > m)``, summed directly when ``m`` is at or above the mean."""
    lam = _check_lambda(lam)
    if m < 0:
        return 0.0
    if lam == 0.0:
        return BOTTOM
    if m + 1 >= lam:
        stop = max(m + 1, _upper_window(lam))
        return min(log_sum_exp(log_poisson_pmf_array(lam, np.arange(m + 1, stop + 1))), 0.0)
    log_cdf = poisson_cdf(lam, m)
    return math.log(-math.expm1(log_cdf))


def poisson_tail_bound(lam: float, x: float) -> float:
    """Concentration bound on the Poisson tail on the far side of ``x``.

    For ``x >= lam`` bounds ``P(X >= x)`` by ``exp(-(x-lam)^2 / (2x))``; for
    ``x <= lam`` bounds ``P(X <= x)`` by ``exp(-(x-lam)^2 / (2 lam))``.
    """
    lam = _check_lambda(lam)
    x = float(x)
    if x < 0 or math.isnan(x):
        raise ValueError(f"tail bound needs x >= 0, got {x}")
    if x == lam:
        return 1.0
    if x > lam:
        return math.exp(-((x - lam) ** 2) / (2.0 * x))
    return math.exp(-((x - lam) ** 2) / (2.0 * lam))
