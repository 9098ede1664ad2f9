"""Envelope classes and their redundancy bounds.

An envelope ``f`` bounds every probability ``p_i <= f_i`` of a distribution
over the positive integers.  Under Poisson sampling each symbol count is an
independent Poisson variable with mean at most ``n f_i``, so the redundancy
is sandwiched between sums of bounded-Poisson redundancies:

    sum_{i >= l_f} R(Poi <= n f_i)  <=  R  <=  sum_{i >= 1} R(Poi <= n f_i).

The tail of either sum is infinite; it is cut at a finite index and the
dropped part is bracketed with certified inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classes import BudgetExceeded
from .numerics import LN2, LOG2E
from .poisson_class import STIRLING_THRESHOLD, bounded_poisson_bits_many, bounded_poisson_log_bracket
from .results import RedundancyInterval

_EPS = 2.0**-52


class NotSummable(ValueError):
    """The envelope's total mass diverges, so every redundancy is infinite."""


class EnvelopeSpecError(ValueError):
    """An envelope document failed validation."""


def _widen(lo: float, hi: float) -> tuple[float, float]:
    # outward rounding so float error cannot pull the bracket off the true value
    return max(0.0, lo * (1.0 - 8 * _EPS)), hi * (1.0 + 8 * _EPS)


@dataclass(frozen=True)
class Tail:
    """How a table envelope continues past its last explicit value."""

    kind: str = "zero"
    c: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "geometric", "power"):
            raise EnvelopeSpecError(f"unknown tail kind {self.kind!r}")
        if self.kind != "zero":
            if not (self.c > 0 and math.isfinite(self.c)):
                raise EnvelopeSpecError("tail c must be positive and finite")
            if not (self.alpha > 0 and math.isfinite(self.alpha)):
                raise EnvelopeSpecError("tail alpha must be positive and finite")


@dataclass(frozen=True)
class Envelope:
    """``power_law``: ``c i^-alpha``; ``exponential``: ``c e^(-alpha i)``;
    ``table``: explicit ``values`` for ``i = 1..len(values)``, then ``tail``.

    Geometric and power tails of a table use the same formulas with the
    absolute index ``i``.
    """

    kind: str
    c: float = 1.0
    alpha: float = 1.0
    values: tuple[float, ...] = ()
    tail: Tail = field(default_factory=Tail)

    def __post_init__(self):
        if self.kind in ("power_law", "exponential"):
            if not (self.c > 0 and math.isfinite(self.c)):
                raise EnvelopeSpecError("c must be positive and finite")
            if not (self.alpha > 0 and math.isfinite(self.alpha)):
                raise EnvelopeSpecError("alpha must be positive and finite")
        elif self.kind == "table":
            vals = tuple(float(v) for v in self.values)
            if any(not (v >= 0 and math.isfinite(v)) for v in vals):
                raise EnvelopeSpecError("table values must be finite and >= 0")
            object.__setattr__(self, "values", vals)
        else:
            raise EnvelopeSpecError(f"unknown envelope kind {self.kind!r}")

    @classmethod
    def power_law(cls, c: float, alpha: float) -> "Envelope":
        return cls("power_law", float(c), float(alpha))

    @classmethod
    def exponential(cls, c: float, alpha: float) -> "Envelope":
        return cls("exponential", float(c), float(alpha))

    @classmethod
    def table(cls, values, tail: Tail | None = None) -> "Envelope":
        return cls("table", values=tuple(values), tail=tail or Tail())

    @classmethod
    def from_spec(cls, obj: dict) -> "Envelope":
        """Build from the JSON document form; unknown or misplaced fields are
        rejected."""
        if not isinstance(obj, dict):
            raise EnvelopeSpecError("envelope spec must be a JSON object")
        kind = obj.get("kind")
        allowed = {
            "power_law": {"kind", "c", "alpha"},
            "exponential": {"kind", "c", "alpha"},
            "table": {"kind", "values", "tail"},
        }
        if kind not in allowed:
            raise EnvelopeSpecError(f"unknown envelope kind {kind!r}")
        extra = set(obj) - allowed[kind]
        if extra:
            raise EnvelopeSpecError(f"unexpected fields for {kind}: {sorted(extra)}")
        try:
            if kind == "table":
                if "values" not in obj:
                    raise EnvelopeSpecError("table envelope needs 'values'")
                return cls.table([_number(v, "values") for v in obj["values"]], _tail_from_spec(obj.get("tail")))
            missing = {"c", "alpha"} - set(obj)
            if missing:
                raise EnvelopeSpecError(f"{kind} envelope needs {sorted(missing)}")
            return cls(kind, _number(obj["c"], "c"), _number(obj["alpha"], "alpha"))
        except TypeError as exc:
            raise EnvelopeSpecError(str(exc)) from exc

    def to_spec(self) -> dict:
        if self.kind == "table":
            tail = {"kind": self.tail.kind}
            if self.tail.kind != "zero":
                tail.update(c=self.tail.c, alpha=self.tail.alpha)
            return {"kind": "table", "values": list(self.values), "tail": tail}
        return {"kind": self.kind, "c": self.c, "alpha": self.alpha}

    # -- pointwise --------------------------------------------------------

    def __call__(self, i: int) -> float:
        return float(self.eval_array(np.array([i]))[0])

    def eval_array(self, idx) -> np.ndarray:
        i = np.asarray(idx, dtype=float)
        if np.any(i < 1):
            raise ValueError("envelopes are indexed from 1")
        if self.kind == "power_law":
            return self.c * i ** (-self.alpha)
        if self.kind == "exponential":
            return self.c * np.exp(-self.alpha * i)
        m = len(self.values)
        out = _family_eval(self.tail, i)
        if m:
            table = np.asarray(self.values)
            pos = np.clip(i.astype(np.int64), 1, m) - 1
            out = np.where(i <= m, table[pos], out)
        return out

    def pointwise_power(self, k: int) -> "Envelope":
        """The envelope ``f_i ** k`` (same family, scaled parameters)."""
        if self.kind == "table":
            tail = self.tail
            if tail.kind != "zero":
                tail = Tail(tail.kind, tail.c**k, tail.alpha * k)
            return Envelope.table([v**k for v in self.values], tail)
        return Envelope(self.kind, self.c**k, self.alpha * k)

    @property
    def monotone_from(self) -> int:
        """Index from which ``f`` is nonincreasing."""
        return len(self.values) + 1 if self.kind == "table" else 1

    @property
    def analytically_summable(self) -> bool:
        if self.kind == "power_law":
            return self.alpha > 1
        if self.kind == "table":
            return self.tail.kind != "power" or self.tail.alpha > 1
        return True


def _number(v, name: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise EnvelopeSpecError(f"field {name!r} must be a number, got {v!r}")
    return float(v)


def _tail_from_spec(obj) -> Tail:
    if obj is None:
        return Tail()
    if not isinstance(obj, dict):
        raise EnvelopeSpecError("tail must be an object")
    kind = obj.get("kind")
    allowed = {"zero": {"kind"}, "geometric": {"kind", "c", "alpha"}, "power": {"kind", "c", "alpha"}}
    if kind not in allowed:
        raise EnvelopeSpecError(f"unknown tail kind {kind!r}")
    extra = set(obj) - allowed[kind]
    if extra:
        raise EnvelopeSpecError(f"unexpected tail fields: {sorted(extra)}")
    if kind == "zero":
        return Tail()
    missing = {"c", "alpha"} - set(obj)
    if missing:
        raise EnvelopeSpecError(f"{kind} tail needs {sorted(missing)}")
    return Tail(kind, _number(obj["c"], "tail.c"), _number(obj["alpha"], "tail.alpha"))


def _family_eval(tail: Tail, i: np.ndarray) -> np.ndarray:
    if tail.kind == "power":
        return tail.c * i ** (-tail.alpha)
    if tail.kind == "geometric":
        return tail.c * np.exp(-tail.alpha * i)
    return np.zeros_like(i, dtype=float)


# -- tail sums ------------------------------------------------------------


def _power_tail_from(c: float, alpha: float, v: int) -> tuple[float, float]:
    """Bracket on ``sum_{i >= v} c i^-alpha`` with no explicit terms.

    Two independent brackets are intersected.  Convexity gives
    ``int_v f + f(v)/2 <= T <= int_{v-1/2} f`` (trapezoid and midpoint).
    Euler-Maclaurin for a completely monotone ``f`` has alternating,
    term-bounded remainders, so ``T`` lies between the expansion cut after
    the ``f'`` term and after the ``f'''`` term.
    """
    a1 = alpha - 1.0
    fv = c * v ** (-alpha)
    integral = c * v ** (-a1) / a1
    convex_lo = integral + 0.5 * fv
    convex_hi = c * (v - 0.5) ** (-a1) / a1
    d1 = -alpha * fv / v
    d3 = -alpha * (alpha + 1) * (alpha + 2) * fv / v**3
    em_hi = integral + 0.5 * fv - d1 / 12.0
    em_lo = em_hi + d3 / 720.0
    return max(convex_lo, em_lo), min(convex_hi, em_hi)


def _family_tail(tail_kind: str, c: float, alpha: float, v: int, tol: float) -> tuple[float, float]:
    """``sum_{i >= v} f_i`` for a single parametric family, bracket width <= tol
    where reachable by explicit summation of leading terms."""
    if tail_kind == "zero":
        return 0.0, 0.0
    if tail_kind in ("geometric", "exponential"):
        exact = c * math.exp(-alpha * v) / -math.expm1(-alpha)
        return _widen(exact, exact)
    if alpha <= 1.0:
        raise NotSummable(f"power tail with exponent {alpha} <= 1 diverges")
    lo, hi = _power_tail_from(c, alpha, v)
    explicit = 0
    limit = 1 << 26
    while hi - lo > tol and explicit < limit:
        explicit = max(256, 2 * explicit)
        lo, hi = _power_tail_from(c, alpha, v + explicit)
    if explicit:
        i = np.arange(v, v + explicit, dtype=float)
        head = math.fsum(c * i ** (-alpha))
        lo, hi = head + lo, head + hi
    return _widen(lo, hi)


def tail_sum(e: Envelope, u: int, tol: float = 1e-12) -> tuple[float, float]:
    """Certified bracket on ``sum_{i > u} f_i``.

    Raises :class:`NotSummable` for divergent envelopes.  The width is at most
    ``tol`` unless that needs more than ``2**26`` explicit terms.
    """
    if u < 0:
        raise ValueError("u must be >= 0")
    if not e.analytically_summable:
        raise NotSummable(f"{e.kind} envelope with alpha={e.alpha if e.kind != 'table' else e.tail.alpha} is not summable")
    if e.kind == "power_law":
        return _family_tail("power", e.c, e.alpha, u + 1, tol)
    if e.kind == "exponential":
        return _family_tail("exponential", e.c, e.alpha, u + 1, tol)
    m = len(e.values)
    head = math.fsum(e.values[u:]) if u < m else 0.0
    lo, hi = _family_tail(e.tail.kind, e.tail.c, e.tail.alpha, max(u, m) + 1, tol)
    return _widen(head + lo, head + hi) if head or hi else (0.0, 0.0)


@dataclass(frozen=True)
class SummabilityReport:
    summable: bool
    total_lo: float
    total_hi: float
    witness: str


def summability_check(e: Envelope) -> SummabilityReport:
    """Decide ``sum f_i < inf`` and bracket the total, or give the divergence
    witness.  Finite total mass is exactly the condition for finite
    worst-case (and expected) redundancy of the envelope class."""
    if not e.analytically_summable:
        alpha = e.alpha if e.kind == "power_law" else e.tail.alpha
        return SummabilityReport(
            False, math.inf, math.inf,
            f"power-law decay with exponent {alpha:g} <= 1: partial sums dominate the harmonic series",
        )
    lo, hi = tail_sum(e, 0)
    return SummabilityReport(True, lo, hi, "certified bracket on the total mass")


def l_f(e: Envelope, tol: float = 1e-13) -> int:
    """Smallest ``l`` with ``sum_{i >= l} f_i < 1``.

    Decided on certified brackets: a bracket straddling 1 is refined, and if
    it still straddles after refinement the next index is taken (which keeps
    every lower bound that starts at ``l_f`` valid).
    """
    if not e.analytically_summable:
        raise NotSummable("l_f is only defined for summable envelopes")

    def below_one(l: int, t: float) -> bool:
        lo, hi = tail_sum(e, l - 1, t)
        if hi < 1.0:
            return True
        if lo >= 1.0:
            return False
        return tail_sum(e, l - 1, min(t, 1e-16))[1] < 1.0

    if below_one(1, tol):
        return 1
    hi_l = 2
    while not below_one(hi_l, tol):
        hi_l *= 2
    lo_l = hi_l // 2  # below_one(lo_l) is False
    while hi_l - lo_l > 1:
        mid = (lo_l + hi_l) // 2
        if below_one(mid, tol):
            hi_l = mid
        else:
            lo_l = mid
    return hi_l


# -- single-letter sandwich ----------------------------------------------


def _head_bits(lam: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo = np.empty_like(lam)
    hi = np.empty_like(lam)
    big = lam > STIRLING_THRESHOLD
    lo[~big] = hi[~big] = bounded_poisson_bits_many(lam[~big])
    for j in np.flatnonzero(big):
        a, b = bounded_poisson_log_bracket(float(lam[j]))
        lo[j], hi[j] = a * LOG2E, b * LOG2E
    return lo, hi


def _first_small_index(e: Envelope, n: float) -> int:
    """Smallest ``I`` such that ``n f_i < 1`` for every ``i > I``."""
    if e.kind == "power_law":
        guess = int(math.floor((e.c * n) ** (1.0 / e.alpha)))
    elif e.kind == "exponential":
        guess = max(0, int(math.floor(math.log(e.c * n) / e.alpha)))
    else:
        guess = len(e.values)
        if e.tail.kind == "power":
            guess = max(guess, int(math.floor((e.tail.c * n) ** (1.0 / e.tail.alpha))))
        elif e.tail.kind == "geometric":
            guess = max(guess, int(math.floor(math.log(max(e.tail.c * n, 1.0)) / e.tail.alpha)))
    guess = max(guess, e.monotone_from - 1)
    while n * e(guess + 1) >= 1.0:
        guess += 1
    while guess > e.monotone_from - 1 and n * e(guess) < 1.0:
        guess -= 1
    return guess


def _tail_redundancy_nats(e: Envelope, n: float, cut: int, tol: float) -> tuple[float, float]:
    """Bracket (nats) on ``sum_{i > cut} ln(2 - e^-n f_i)`` when all those
    means are below 1.

    Uses ``L - L^2 <= ln(2 - e^-L) <= min(L, L - L^2 + L^3)`` for
    ``0 <= L <= 1``: with ``x = 1 - e^-L`` in ``[L - L^2/2, L - L^2/2 + L^3/6]``
    apply ``x - x^2/2 <= ln(1+x) <= x - x^2/2 + x^3/3``.
    """
    t1 = tail_sum(e, cut, tol / n)
    t2 = tail_sum(e.pointwise_power(2), cut, tol / n**2)
    t3 = tail_sum(e.pointwise_power(3), cut, tol / n**3)
    upper = min(n * t1[1], n * t1[1] - n**2 * t2[0] + n**3 * t3[1])
    lower = max(0.0, n * t1[0] - n**2 * t2[1])
    return lower, max(upper, lower)


def single_letter_interval(e: Envelope, n: float, tol: float = 1e-6, max_cutoff: int = 1 << 24) -> RedundancyInterval:
    """Single-letter sandwich on the Poisson-sampled redundancy of the
    envelope class (bits).

    Coordinates ``i <= I`` are summed exactly; past the cutoff all means are
    below 1 and the remaining sum is bracketed.  ``I`` doubles until that
    bracket is narrower than ``tol`` bits.  Means are capped at ``n``
    because no probability exceeds 1.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if not e.analytically_summable:
        raise NotSummable("single-letter bounds need a summable envelope")
    lf = l_f(e)
    cut = max(_first_small_index(e, n), lf - 1)
    while True:
        t_lo, t_hi = _tail_redundancy_nats(e, n, cut, tol * LN2 / 8)
        slack = (t_hi - t_lo) * LOG2E
        if slack <= tol:
            break
        if cut >= max_cutoff:
            raise BudgetExceeded(f"no cutoff up to {max_cutoff} brings the tail slack ({slack:.3g} bits) under {tol}")
        cut = min(max_cutoff, max(2 * cut, cut + 16))
    lam = n * np.minimum(e.eval_array(np.arange(1, cut + 1)), 1.0) if cut else np.zeros(0)
    lo_bits, hi_bits = _head_bits(lam)
    upper = math.fsum(hi_bits) + t_hi * LOG2E
    lower = math.fsum(lo_bits[lf - 1:]) + t_lo * LOG2E
    note = f"l_f={lf} cutoff={cut}"
    if tail_sum(e, 0)[1] < 1.0:
        note += "; total mass below 1, so the class is empty and the bounds are formal"
    return RedundancyInterval(lower, upper, slack, note=note)


# -- baseline and closed forms --------------------------------------------


def bgg09_upper(e: Envelope, n: int) -> float:
    """The earlier envelope-class bound
    ``min_{1 <= u <= n} [n F_u log2 e + (u-1)/2 log2 n] + 2`` (bits), with the
    tail ``F_u`` taken at its certified upper end."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not e.analytically_summable:
        raise NotSummable("the tail-sum bound needs a summable envelope")
    log_n = math.log2(n) if n > 1 else 0.0
    best = math.inf
    start, size = 1, 64
    while start <= n:
        stop = min(n, start + size - 1)
        # F_u for u in [start, stop]: certified tail at stop plus exact suffix sums
        f = e.eval_array(np.arange(start + 1, stop + 1))
        suffix = np.concatenate([np.cumsum(f[::-1])[::-1], [0.0]])
        tail_hi = tail_sum(e, stop)[1] * (1.0 + 8 * _EPS)
        u = np.arange(start, stop + 1)
        values = n * (tail_hi + suffix) * LOG2E + 0.5 * (u - 1) * log_n
        best = min(best, float(values.min()))
        if 0.5 * (stop - 1) * log_n >= best:
            break
        start, size = stop + 1, size * 2
    return best + 2.0


def power_law_coefficients(alpha: float) -> tuple[float, float]:
    """Multipliers of ``(cn)^(1/alpha)`` in the closed-form power-law bracket."""
    if alpha <= 1:
        raise NotSummable("power-law closed forms need alpha > 1")
    lower = alpha * LOG2E / 2 + LOG2E / (2 * (alpha - 1)) - math.log2(math.pi / 2) / 2
    upper = alpha * LOG2E / 2 + LOG2E / (alpha - 1) + math.log2(3.0)
    return lower, upper


def power_law_closed_bounds(c: float, alpha: float, n: float) -> RedundancyInterval:
    """Closed-form bracket for ``c i^-alpha`` at length ``n`` (bits).

    The lower end omits its ``(1 - o(1))`` factor and is asymptotic only.
    """
    if not c > 0:
        raise ValueError("c must be positive")
    lo_coef, hi_coef = power_law_coefficients(alpha)
    scale = (c * n) ** (1.0 / alpha)
    return RedundancyInterval(
        lo_coef * scale, hi_coef * scale + 1.0, 0.0, asymptotic=True,
        note="lower end asymptotic, o(1) not certified",
    )


@dataclass(frozen=True)
class ExponentialLeading:
    proof_form: float      # log2(n)^2 / (4 alpha log2 e)
    statement_form: float  # log2(n)^2 / (4 alpha)


def exponential_leading_terms(alpha: float, n: float) -> ExponentialLeading:
    sq = math.log2(n) ** 2
    return ExponentialLeading(sq / (4 * alpha * LOG2E), sq / (4 * alpha))


def exponential_closed_bounds(c: float, alpha: float, n: float) -> RedundancyInterval:
    """Closed-form band for ``c e^(-alpha i)`` around ``log2(n)^2/(4 alpha log2 e)``.

    Upper: the leading term plus
    ``[log2(cn) log2(81c) + log2(n) log2(c)] / (4 alpha log2 e) + log2 e / (1 - e^-alpha) + 1``.
    Lower: ``(b - 1 - l0)/4 * log2(4cn/pi^2)`` with ``b = ln(cn)/alpha`` and
    ``l0 = ln(c/(1 - e^-alpha))/alpha`` (floored at 0), clipped at 0.
    Both ends are flagged asymptotic.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not c > 0:
        raise ValueError("c must be positive")
    if n < 2:
        raise ValueError("n must be >= 2")
    lead = exponential_leading_terms(alpha, n)
    denom = 4 * alpha * LOG2E
    slack = (
        math.log2(c * n) * math.log2(81 * c) / denom
        + math.log2(n) * math.log2(c) / denom
        + LOG2E / -math.expm1(-alpha)
        + 1.0
    )
    b = math.log(c * n) / alpha
    l0 = max(0.0, math.log(c / -math.expm1(-alpha)) / alpha)
    lower = max(0.0, (b - 1 - l0) / 4 * math.log2(4 * c * n / math.pi**2))
    upper = lead.proof_form + slack
    return RedundancyInterval(
        min(lower, upper), upper, 0.0, asymptotic=True,
        note=f"leading {lead.proof_form:.7g} (statement form {lead.statement_form:.7g})",
    )
