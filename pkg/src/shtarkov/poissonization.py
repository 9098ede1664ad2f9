"""Poisson-length sampling.

Drawing the length ``N ~ Poi(n)`` first makes the Shtarkov sum a Poisson
mixture of the fixed-length sums,

    S(P^Poi(n)) = sum_{n'} Poi(n)(n') S(P^n'),

which is computed here exactly up to a cutoff, with the remainder bounded via
``S(P^n') <= S(P^1)^n'`` and a Poisson tail bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .classes import (
    FiniteClass,
    FiniteDistribution,
    _guard,
    shtarkov_class_product_power,
    shtarkov_iid_sequences,
    shtarkov_iid_types,
    shtarkov_sum_explicit,
)
from .numerics import LN2, log_poisson_pmf, poisson_tail_bound


@dataclass(frozen=True)
class IidFamily:
    """All distributions over ``[k]``."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("alphabet size must be >= 1")


@dataclass(frozen=True)
class PoissonizedClassHandle:
    base: FiniteClass | IidFamily
    n: float

    def __post_init__(self):
        if not (math.isfinite(self.n) and self.n > 0):
            raise ValueError(f"Poisson length parameter must be finite and > 0, got {self.n}")


class UnusableBracket(RuntimeError):
    """The certified remainder is still above tolerance at the requested cutoff."""


@lru_cache(maxsize=4096)
def fixed_length_log_shtarkov(base: FiniteClass | IidFamily, length: int) -> float:
    """``ln S(P^length)`` by type enumeration (memoised; inputs are immutable)."""
    if isinstance(base, IidFamily):
        return shtarkov_iid_types(base.k, length).shtarkov_log
    return shtarkov_class_product_power(base, length).shtarkov_log


def single_letter_log_shtarkov(base: FiniteClass | IidFamily) -> float:
    if isinstance(base, IidFamily):
        return math.log(base.k)
    return shtarkov_sum_explicit(base).shtarkov_log


@dataclass(frozen=True)
class PoissonizedBracket:
    s_lower: float
    s_upper: float
    n_max: int
    residual: float

    @property
    def bits_lower(self) -> float:
        return math.log2(self.s_lower)

    @property
    def bits_upper(self) -> float:
        return math.log2(self.s_upper)


def _residual_bound(n: float, s1: float, n_max: int) -> float:
    """``sum_{n' > n_max} Poi(n)(n') s1^n' = e^{n(s1-1)} P(Poi(n s1) > n_max)``,
    with the tail probability bounded by the concentration inequality.

    (The block bound ``S(P^n') <= S(P^n)^ceil(n'/n)`` would also work; one-step
    subadditivity is simpler and enough at this scale.)
    """
    lam = n * s1
    x = n_max + 1
    tail = poisson_tail_bound(lam, x) if x >= lam else 1.0
    log_r = n * (s1 - 1.0) + (math.log(tail) if tail > 0 else -math.inf)
    return math.exp(log_r) if log_r > -745 else 0.0


def _lengths_needed(n: float, s1: float, tol: float) -> int:
    n_max = int(math.ceil(n * s1))
    while _residual_bound(n, s1, n_max) > tol:
        n_max = int(n_max * 1.25) + 1
    return n_max


def poissonized_shtarkov(h: PoissonizedClassHandle, n_max: int | None = None, tol: float = 1e-8) -> PoissonizedBracket:
    """Bracket on ``S`` of the Poisson-sampled class.

    The lower end is the mixture truncated at ``n_max``; the upper end adds
    the certified remainder, minimised over all cutoffs up to ``n_max`` so it
    never loosens as ``n_max`` grows.  With ``n_max=None`` the cutoff is the
    first at which the remainder is at most ``tol``.
    """
    s1 = math.exp(single_letter_log_shtarkov(h.base))
    if n_max is None:
        n_max = _lengths_needed(h.n, s1, tol)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    partial_terms: list[float] = []
    best_upper = math.inf
    for length in range(n_max + 1):
        log_w = log_poisson_pmf(h.n, length)
        partial_terms.append(math.exp(log_w + fixed_length_log_shtarkov(h.base, length)))
        partial = math.fsum(partial_terms)
        best_upper = min(best_upper, partial + _residual_bound(h.n, s1, length))
    partial = math.fsum(partial_terms)
    residual = best_upper - partial
    if residual > tol:
        raise UnusableBracket(f"remainder {residual:.3g} exceeds {tol:g} at n_max={n_max}")
    return PoissonizedBracket(partial, best_upper, n_max, residual)


def fixed_upper_from_poisson(h: PoissonizedClassHandle, tol: float = 1e-8) -> float:
    """Upper bound (bits) on the fixed-length redundancy at length ``h.n``:
    the Poisson-sampled redundancy plus one bit."""
    return poissonized_shtarkov(h, tol=tol).bits_upper + 1.0


@dataclass(frozen=True)
class TransferLower:
    n1: int
    bound_bits: float
    poisson_bits_upper: float
    holds: bool


def poisson_lower_from_fixed(base: FiniteClass | IidFamily | int, n: int, check: bool = True) -> TransferLower | None:
    """Shorter Poisson length whose redundancy is at most the fixed-length one.

    Applies when ``n >= 4`` and ``R(P^n) < n/16``; then with
    ``n1 = floor(n - 3 sqrt(n R(P^n)))`` the Poisson-sampled redundancy at
    ``n1`` is at most ``R(P^n)``.  Returns ``None`` when the guard fails.
    With ``check`` the claim is confirmed against :func:`poissonized_shtarkov`.
    """
    if isinstance(base, int):
        base = IidFamily(base)
    if n < 4:
        return None
    # S >= 1, so a negative value is rounding noise
    fixed_bits = max(0.0, fixed_length_log_shtarkov(base, n) / LN2)
    if not fixed_bits < n / 16:
        return None
    n1 = int(math.floor(n - 3.0 * math.sqrt(n * fixed_bits)))
    poisson_bits = math.nan
    holds = True
    if check:
        poisson_bits = 0.0 if n1 <= 0 else poissonized_shtarkov(PoissonizedClassHandle(base, n1), tol=1e-13).bits_upper
        holds = poisson_bits <= fixed_bits + 1e-10
    return TransferLower(n1, fixed_bits, poisson_bits, holds)


# -- Monte-Carlo and identity checks --------------------------------------


@dataclass
class IndependenceReport:
    means: np.ndarray
    expected_means: np.ndarray
    variances: np.ndarray
    covariances: np.ndarray
    max_mean_z: float
    max_var_z: float
    max_cov_z: float
    passed: bool
    generator: str = "numpy PCG64 (default_rng)"


def verify_multiplicity_independence(p: FiniteDistribution, n: float, trials: int = 10**4, seed: int = 0,
                                     sigmas: float = 4.0) -> IndependenceReport:
    """Monte-Carlo check that Poisson-length sampling gives independent
    ``Poi(n p_i)`` symbol counts.

    Means must be within ``sigmas`` standard errors of ``n p_i``, sample
    variances within ``sigmas`` standard errors of ``n p_i``, and pairwise
    covariances within ``sigmas`` standard errors of 0.  Deterministic for a
    given seed.
    """
    if trials < 1000:
        raise ValueError("need at least 1000 trials")
    probs = np.asarray(p.probs)
    rng = np.random.default_rng(seed)
    lengths = rng.poisson(n, size=trials)
    counts = rng.multinomial(lengths, probs).astype(float)
    lam = n * probs
    means = counts.mean(axis=0)
    variances = counts.var(axis=0, ddof=1)
    cov = np.cov(counts, rowvar=False, ddof=1).reshape(len(probs), len(probs))

    with np.errstate(divide="ignore", invalid="ignore"):
        mean_se = np.sqrt(lam / trials)
        mean_z = np.where(mean_se > 0, np.abs(means - lam) / mean_se, np.where(means == lam, 0.0, np.inf))
        var_se = np.sqrt((lam + 2 * lam**2) / trials)
        var_z = np.where(var_se > 0, np.abs(variances - lam) / var_se, np.where(variances == 0, 0.0, np.inf))
        cov_se = np.sqrt(np.outer(lam, lam) / trials)
        off = ~np.eye(len(probs), dtype=bool)
        cov_z = np.where(cov_se > 0, np.abs(cov) / cov_se, np.where(cov == 0, 0.0, np.inf))[off]
    max_cov_z = float(cov_z.max()) if cov_z.size else 0.0
    report = IndependenceReport(
        means, lam, variances, cov,
        float(mean_z.max()), float(var_z.max()), max_cov_z, False,
    )
    report.passed = max(report.max_mean_z, report.max_var_z, report.max_cov_z) <= sigmas
    return report


@dataclass(frozen=True)
class IdentityReport:
    name: str
    instances_tested: int
    worst_violation: float
    passed: bool


def verify_conditional_length(p: FiniteDistribution, n: float, n_prime: int, tol: float = 1e-12,
                              budget: int | None = None) -> IdentityReport:
    """Conditioned on length ``n'``, Poisson-length sampling assigns every
    sequence its fixed-length product probability."""
    k = p.k
    _guard(k**n_prime, f"{k}^{n_prime} sequences", budget)
    log_w = log_poisson_pmf(n, n_prime)
    logp = np.log(np.asarray(p.probs), where=np.asarray(p.probs) > 0, out=np.full(k, -np.inf))
    worst = 0.0
    joint_total = []
    for seq in itertools.product(range(k), repeat=n_prime):
        product = math.exp(float(np.sum(logp[list(seq)]))) if seq else 1.0
        joint = math.exp(log_w) * product
        joint_total.append(joint)
        conditional = joint / math.exp(log_w)
        worst = max(worst, abs(conditional - product))
    # the sequences of length n' carry exactly the length probability
    worst = max(worst, abs(math.fsum(joint_total) - math.exp(log_w)) / math.exp(log_w))
    return IdentityReport("conditional_length", k**n_prime, worst, worst <= tol)


def poisson_type_redundancy_check(k: int, n: float, n_max: int, tol: float = 1e-10) -> IdentityReport:
    """The Poisson mixture of per-length type sums equals the mixture of
    per-length sequence sums."""
    via_types = []
    via_sequences = []
    for length in range(n_max + 1):
        w = math.exp(log_poisson_pmf(n, length))
        via_types.append(w * shtarkov_iid_types(k, length).shtarkov)
        via_sequences.append(w * shtarkov_iid_sequences(k, length).shtarkov)
    a, b = math.fsum(via_types), math.fsum(via_sequences)
    rel = abs(a - b) / max(a, b)
    return IdentityReport("poisson_type_redundancy", n_max + 1, rel, rel <= tol)
