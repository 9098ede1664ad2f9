"""Seeded verification suites run by ``shtarkov verify``."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import lemma_checks as lc
from .classes import FiniteClass, FiniteDistribution, shtarkov_iid_types
from .envelope import Envelope, bgg09_upper, l_f, power_law_closed_bounds, single_letter_interval
from .iid_small import SmallAlphabetQuery, abbreviated_type_count, full_type_count, iid_exact, iid_upper_bound
from .numerics import LOG2E, poisson_cdf, poisson_sf, poisson_tail_bound
from .poisson_class import closed_form_bounds_bounded_poisson, shtarkov_bounded_poisson
from .poissonization import (
    IidFamily,
    PoissonizedClassHandle,
    poisson_lower_from_fixed,
    poisson_type_redundancy_check,
    poissonized_shtarkov,
    verify_conditional_length,
    verify_multiplicity_independence,
)

SUITES = ("all", "preliminary", "poisson", "envelope")
INSTANCES = 100


def preliminary_suite(seed: int, instances: int = INSTANCES) -> list[lc.CheckReport]:
    rng = np.random.default_rng(seed)
    subset = lc.CheckReport("subset")
    union = lc.CheckReport("union")
    function = lc.CheckReport("function")
    bijection = lc.CheckReport("function_bijection")
    product = lc.CheckReport("product")
    for _ in range(instances):
        c = lc.random_class(rng, 5, 4)
        keep = sorted(rng.choice(5, size=2, replace=False).tolist())
        subset.merge(lc.check_subset(c, FiniteClass(tuple(c.members[j] for j in keep))))

        parts = [lc.random_class(rng, int(rng.integers(1, 4)), 4) for _ in range(3)]
        union.merge(lc.check_union(parts))

        k = int(rng.integers(2, 6))
        c = lc.random_class(rng, int(rng.integers(1, 6)), k)
        function.merge(lc.check_function(c, rng.integers(0, k - 1, size=k).tolist()))
        bijection.merge(lc.check_function(c, rng.permutation(k).tolist()))

        cx = lc.random_class(rng, int(rng.integers(1, 6)), int(rng.integers(2, 6)))
        cy = lc.random_class(rng, int(rng.integers(1, 6)), int(rng.integers(2, 6)))
        total = len(cx) * len(cy)
        rows = sorted(rng.choice(total, size=max(1, total - 1), replace=False).tolist())
        product.merge(lc.check_product(cx, cy, rows))

    monotone = lc.CheckReport("monotone_subadditive")
    for k in (1, 2, 3):
        monotone.merge(lc.check_monotone_subadditive(k, 8))
    types = lc.CheckReport("type_equality")
    for k in (1, 2, 3):
        types.merge(lc.check_type_equality(k, 6))
    return [subset, union, function, bijection, product, monotone, types]


def poisson_suite(seed: int) -> list[lc.CheckReport]:
    half = lc.CheckReport("poisson_half_inequality")
    transfer = lc.CheckReport("poisson_transfer")
    for k in (2, 3):
        for n in range(1, 16):
            fixed = shtarkov_iid_types(k, n)
            bracket = poissonized_shtarkov(PoissonizedClassHandle(IidFamily(k), n), tol=1e-8)
            half.record(fixed.shtarkov / 2 - bracket.s_lower, f"k={k} n={n}")
            transfer.record(fixed.bits - (bracket.bits_lower + 1.0), f"k={k} n={n}")

    mixing = lc.CheckReport("poisson_mixing_monotone")
    handle = PoissonizedClassHandle(IidFamily(2), 2.0)
    prev = None
    for n_max in range(4, 41):
        b = poissonized_shtarkov(handle, n_max=n_max, tol=math.inf)
        if prev is not None:
            mixing.record(max(prev.s_lower - b.s_lower, b.s_upper - prev.s_upper), f"n_max={n_max}")
        prev = b

    types = lc.CheckReport("poisson_type_redundancy")
    for k in (1, 2):
        for n in (0.5, 2.0):
            r = poisson_type_redundancy_check(k, n, 6)
            types.record(r.worst_violation, f"k={k} n={n}")

    conditional = lc.CheckReport("poisson_conditional_length", tolerance=1e-12)
    for probs, n, n_prime in (((0.5, 0.5), 3.0, 2), ((2 / 3, 1 / 3), 1.0, 2), ((0.2, 0.3, 0.5), 4.0, 4)):
        r = verify_conditional_length(FiniteDistribution(probs), n, n_prime)
        conditional.record(r.worst_violation, f"p={probs} n'={n_prime}")

    independence = lc.CheckReport("poisson_independence", tolerance=4.0)
    for j, (probs, n) in enumerate((((0.5, 0.5), 8.0), ((0.9, 0.1), 20.0), ((0.2, 0.3, 0.5), 5.0))):
        r = verify_multiplicity_independence(FiniteDistribution(probs), n, trials=10**5, seed=seed + j)
        independence.record(max(r.max_mean_z, r.max_var_z, r.max_cov_z), f"p={probs} n={n}")

    tails = tail_domination_report()

    lower = lc.CheckReport("poisson_transfer_lower")
    res = poisson_lower_from_fixed(2, 64)
    lower.record(0.0 if res is not None and res.holds else 1.0, "k=2 n=64")

    chain = lc.CheckReport("iid_upper_chain")
    for k in range(1, 5):
        for n in range(1, 11):
            q = SmallAlphabetQuery(k, n)
            chain.record(iid_exact(q).bits - iid_upper_bound(q), f"k={k} n={n}")
            if abbreviated_type_count(k, n) != full_type_count(k, n):
                chain.record(1.0, f"abbreviated type count k={k} n={n}")
    return [half, transfer, mixing, types, conditional, independence, tails, lower, chain]


def tail_domination_report() -> lc.CheckReport:
    """Exact Poisson tails never exceed the concentration bound."""
    report = lc.CheckReport("poisson_tail_bound", tolerance=1e-15)
    for lam in (0.5, 1.0, 5.0, 20.0):
        top = int(math.floor(lam + 10 * math.sqrt(lam)))
        for x in range(0, top + 1):
            if x >= lam:
                exact = math.exp(poisson_sf(lam, x - 1))  # P(X >= x)
            else:
                exact = math.exp(poisson_cdf(lam, x))  # P(X <= x)
            report.record(exact - poisson_tail_bound(lam, x), f"lam={lam} x={x}")
    return report


def envelope_suite(seed: int) -> list[lc.CheckReport]:
    rng = np.random.default_rng(seed)
    exact = lc.CheckReport("bounded_poisson_exact", tolerance=1e-12)
    for lam in rng.uniform(0.0, 1.0, size=1000):
        lam = 1.0 - lam  # (0, 1]
        exact.record(abs(shtarkov_bounded_poisson(lam).shtarkov - (2.0 - math.exp(-lam))), f"lam={lam}")
    bracket = lc.CheckReport("bounded_poisson_bracket", tolerance=0.0)
    for lam in (1.5, 2.5, 10.0, 100.0, 1e4):
        bits = shtarkov_bounded_poisson(lam).bits
        iv = closed_form_bounds_bounded_poisson(lam)
        bracket.record(max(iv.lower_bits - bits, bits - iv.upper_bits), f"lam={lam}")

    sandwich = lc.CheckReport("envelope_sandwich")
    baseline = lc.CheckReport("envelope_bgg09_cross")
    for env in (Envelope.power_law(1, 2), Envelope.exponential(1, 1)):
        lf = l_f(env)
        for n in (10**3, 10**4, 10**5, 10**6):
            iv = single_letter_interval(env, n)
            allowed = (lf - 1) * math.log2(2 + math.sqrt(2 * n / math.pi)) + iv.truncation_bits
            sandwich.record(max(iv.lower_bits - iv.upper_bits, iv.gap_bits - allowed), f"{env.kind} n={n}")
            baseline.record(iv.lower_bits - bgg09_upper(env, n), f"{env.kind} n={n}")

    scaling = lc.CheckReport("power_law_scaling", tolerance=0.1)
    for alpha in (1.5, 2.0, 3.0):
        env = Envelope.power_law(1, alpha)
        for n in (10**4, 10**5):
            ratio = single_letter_interval(env, n * 2**alpha).upper_bits / single_letter_interval(env, n).upper_bits
            scaling.record(abs(ratio / 2 - 1), f"alpha={alpha} n={n}")

    closed = lc.CheckReport("power_law_closed_vs_single_letter")
    env = Envelope.power_law(1, 2)
    for n in (10**4, 10**5, 10**6):
        closed.record(single_letter_interval(env, n).upper_bits - power_law_closed_bounds(1, 2, n).upper_bits, f"n={n}")

    growth = lc.CheckReport("exponential_growth_band", tolerance=0.0)
    env = Envelope.exponential(1, 1)
    for e2 in (10, 14, 20):
        n = 2**e2
        ratio = single_letter_interval(env, n).upper_bits / (e2**2 / (4 * LOG2E))
        growth.record(max(0.5 - ratio, ratio - 2.0), f"n=2^{e2}")
    return [exact, bracket, sandwich, baseline, scaling, closed, growth]


def run_suite(suite: str, seed: int = 42) -> list[lc.CheckReport]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    chosen = [fn for name, fn in (("preliminary", preliminary_suite), ("poisson", poisson_suite),
                                  ("envelope", envelope_suite)) if suite in ("all", name)]
    # suites own their generators, so running them side by side is
    # deterministic; reports are merged in the fixed order above
    with ThreadPoolExecutor(max_workers=len(chosen)) as pool:
        futures = [pool.submit(fn, seed) for fn in chosen]
        return [r for f in futures for r in f.result()]
