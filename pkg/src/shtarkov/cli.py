"""Command-line front end.

Exit codes: 0 ok, 1 failed verification, 2 bad input, 3 non-summable
envelope, 4 enumeration budget exceeded, 5 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .battery import SUITES, run_suite
from .classes import BudgetExceeded
from .envelope import (
    Envelope,
    EnvelopeSpecError,
    NotSummable,
    bgg09_upper,
    exponential_closed_bounds,
    power_law_closed_bounds,
    single_letter_interval,
    summability_check,
)
from .iid_small import SmallAlphabetQuery, iid_exact, iid_lower_chain, iid_upper_bound
from .numerics import LN2
from .poisson_class import bounded_poisson_log_bracket, closed_form_bounds_bounded_poisson
from .results import RedundancyInterval
from .schemas import SCHEMAS

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_SUMMABLE, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4, 5
METHODS = ("single-letter", "bgg09", "closed-form")
CSV_HEADER = ["n", "lower_bits", "upper_bits", "method", "truncation_bits"]


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    """Seven significant digits."""
    return f"{x:.7g}"


def _round(x: float):
    return float(fmt(x)) if math.isfinite(x) else None


def _units(x: float, nats: bool) -> float:
    return x * LN2 if nats else x


def _emit(obj: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(obj, sort_keys=True))
    else:
        print("\n".join(lines))


# -- poisson-class --------------------------------------------------------


def cmd_poisson_class(args) -> int:
    lam = args.lam
    if not (math.isfinite(lam) and lam >= 0):
        raise CliError(EXIT_PARSE, f"lambda must be finite and >= 0, got {lam}")
    lo_log, hi_log = bounded_poisson_log_bracket(lam)
    exact = lo_log == hi_log
    bits = lo_log / LN2
    iv = closed_form_bounds_bounded_poisson(lam)
    u = "nats" if args.nats else "bits"
    obj = {
        "lambda": lam,
        "units": u,
        "s": _round(math.exp(lo_log)),
        "bits": _round(_units(bits, args.nats)),
        "lower": _round(_units(iv.lower_bits, args.nats)),
        "upper": _round(_units(iv.upper_bits, args.nats)),
        "exact": exact,
    }
    lines = [
        f"lambda      {fmt(lam)}",
        f"S           {fmt(math.exp(lo_log))}" + ("" if exact else f" .. {fmt(math.exp(hi_log))}"),
        f"redundancy  {fmt(obj['bits'])} {u}",
        f"bracket     [{fmt(obj['lower'])}, {fmt(obj['upper'])}] {u}",
    ]
    _emit(obj, args.json, lines)
    return EXIT_OK


# -- envelope -------------------------------------------------------------


def load_envelope(path: str) -> Envelope:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return Envelope.from_spec(json.loads(text))
    except (json.JSONDecodeError, EnvelopeSpecError) as exc:
        raise CliError(EXIT_PARSE, f"invalid envelope spec {path}: {exc}") from exc


def _require_summable(e: Envelope) -> None:
    rep = summability_check(e)
    if not rep.summable:
        raise CliError(
            EXIT_SUMMABLE,
            f"envelope not summable ({rep.witness}); bounds need sum_i f_i < infinity",
        )


def closed_form(e: Envelope, n: int) -> RedundancyInterval:
    if e.kind == "power_law":
        return power_law_closed_bounds(e.c, e.alpha, n)
    if e.kind == "exponential":
        return exponential_closed_bounds(e.c, e.alpha, max(n, 2))
    raise CliError(EXIT_PARSE, "closed-form bounds exist only for power_law and exponential envelopes")


def evaluate(e: Envelope, n: int, methods) -> list[tuple[str, RedundancyInterval]]:
    out = []
    for m in methods:
        if m == "single-letter":
            out.append((m, single_letter_interval(e, n)))
        elif m == "bgg09":
            out.append((m, RedundancyInterval(0.0, bgg09_upper(e, n), 0.0, note="upper bound only")))
        elif m == "closed-form":
            out.append((m, closed_form(e, n)))
    return out


def _methods_for(e: Envelope, method: str) -> tuple[str, ...]:
    if method != "all":
        return (method,)
    return METHODS if e.kind != "table" else METHODS[:2]


def cmd_envelope(args) -> int:
    e = load_envelope(args.spec)
    if args.n < 1:
        raise CliError(EXIT_PARSE, "n must be >= 1")
    _require_summable(e)
    results = evaluate(e, args.n, _methods_for(e, args.method))
    u = "nats" if args.nats else "bits"
    rows = []
    for m, iv in results:
        rows.append({
            "method": m,
            "lower": _round(_units(iv.lower_bits, args.nats)),
            "upper": _round(_units(iv.upper_bits, args.nats)),
            "truncation": _round(_units(iv.truncation_bits, args.nats)),
            "asymptotic": iv.asymptotic,
            "note": iv.note,
        })
    obj = {"envelope": e.to_spec(), "n": args.n, "units": u, "results": rows}
    lines = [f"envelope {json.dumps(e.to_spec(), sort_keys=True)}  n={args.n}  units={u}",
             f"{'method':<14}{'lower':>16}{'upper':>16}{'truncation':>14}  note"]
    for r in rows:
        flag = " (asymptotic)" if r["asymptotic"] else ""
        lines.append(f"{r['method']:<14}{fmt(r['lower']):>16}{fmt(r['upper']):>16}{fmt(r['truncation']):>14}  {r['note']}{flag}")
    _emit(obj, args.json, lines)
    return EXIT_OK


# -- iid ------------------------------------------------------------------


def cmd_iid(args) -> int:
    if args.k < 1 or args.n < 1:
        raise CliError(EXIT_PARSE, "k and n must be >= 1")
    q = SmallAlphabetQuery(args.k, args.n)
    want_exact = args.exact or not args.bounds
    want_bounds = args.bounds or not args.exact
    u = "nats" if args.nats else "bits"
    obj = {"k": q.k, "n": q.n, "units": u, "exact": None, "upper": None, "lower_chain": None}
    lines = [f"k={q.k} n={q.n} units={u}"]
    if want_exact:
        try:
            bits = iid_exact(q).bits
        except BudgetExceeded as exc:
            raise CliError(EXIT_BUDGET, f"{exc}; raise SHTARKOV_BUDGET to allow it") from exc
        obj["exact"] = _round(_units(bits, args.nats))
        lines.append(f"exact        {fmt(obj['exact'])}")
    if want_bounds:
        obj["upper"] = _round(_units(iid_upper_bound(q), args.nats))
        lines.append(f"upper        {fmt(obj['upper'])}")
        chain = iid_lower_chain(q) if q.k >= 2 else None
        if chain is not None:
            obj["lower_chain"] = {
                "value": _round(_units(chain.bits, args.nats)),
                "n_prime": _round(chain.n_prime),
                "advisory": chain.advisory,
            }
            lines.append(f"lower chain  {fmt(obj['lower_chain']['value'])} (advisory, n'={fmt(chain.n_prime)})")
        else:
            lines.append("lower chain  n/a")
    _emit(obj, args.json, lines)
    return EXIT_OK


# -- verify ---------------------------------------------------------------


def cmd_verify(args) -> int:
    reports = run_suite(args.suite, args.seed)
    passed = all(r.passed for r in reports)
    obj = {
        "suite": args.suite,
        "seed": args.seed,
        "passed": passed,
        "checks": [
            {
                "name": r.name,
                "instances": r.instances_tested,
                "worst_violation": r.worst_violation if math.isfinite(r.worst_violation) else None,
                "tolerance": r.tolerance,
                "passed": r.passed,
            }
            for r in reports
        ],
    }
    lines = [r.line() for r in reports]
    for r in reports:
        lines.extend(f"  {r.name}: {f}" for f in r.failures[:5])
    lines.append(f"{'ALL PASS' if passed else 'FAILURES'}  suite={args.suite} seed={args.seed}")
    _emit(obj, args.json, lines)
    return EXIT_OK if passed else EXIT_FAIL


# -- sweep ----------------------------------------------------------------


def sweep_points(n_from: int, n_to: int, points: int) -> list[int]:
    if points == 1:
        return [n_from]
    grid = np.exp(np.linspace(math.log(n_from), math.log(n_to), points))
    return [int(round(float(x))) for x in grid]


def sweep_rows(e: Envelope, ns, methods) -> list[tuple[int, float, float, str, float]]:
    ns = list(ns)
    # map keeps input order, so the output does not depend on scheduling
    with ThreadPoolExecutor(max_workers=min(8, max(1, len(ns)))) as pool:
        results = list(pool.map(lambda n: evaluate(e, n, methods), ns))
    return [(n, iv.lower_bits, iv.upper_bits, m, iv.truncation_bits) for n, res in zip(ns, results) for m, iv in res]


def render_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for n, lo, hi, m, t in rows:
        w.writerow([n, fmt(lo), fmt(hi), m, fmt(t)])
    return buf.getvalue()


def cmd_sweep(args) -> int:
    e = load_envelope(args.spec)
    if args.n_from < 1 or args.n_from > args.n_to:
        raise CliError(EXIT_PARSE, "need 1 <= n-from <= n-to")
    if args.points < 1:
        raise CliError(EXIT_PARSE, "points must be >= 1")
    _require_summable(e)
    rows = sweep_rows(e, sweep_points(args.n_from, args.n_to, args.points), _methods_for(e, args.method))
    text = render_csv(rows)
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        if args.figure:
            from .plotting import plot_sweep

            plot_sweep(rows, args.figure, title=json.dumps(e.to_spec(), sort_keys=True))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write output: {exc.strerror or exc}") from exc
    print(f"wrote {len(rows)} rows to {args.out}" + (f" and figure {args.figure}" if args.figure else ""))
    return EXIT_OK


def cmd_schema(args) -> int:
    print(json.dumps(SCHEMAS[args.command], indent=2, sort_keys=True))
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shtarkov", description="Worst-case redundancy bounds and checks.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def output_flags(sp, nats=True):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if nats:
            sp.add_argument("--nats", action="store_true", help="report nats instead of bits")

    sp = sub.add_parser("poisson-class", help="Poisson distributions with mean at most lambda")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    output_flags(sp)
    sp.set_defaults(func=cmd_poisson_class)

    sp = sub.add_parser("envelope", help="bounds for an envelope class")
    sp.add_argument("spec", help="envelope JSON file")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--method", choices=METHODS + ("all",), default="all")
    output_flags(sp)
    sp.set_defaults(func=cmd_envelope)

    sp = sub.add_parser("iid", help="i.i.d. sources over a small alphabet")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--exact", action="store_true", help="brute-force value over types")
    sp.add_argument("--bounds", action="store_true", help="upper chain and advisory lower chain")
    output_flags(sp)
    sp.set_defaults(func=cmd_iid)

    sp = sub.add_parser("verify", help="run the seeded verification battery")
    sp.add_argument("--suite", choices=SUITES, default="all")
    sp.add_argument("--seed", type=int, default=42)
    output_flags(sp, nats=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="CSV of bounds over log-spaced n")
    sp.add_argument("spec", help="envelope JSON file")
    sp.add_argument("--n-from", type=int, required=True)
    sp.add_argument("--n-to", type=int, required=True)
    sp.add_argument("--points", type=int, default=9)
    sp.add_argument("--method", choices=METHODS + ("all",), default="all")
    sp.add_argument("--out", required=True, help="CSV path")
    sp.add_argument("--figure", help="optional PNG path for a plot of the sweep")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("schema", help="print the JSON schema of a command's --json output")
    sp.add_argument("command", choices=sorted(SCHEMAS))
    sp.set_defaults(func=cmd_schema)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NotSummable as exc:
        print(f"error: not summable: {exc}", file=sys.stderr)
        return EXIT_SUMMABLE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
