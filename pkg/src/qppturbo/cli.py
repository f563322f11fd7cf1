"""Command-line interface: ``qppturbo <command> ...``.

Exit codes: 0 ok, 2 usage error, 3 node budget exhausted, 4 regression mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time

from . import __version__
from .bounds import INVERSE_CLASSES, best_bound
from .convcode import ConstituentSpec
from .dataset import TABLE_VERSION, load_lte_table, lte_table_text
from .dmin import BudgetExhausted, EstimatorConfig, estimate_dmin, exact_dmin, lte_regression
from .permpoly import (Qpp, find_inverse, is_irreducible, is_quadratic_pp, least_inverse_degree,
                       qc_period)
from .search import SearchConfig, run_search

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_MISMATCH = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _spec(args) -> ConstituentSpec:
    if args.feedback is None and args.feedforward is None:
        if args.nu not in (None, 3):
            raise UsageError("--nu other than 3 needs --feedback and --feedforward")
        return ConstituentSpec.lte()
    if args.feedback is None or args.feedforward is None:
        raise UsageError("give both --feedback and --feedforward")
    fb, ff = int(args.feedback, 0), int(args.feedforward, 0)
    nu = fb.bit_length() - 1
    try:
        return ConstituentSpec(nu, fb, ff)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _qpp(args) -> Qpp:
    if args.N < 2:
        raise UsageError("N must be >= 2")
    return Qpp(args.N, args.f1 % args.N, args.f2 % args.N)


def _budget(args):
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get("QPP_BUDGET_NODES")
    return int(env) if env else None


def _threads(args) -> int:
    return args.threads or os.cpu_count() or 1


# --- commands --------------------------------------------------------------


def cmd_check(args):
    q = _qpp(args)
    valid = is_quadratic_pp(q.modulus, q.f1, q.f2)
    res = {"valid": valid}
    if valid:
        L, count = least_inverse_degree(q)
        res.update(irreducible=is_irreducible(q), inverse_degree=L, inverse_count=count,
                   qc_period=qc_period(q))
    return {"N": q.modulus, "f1": q.f1, "f2": q.f2}, res, EXIT_OK


def cmd_inverse(args):
    q = _qpp(args)
    if not q.is_permutation:
        raise UsageError(f"{q} is not a permutation polynomial")
    L = args.degree or least_inverse_degree(q)[0]
    g = find_inverse(q, L)
    res = {"degree_requested": L, "inverse": None if g is None else list(g.coeffs),
           "text": None if g is None else str(g)}
    return {"N": q.modulus, "f1": q.f1, "f2": q.f2, "degree": args.degree}, res, EXIT_OK


def cmd_bounds(args):
    spec = _spec(args)
    lte = spec == ConstituentSpec.lte()
    rep = best_bound(args.N, spec.nu, args.inverse_class, spec if lte else None,
                     use_cubic_universal=not args.no_cubic_universal)
    return {"N": args.N, "nu": spec.nu, "inverse_class": args.inverse_class}, rep.to_dict(), EXIT_OK


def cmd_dmin(args):
    q = _qpp(args)
    if not q.is_permutation:
        raise UsageError(f"{q} is not a permutation polynomial")
    spec = _spec(args)
    inputs = {"N": q.modulus, "f1": q.f1, "f2": q.f2, "mode": args.mode, "method": args.method,
              "cap": args.cap}
    budget = _budget(args)
    if args.method == "exact":
        try:
            r = exact_dmin(q, spec, args.mode, weight_cap=args.cap, budget=budget)
        except BudgetExhausted as exc:
            return inputs, exc.partial.to_dict(), EXIT_BUDGET
    else:
        cfg = EstimatorConfig.for_length(q.modulus)
        cfg.weight_cap = args.cap
        cfg.budget = budget
        r = estimate_dmin(q, spec, args.mode, cfg)
        if "budget" in r.note:
            return inputs, r.to_dict(), EXIT_BUDGET
    out = r.to_dict()
    out["witnesses"] = out["witnesses"][: args.max_witnesses]
    return inputs, out, EXIT_OK


def cmd_search(args):
    spec = _spec(args)
    cfg = SearchConfig(args.N, irreducible_only=not args.include_reducible, inverse_class=args.inverse_class,
                       min_inverse_degree=args.min_degree, weight_cap=args.cap, budget=_budget(args),
                       exact_max_n=args.exact_max_n, exact_top=args.exact_top, mode=args.mode, spec=spec,
                       threads=_threads(args))
    hits = run_search(cfg)
    rows = [h.to_dict() for h in hits[: args.limit]] if args.limit else [h.to_dict() for h in hits]
    inputs = {"N": args.N, "inverse_class": args.inverse_class, "min_degree": args.min_degree,
              "irreducible_only": not args.include_reducible, "mode": args.mode}
    res = {"candidates": len(hits), "rows": rows}
    if not args.include_reducible:
        res["excluded"] = "reducible QPPs (equivalent to linear permutations) are not searched"
    return inputs, res, EXIT_OK


def cmd_regress(args):
    rows = [r for r in load_lte_table() if args.min_n <= r.N <= args.max_n]
    out = lte_regression(rows, exact_max_n=args.exact_max_n, estimate_max_n=args.estimate_max_n,
                         budget=_budget(args), threads=_threads(args))
    res = {"rows": [r.to_dict() for r in out],
           "passed": sum(r.passed is True for r in out),
           "failed": sum(r.passed is False for r in out),
           "skipped": sum(r.passed is None for r in out)}
    code = EXIT_OK
    if res["failed"]:
        code = EXIT_MISMATCH
    elif any("budget" in r.note for r in out):
        code = EXIT_BUDGET
    return {"min_n": args.min_n, "max_n": args.max_n, "exact_max_n": args.exact_max_n,
            "estimate_max_n": args.estimate_max_n}, res, code


def cmd_lte_table(args):
    if args.dump:
        return None, lte_table_text(), EXIT_OK
    rows = [dict(zip(("N", "f1", "f2", "dmin", "multiplicity"), r.as_tuple())) for r in load_lte_table()]
    return {}, {"rows": rows}, EXIT_OK


# --- output ----------------------------------------------------------------


def _table_rows(results):
    if isinstance(results, dict):
        for key in ("rows", "entries"):
            if isinstance(results.get(key), list):
                return results[key]
    return None


def render_text(command, results) -> str:
    rows = _table_rows(results)
    lines = []
    if isinstance(results, dict):
        for k, v in results.items():
            if k in ("rows", "entries"):
                continue
            lines.append(f"{k}: {v}")
    if rows:
        cols = list(rows[0].keys())
        cells = [[("-" if r.get(c) is None else str(r.get(c))) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append("  ".join(c.rjust(w) for c, w in zip(cols, widths)))
        for row in cells:
            lines.append("  ".join(x.rjust(w) for x, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def render_csv(results) -> str:
    rows = _table_rows(results)
    if rows is None:
        rows = [results]
    buf = io.StringIO()
    cols = list(rows[0].keys()) if rows else []
    w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    return buf.getvalue()


def make_report(command, inputs, results, elapsed) -> dict:
    return {"command": command, "inputs": inputs, "results": results,
            "dataset_version": TABLE_VERSION, "version": __version__, "timing": {"seconds": round(elapsed, 3)}}


# --- parser ----------------------------------------------------------------


def _add_qpp(p):
    p.add_argument("N", type=int)
    p.add_argument("f1", type=int)
    p.add_argument("f2", type=int)


def _add_code(p):
    p.add_argument("--nu", type=int, default=None, help="encoder memory (3 = LTE pair)")
    p.add_argument("--feedback", default=None, help="feedback taps as an integer, e.g. 0b1101")
    p.add_argument("--feedforward", default=None, help="feedforward taps as an integer, e.g. 0b1011")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qppturbo", description="QPP interleaver and turbo-code distance tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    fmt = parser.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit the full report as JSON")
    fmt.add_argument("--csv", action="store_true", help="emit result rows as CSV")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validity, irreducibility, inverse degree and period")
    _add_qpp(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("inverse", help="an inverse polynomial of least (or given) degree")
    _add_qpp(p)
    p.add_argument("--degree", type=int, default=None)
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("bounds", help="upper bounds on the best d_min at length N")
    p.add_argument("N", type=int)
    p.add_argument("--class", dest="inverse_class", choices=INVERSE_CLASSES, default="any")
    p.add_argument("--no-cubic-universal", action="store_true", help="skip the cubic-class length-independent bound")
    _add_code(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("dmin", help="minimum distance of one QPP turbo code")
    _add_qpp(p)
    p.add_argument("--mode", choices=("dual", "tailbiting"), default="dual")
    p.add_argument("--method", choices=("exact", "estimate"), default="exact")
    p.add_argument("--cap", type=int, default=None, help="weight cap (default: best bound, else 60)")
    p.add_argument("--budget", type=int, default=None, help="node budget (default: $QPP_BUDGET_NODES)")
    p.add_argument("--max-witnesses", type=int, default=8)
    _add_code(p)
    p.set_defaults(func=cmd_dmin)

    p = sub.add_parser("search", help="rank all QPPs of length N by d_min")
    p.add_argument("N", type=int)
    p.add_argument("--class", dest="inverse_class", choices=INVERSE_CLASSES, default="any")
    p.add_argument("--min-degree", type=int, default=None, help="only QPPs with inverse degree >= this")
    p.add_argument("--include-reducible", action="store_true")
    p.add_argument("--mode", choices=("dual", "tailbiting"), default="dual")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--exact-max-n", type=int, default=256)
    p.add_argument("--exact-top", type=int, default=None, help="exact search for at most this many candidates")
    p.add_argument("--limit", type=int, default=None, help="print only the best rows")
    _add_code(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("regress", help="compare against the embedded LTE table")
    p.add_argument("--min-n", type=int, default=0)
    p.add_argument("--max-n", type=int, default=128)
    p.add_argument("--exact-max-n", type=int, default=128)
    p.add_argument("--estimate-max-n", type=int, default=0)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("lte-table", help="show the embedded LTE table")
    p.add_argument("--dump", action="store_true", help="print the raw data file")
    p.set_defaults(func=cmd_lte_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.perf_counter()
    try:
        inputs, results, code = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"qppturbo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = time.perf_counter() - t0
    if inputs is None:
        sys.stdout.write(results)
        return code
    if args.json:
        report = make_report(args.command, inputs, results, elapsed)
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    elif args.csv:
        sys.stdout.write(render_csv(results))
    else:
        sys.stdout.write(render_text(args.command, results))
    if code == EXIT_BUDGET:
        print("qppturbo: node budget exhausted, results are partial", file=sys.stderr)
    elif code == EXIT_MISMATCH:
        print("qppturbo: regression mismatch", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
