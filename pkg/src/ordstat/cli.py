"""``ordstat`` command-line interface.

Exit codes: 0 success, 1 verification failure, 2 domain error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .asymptotics import NAMED_CASES, AsymptoticCase, convergence_table, decoupling_rate
from .continuous import IndexSet, kl_min_max, kl_subset, kl_whole_sequence, mi_pair, mi_subsets
from .discrete import DiscreteDist, check_upper_bound, mi_bernoulli, mi_discrete_exact
from .errors import ConsistencyError, DomainError, OracleError
from . import suites

log = logging.getLogger("ordstat")

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3

CASE_IDS = ("r-vs-max", "r-vs-m", "k-step", "quantile-pair", "quantile-vs-max")
LOG_BASES = {"e": math.e, "2": 2.0, "10": 10.0}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    """15 significant digits; infinities print as ``inf``."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.15g}"


def _jsonable(obj):
    if isinstance(obj, float):
        return fmt(obj) if not math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def _emit(args, record: dict, lines: Sequence[str]) -> None:
    if args.json:
        print(json.dumps(_jsonable(record)))
    else:
        for line in lines:
            print(line)


def _record(args, command: str, params: dict, value, method: str = "closed-form", **extra) -> dict:
    return {"command": command, "params": params, "value": value, "method": method,
            "log_base": args.log_base, **extra}


def _indices(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise DomainError(f"cannot parse index list {text!r}") from None


def _n_list(text: str) -> list[int]:
    """``"2..100"`` (inclusive), ``"2..100:7"`` (with step) or ``"10,20,50"``."""
    try:
        if ".." in text:
            lo, _, rest = text.partition("..")
            hi, _, step = rest.partition(":")
            return list(range(int(lo), int(hi) + 1, int(step or 1)))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise DomainError(f"cannot parse n list {text!r}") from None


# --------------------------------------------------------------------------
# commands


def cmd_mi(args) -> int:
    scale = args.scale
    if args.subsets:
        a, b = (_indices(s) for s in args.subsets)
        res = mi_subsets(args.n, a, b)
        params = {"n": args.n, "subsets": [a, b]}
    else:
        if args.r is None or args.m is None:
            raise DomainError("mi needs --r and --m, or --subsets")
        res = mi_pair(args.n, args.r, args.m)
        params = {"n": args.n, "r": args.r, "m": args.m}
    value = res.value * scale
    _emit(args, _record(args, "mi", params, value, res.method, infinite=res.infinite), [fmt(value)])
    return EXIT_OK


def cmd_kl(args) -> int:
    n = args.n
    if args.minmax:
        value, params = kl_min_max(n), {"n": n, "minmax": True}
    elif args.whole:
        value, params = kl_whole_sequence(n), {"n": n, "whole": True}
    else:
        idx = _indices(args.subset)
        value, params = kl_subset(IndexSet.of(n, idx)), {"n": n, "subset": idx}
    value *= args.scale
    _emit(args, _record(args, "kl", params, value), [fmt(value)])
    return EXIT_OK


def _case_from_args(args) -> AsymptoticCase:
    if args.case in NAMED_CASES:
        return NAMED_CASES[args.case]
    if args.case not in CASE_IDS:
        raise DomainError(f"unknown case {args.case!r}; choose from {', '.join(CASE_IDS + tuple(NAMED_CASES))}")
    return AsymptoticCase(args.case, r=args.r, m=args.m, k=args.k, alpha=args.alpha, beta=args.beta)


def _write_csv(header: Sequence[str], rows: Sequence[Sequence[float]], out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([str(v) if isinstance(v, (int, np.integer)) else fmt(v) for v in row])
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        Path(out).write_text(buf.getvalue(), encoding="utf-8", newline="\n")


def cmd_limit(args) -> int:
    case = _case_from_args(args)
    scale = args.scale
    if args.sweep:
        ns = []
        for n in _n_list(args.sweep):
            try:
                case.indices(n)
                ns.append(n)
            except DomainError as exc:
                log.warning("skipping n=%d: %s", n, exc)
        if not ns:
            raise DomainError("no valid n in the sweep")
        rows = [(r.n, r.scaled_exact * scale, r.limit * scale, r.gap * scale) for r in convergence_table(case, ns)]
        _write_csv(("n", "scaled_exact", "limit", "gap"), rows, args.out)
        return EXIT_OK
    value = case.limit() * scale
    params = {"case": case.case_id, "r": case.r, "m": case.m, "k": case.k, "alpha": case.alpha, "beta": case.beta}
    _emit(args, _record(args, "limit", params, value, "limit", scale=case.scale, rates=decoupling_rate(case)),
          [fmt(value)])
    return EXIT_OK


def cmd_discrete(args) -> int:
    if (args.bernoulli is None) == (args.dist is None):
        raise DomainError("give exactly one of --bernoulli or --dist")
    if args.bernoulli is not None:
        dist = DiscreteDist.bernoulli(args.bernoulli)
        value = mi_bernoulli(args.n, args.bernoulli, args.r, args.m)
        params = {"n": args.n, "r": args.r, "m": args.m, "bernoulli": args.bernoulli}
    else:
        dist = DiscreteDist.from_json(args.dist)
        value = mi_discrete_exact(args.n, dist, args.r, args.m)
        params = {"n": args.n, "r": args.r, "m": args.m, "dist": dist.to_mapping()}
    scale = args.scale
    extra, lines = {}, [fmt(value * scale)]
    if args.check_bound:
        chk = check_upper_bound(args.n, dist, args.r, args.m)
        extra = {"bound": {"holds": chk.holds, "margin": chk.margin * scale, "continuous": chk.continuous * scale}}
        lines += [f"holds={str(chk.holds).lower()}", f"margin={fmt(chk.margin * scale)}"]
    _emit(args, _record(args, "discrete", params, value * scale, **extra), lines)
    return EXIT_OK


def figure_rows(name: str, p: float = 0.5, n_values: Sequence[int] = (2, 5, 10, 50)):
    """Header and rows of one of the figure tables (natural-log units)."""
    if name == "fig1":
        case = NAMED_CASES["median-vs-max"]
        return ("n", "n_times_mi", "limit"), [(r.n, r.scaled_exact, r.limit) for r in convergence_table(case, range(2, 101))]
    if name == "fig3":
        rows = [(n, suites.fig3_bernoulli(n, p), suites.fig3_uniform(n)) for n in range(1, 51)]
        return ("n", "mi_bernoulli_p05_step1", "mi_uniform_step1"), rows
    if name == "fig2":
        ps = np.round(np.arange(1, 100) / 100.0, 2)
        ns = [n for n in n_values if n >= 2]
        if not ns:
            raise DomainError("fig2 needs at least one n >= 2")
        rows = [(float(q), *[mi_bernoulli(n, float(q), n - 1, n) for n in ns]) for q in ps]
        return ("p", *[f"mi_bernoulli_n{n}_step1" for n in ns]), rows
    raise DomainError(f"unknown figure {name!r}")


def cmd_figure(args) -> int:
    header, rows = figure_rows(args.name, args.p, _n_list(args.n_values))
    rows = [(r[0], *[v * args.scale for v in r[1:]]) for r in rows]
    _write_csv(header, rows, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite is None and not args.csv:
        raise DomainError("name a suite or pass --csv")
    results = []
    if args.suite is not None:
        try:
            results += suites.run(args.suite, seed=args.seed, budget=args.budget)
        except OracleError as exc:
            results.append(suites.SuiteResult(args.suite, [{"error": str(exc), "best_estimate": exc.best_estimate,
                                                             "pass": False}]))
    for path in args.csv or ():
        results.append(suites.verify_csv(path, LOG_BASES[args.log_base], args.p))
    ok = all(r.passed for r in results)
    report = {"command": "verify", "pass": ok, "seed": args.seed, "budget": args.budget,
              "suites": [r.to_dict() for r in results]}
    text = json.dumps(_jsonable(report), indent=None if args.json else 1)
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    for r in results:
        print(f"{r.name}: {'pass' if r.passed else 'FAIL'} ({len(r.checks) - r.failures}/{len(r.checks)})",
              file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--log-base", choices=sorted(LOG_BASES), default=d("e"),
                   help="logarithm base for information quantities (default e, i.e. nats)")
    p.add_argument("--json", action="store_true", default=d(False), help="emit a JSON record instead of bare numbers")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ordstat", description="Information measures between order statistics.")
    _add_common(parser, suppress=False)
    # subcommands accept the same flags; SUPPRESS keeps them from resetting a flag given earlier
    common = _Parser(add_help=False)
    _add_common(common, suppress=True)

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mi", parents=[common], help="mutual information of order statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--subsets", nargs=2, metavar="LIST", help='two comma-separated index lists, e.g. "1,2" "3,4"')
    p.set_defaults(func=cmd_mi)

    p = sub.add_parser("kl", parents=[common], help="divergence from the product of marginals")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--subset", help="comma-separated indices")
    g.add_argument("--whole", action="store_true", help="all n order statistics")
    g.add_argument("--minmax", action="store_true", help="minimum and maximum")
    p.set_defaults(func=cmd_kl)

    p = sub.add_parser("limit", parents=[common], help="large-n limits and convergence sweeps")
    p.add_argument("--case", required=True, help=f"one of {', '.join(CASE_IDS + tuple(NAMED_CASES))}")
    p.add_argument("--r", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--sweep", metavar="NLIST", help='sample sizes, e.g. "2..100" or "10,100,1000"')
    p.add_argument("--out", help="CSV destination for --sweep (default stdout)")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("discrete", parents=[common], help="MI of order statistics of a discrete sample")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--bernoulli", type=float, metavar="P")
    p.add_argument("--dist", metavar="FILE", help='JSON file {"support": [...], "probs": [...]}')
    p.add_argument("--check-bound", action="store_true", help="compare with the continuous upper bound")
    p.set_defaults(func=cmd_discrete)

    p = sub.add_parser("figure", parents=[common], help="write figure data as CSV")
    p.add_argument("name", choices=("fig1", "fig2", "fig3"))
    p.add_argument("--out", help="CSV destination (default stdout)")
    p.add_argument("--p", type=float, default=0.5, help="Bernoulli parameter for fig3 (default 0.5)")
    p.add_argument("--n-values", default="2,5,10,50", help="sample sizes for the fig2 p-sweep")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", parents=[common], help="run oracle and invariant suites")
    p.add_argument("suite", nargs="?", choices=(*suites.SUITES, "all"))
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, help="per-suite effort cap (see README)")
    p.add_argument("--csv", nargs="+", metavar="FILE", help="re-validate CSV files written by this tool")
    p.add_argument("--p", type=float, default=0.5, help="Bernoulli parameter used when re-checking fig3 CSVs")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    args.scale = 1.0 / math.log(LOG_BASES[args.log_base])
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"ordstat: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"ordstat: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OracleError, ConsistencyError) as exc:
        print(f"ordstat: check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
