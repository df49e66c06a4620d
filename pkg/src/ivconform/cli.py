"""Command line: ``run``, ``generate``, ``find-hard``, ``validate``, ``build-suites``."""

from __future__ import annotations

import argparse
import re
import sys
import time
from typing import Optional, Sequence

from . import __version__, shipped_suites
from . import bigfloat as bf
from .bigfloat import DOWN, UP
from .generator import (
    DEFAULT_BUDGET,
    SearchRange,
    find_hard_cases,
    hard_suite_cases,
    make_case,
    sidecar_path,
    write_sidecar,
)
from .harness import AccuracyClaim, make_adapter, run_suite
from .hexfloat import ParseError, format_hex, parse_number
from .interval import IllFormed, parse_interval_literal
from .pointfuncs import FunctionId, ResourceError
from .suite import FORMAT_HINTS, SuiteError, dumps_suite, load_suite, save_suite, validate_case

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _format(precision: int, hint: Optional[str]) -> bf.Format:
    if hint:
        fmt = FORMAT_HINTS[hint]
        if precision is not None and precision != fmt.precision:
            raise ValueError(f"{hint} has precision {fmt.precision}, not {precision}")
        return fmt
    if precision is None:
        raise ValueError("--precision or --format-hint is required")
    return bf.wide(precision)


def _load_all(paths, err) -> Optional[list]:
    suites, bad = [], False
    for path in paths:
        try:
            s = load_suite(path)
        except (OSError, SuiteError) as exc:
            print(f"error: {exc}", file=err)
            bad = True
            continue
        for i, c in enumerate(s.cases):
            for issue in validate_case(c):
                if issue.fatal:
                    bad = True
                    print(f"{path}: case {i}: {issue}", file=err)
        suites.append(s)
    return None if bad else suites


def cmd_run(args, out, err) -> int:
    paths = list(args.suites)
    if args.shipped or not paths:
        paths += [str(p) for p in shipped_suites()]
    suites = _load_all(paths, err)
    if suites is None:
        return EXIT_USAGE
    try:
        adapter = make_adapter(args.adapter, timeout=args.timeout)
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    try:
        report = run_suite(suites, adapter, args.claim, jobs=args.jobs, seed=args.seed, fuzz=args.fuzz)
    finally:
        close = getattr(adapter, "close", None)
        if close:
            close()
    out.write(report.tsv())
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.dumps())
    if args.junit:
        with open(args.junit, "w", encoding="utf-8") as fh:
            fh.write(report.junit())
    if args.plot:
        from .plots import plot_verdicts

        plot_verdicts(report, args.plot)
    summary = ", ".join(f"{k}: {v}" for k, v in report.counts.items()) or "no cases"
    print(f"{len(report.results)} cases ({summary}) in {report.wall_time:.2f} s", file=err)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_generate(args, out, err) -> int:
    try:
        fmt = _format(args.precision, args.format_hint)
        f = FunctionId(args.function)
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    try:
        inputs = [parse_interval_literal(t, fmt) for t in args.input]
        case = make_case(f, inputs, fmt, comment=args.comment)
    except (ParseError, IllFormed, TypeError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    if args.out:
        save_suite([case], args.out)
    else:
        out.write(dumps_suite([case]))
    return EXIT_OK


_RANGE = re.compile(r"^\s*\[\s*([^,\s]+)\s*,\s*([^\]\)\s]+)\s*([\]\)])\s*$")


def parse_range(text: str, fmt: bf.Format) -> SearchRange:
    """``[a,b)`` or ``[a,b]`` as a :class:`SearchRange` of ``fmt``."""
    m = _RANGE.match(text)
    if not m:
        raise ValueError(f"malformed range {text!r}; expected [a,b) or [a,b]")
    t0 = parse_number(m.group(1), fmt, UP)
    if m.group(3) == ")":
        t1 = parse_number(m.group(2), fmt, UP)
    else:
        t1 = bf.next_up(parse_number(m.group(2), fmt, DOWN))
    return SearchRange(t0, t1, fmt)


def cmd_find_hard(args, out, err) -> int:
    try:
        fmt = _format(args.precision, args.format_hint)
        r = parse_range(args.range, fmt)
    except (ValueError, ParseError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        cases = find_hard_cases(args.function, r, args.hardness, args.pattern, jobs=args.jobs,
                                budget=args.budget, working_precision=args.working_precision)
    except (ResourceError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAIL
    out.write("x\thardness\trun_kind\n")
    for hc in cases:
        out.write(f"{format_hex(hc.x)}\t{hc.hardness}\t{hc.run_kind}\n")
    if args.out:
        save_suite(hard_suite_cases(cases, fmt, pairs=False), args.out)
        write_sidecar(cases, sidecar_path(args.out))
    if args.plot:
        from .plots import plot_hardness

        plot_hardness(cases, args.plot, f"{args.function}, p={fmt.precision}, h>={args.hardness}")
    print(f"{len(cases)} hard cases among {len(r)} arguments in {time.perf_counter() - start:.2f} s", file=err)
    return EXIT_OK


def cmd_validate(args, out, err) -> int:
    status = EXIT_OK
    for path in args.suites:
        try:
            s = load_suite(path)
        except (OSError, SuiteError) as exc:
            print(f"{path}: {exc}", file=err)
            status = EXIT_FAIL
            continue
        fatal = 0
        for i, c in enumerate(s.cases):
            for issue in validate_case(c, exact_required=args.exact):
                fatal += issue.fatal
                out.write(f"{path}\t{i}\t{issue.severity}\t{issue.path}\t{issue.message}\n")
        print(f"{path}: {len(s.cases)} cases, {fatal} fatal issues", file=err)
        if fatal:
            status = EXIT_FAIL
    return status


def cmd_build_suites(args, out, err) -> int:
    from .catalog import build_all

    build_all(args.outdir, jobs=args.jobs, log=lambda m: print(m, file=err))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ivconform", description="IEEE 1788 interval arithmetic conformance toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="judge an implementation against suites")
    run.add_argument("suites", nargs="*", help="suite files (default: the shipped suites)")
    run.add_argument("--shipped", action="store_true", help="also run every shipped suite")
    run.add_argument("--claim", choices=[c.value for c in AccuracyClaim], default="tight")
    run.add_argument("--adapter", default="builtin", help="builtin or cmd:<command line>")
    run.add_argument("--fuzz", type=int, default=0, metavar="N", help="random containment probes per case")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--timeout", type=float, default=10.0, help="per-call timeout for cmd adapters (s)")
    run.add_argument("--report", metavar="OUT.json")
    run.add_argument("--junit", metavar="OUT.xml")
    run.add_argument("--plot", metavar="OUT.png", help="bar chart of verdicts per function")
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("generate", help="compute expected outputs for given inputs")
    gen.add_argument("--function", required=True)
    gen.add_argument("--input", action="append", required=True, help="interval literal; repeat per argument")
    gen.add_argument("--precision", type=int)
    gen.add_argument("--format-hint", choices=sorted(FORMAT_HINTS))
    gen.add_argument("--comment")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_generate)

    hard = sub.add_parser("find-hard", help="exhaustive hard-to-round search")
    hard.add_argument("--function", required=True)
    hard.add_argument("--precision", type=int)
    hard.add_argument("--format-hint", choices=sorted(FORMAT_HINTS))
    hard.add_argument("--range", required=True, help='"[a,b)" or "[a,b]" inside one binade')
    hard.add_argument("--hardness", type=int, required=True)
    hard.add_argument("--pattern", choices=["zeros", "ones", "both"], default="both")
    hard.add_argument("--jobs", type=int, default=1)
    hard.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum number of arguments")
    hard.add_argument("--working-precision", type=int, help="initial working precision (default p+h+64)")
    hard.add_argument("--out", help="suite of singleton cases; metadata goes to a .hardcases.json sidecar")
    hard.add_argument("--plot", metavar="OUT.png", help="hardness plot")
    hard.set_defaults(func=cmd_find_hard)

    val = sub.add_parser("validate", help="check suite files")
    val.add_argument("suites", nargs="+")
    val.add_argument("--exact", action="store_true", help="inexact endpoints are fatal")
    val.set_defaults(func=cmd_validate)

    build = sub.add_parser("build-suites", help="regenerate the shipped suites")
    build.add_argument("--outdir")
    build.add_argument("--jobs", type=int, default=1)
    build.set_defaults(func=cmd_build_suites)
    return p


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=err)
        return EXIT_USAGE
    if getattr(args, "fuzz", 0) < 0:
        print("error: --fuzz must be >= 0", file=err)
        return EXIT_USAGE
    return args.func(args, out, err)


if __name__ == "__main__":
    sys.exit(main())
