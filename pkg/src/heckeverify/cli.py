"""Command-line front end: ``heckeverify --suite <name> [options]``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .exact_poly import CoefPoly
from .parse import ParseError, parse_poly, tokenize
from .rewrite_engine import StepBudgetExceeded, step_budget
from .suites import SuiteError, SuiteSpec, run_suite, suite_names

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_param_poly(text: str, main: str) -> CoefPoly:
    """Polynomial in ``main``; any other identifier becomes a parameter."""
    idents = [t.value for t in tokenize(text) if t.kind == "IDENT"]
    params = tuple(dict.fromkeys(i for i in idents if i != main))
    return parse_poly(text, (main,) + params)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="heckeverify",
        description="Run exact verification suites for infinitesimal Hecke algebras of sl2.",
    )
    ap.add_argument("--suite", default="all", help="suite name (default: all)")
    ap.add_argument("--n", type=int, default=None, help="n = deg z' (default 2, or deg of --zprime)")
    ap.add_argument("--zprime", default=None, help="z' as a polynomial in Delta (default Delta^n)")
    ap.add_argument("--Q", dest="Q", default=None, help="Q as a polynomial in u (dq-confluence, p-from-q)")
    ap.add_argument("--perturb-P", dest="perturb_P", default="1",
                    help="shift added to P in the dq-confluence negative control (default 1)")
    ap.add_argument("--samples", type=int, default=100, help="random q samples for boddington")
    ap.add_argument("--seed", type=int, default=0, help="seed for random samples")
    ap.add_argument("--step-budget", dest="step_budget", type=int, default=None,
                    help="rule applications allowed per reduction (default HECKE_STEP_BUDGET or 10^6)")
    ap.add_argument("--format", choices=("json", "md"), default="json")
    ap.add_argument("--out", default=None, help="write the report here; timing goes to <out>.timing.json")
    ap.add_argument("--list-suites", action="store_true", help="print the suite catalog and exit")
    return ap


def spec_from_args(args: argparse.Namespace) -> SuiteSpec:
    if args.suite not in suite_names():
        raise UsageError(f"unknown suite {args.suite!r}; see --list-suites")
    zprime = None
    n = args.n
    if args.zprime is not None:
        zprime = parse_param_poly(args.zprime, "Delta")
        d = zprime.degree("Delta")
        if n is None:
            n = d
        elif n != d:
            raise UsageError(f"--n {n} does not match deg z' = {d}")
    if n is None:
        n = 2
    if n < 1:
        raise UsageError("--n must be positive")
    Q = parse_param_poly(args.Q, "u") if args.Q is not None else None
    try:
        perturb = Fraction(args.perturb_P)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--perturb-P expects a rational number, got {args.perturb_P!r}")
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if args.step_budget is not None and args.step_budget < 1:
        raise UsageError("--step-budget must be positive")
    return SuiteSpec(args.suite, n=n, zprime=zprime, Q=Q, perturb_P=perturb,
                     samples=args.samples, seed=args.seed)


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.list_suites:
        print("\n".join(suite_names()))
        return EXIT_OK
    try:
        spec = spec_from_args(args)
    except ParseError as e:
        print(f"heckeverify: parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as e:
        print(f"heckeverify: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        with step_budget(args.step_budget):
            report = run_suite(spec)
    except SuiteError as e:
        print(f"heckeverify: {e}", file=sys.stderr)
        return EXIT_USAGE
    except StepBudgetExceeded as e:
        print(f"heckeverify: step budget exceeded: {e}", file=sys.stderr)
        return EXIT_FAIL
    text = report.to_json() if args.format == "json" else report.to_markdown()
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        Path(str(out) + ".timing.json").write_text(report.timing_json(), encoding="utf-8")
    else:
        sys.stdout.write(text)
    for e in report.failures():
        print(f"FAIL {e.id}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
