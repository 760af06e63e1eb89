"""Command line front end: analyze models or chart files, list models, selftest."""

from __future__ import annotations

import argparse
import sys

from .charts import ChartError, parse_chart
from .models import get_model, model_names
from .report import analyze_chart, analyze_model
from .selftest import run_selftest
from .tensor_core import InvariantViolation


def _parse_point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"bad --point value {text!r}: expected v1,v2,...") from None


def _cmd_analyze(args) -> int:
    if (args.model is None) == (args.chart is None):
        print("analyze needs exactly one of --model or --chart", file=sys.stderr)
        return 2
    try:
        points = [_parse_point(p) for p in args.point] if args.point else None
        kwargs = dict(points=points, tol=args.tol, h=args.fd_step,
                      samples=args.samples, seed=args.seed)
        if args.model is not None:
            try:
                model = get_model(args.model)
            except KeyError as exc:
                print(exc.args[0], file=sys.stderr)
                return 2
            report = analyze_model(model, **kwargs)
        else:
            try:
                text = args.chart.read_text()
            except OSError as exc:
                print(f"cannot read chart file: {exc}", file=sys.stderr)
                return 2
            report = analyze_chart(parse_chart(text), name=str(args.chart), **kwargs)
    except (ChartError, InvariantViolation, ValueError) as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_text())
    return 0 if report.passed else 1


def _cmd_models(_args) -> int:
    header = f"{'name':8} {'dim':>3} {'classes':16} {'nu':>6} {'hol':>6} {'einstein':>9}  verdict"
    print(header)
    print("-" * len(header))
    for name in model_names():
        model = get_model(name)
        e = model.expected
        classes = " ".join(k for k, v in e.flags().items() if v) or "-"
        fmt = lambda v: "-" if v is None else f"{v:g}"
        verdict = e.verdict_kind + (f"({e.verdict_constant:g})" if e.verdict_constant is not None else "")
        print(f"{name:8} {2 * model.chart.m:>3} {classes:16} {fmt(e.antiholomorphic):>6} "
              f"{fmt(e.holomorphic):>6} {fmt(e.einstein):>9}  {verdict}")
    return 0


def _cmd_selftest(args) -> int:
    return 0 if run_selftest(seed=args.seed) else 1


def main(argv=None) -> int:
    from pathlib import Path

    parser = argparse.ArgumentParser(
        prog="ahgeom",
        description="Numerical curvature analysis of almost Hermitian charts and models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full analysis on a model or chart file")
    group = analyze.add_mutually_exclusive_group()
    group.add_argument("--model", help="bundled model name (see 'models')")
    group.add_argument("--chart", type=Path, help="chart file to analyze")
    analyze.add_argument("--point", action="append", metavar="V1,V2,...",
                         help="evaluation point, repeatable (default: chart points)")
    analyze.add_argument("--tol", type=float, default=1e-4,
                         help="residual tolerance for flags and verdicts (default 1e-4)")
    analyze.add_argument("--fd-step", type=float, default=1e-4,
                         help="finite difference step (default 1e-4)")
    analyze.add_argument("--samples", type=int, default=256,
                         help="planes sampled per kind per point (default 256)")
    analyze.add_argument("--seed", type=int, default=42, help="sampling seed (default 42)")
    analyze.add_argument("--format", choices=("text", "json"), default="text")
    analyze.set_defaults(func=_cmd_analyze)

    models = sub.add_parser("models", help="list bundled models and their expected data")
    models.set_defaults(func=_cmd_models)

    selftest = sub.add_parser("selftest", help="run the algebraic property suite")
    selftest.add_argument("--seed", type=int, default=42)
    selftest.set_defaults(func=_cmd_selftest)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
