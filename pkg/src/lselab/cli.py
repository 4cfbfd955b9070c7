"""Command-line front end: eval, analyze, experiment, formats.

Exit codes: 0 success, 1 bound violation in an experiment, 2 bad input or
I/O failure.  Numeric flags on results do not change the exit code.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .analysis import ALGORITHM_IDS, bound_leading_term, cond_lse, cond_softmax, y_range
from .harness import (
    DataSpec,
    emit_csv,
    generate,
    ingest_csv,
    run_experiment,
    summarize,
)
from .kernels import lse_softmax_basic, lse_softmax_shifted, softmax_alt
from .precision import (
    NAMED_FORMATS,
    ArithmeticContext,
    format_params,
    round_to_format,
)
from .svgplot import emit_svg_scatter

_ALG_CHOICES = ("basic", "shifted", "alt-basic", "alt-shifted")


def _fmt9(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.9g}"


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise SystemExit(2)


def _input_vector(args) -> list[float]:
    if args.x is None:
        print("error: --x is required", file=sys.stderr)
        raise SystemExit(2)
    x = _parse_vector(args.x)
    if not x or any(not math.isfinite(v) for v in x):
        print("error: input vector must be nonempty and finite", file=sys.stderr)
        raise SystemExit(2)
    return x


def cmd_formats(args) -> int:
    header = (
        f"{'name':<10}{'u':>12}{'r_min_s':>12}{'r_min':>12}{'r_max':>12}"
        f"{'log r_min_s':>14}{'log r_min':>12}{'log r_max':>12}"
    )
    print(header)
    for name in NAMED_FORMATS:
        f = format_params(name)
        print(
            f"{name:<10}{f.unit_roundoff:>12.3g}{f.r_min_subnormal:>12.3g}"
            f"{f.r_min:>12.3g}{f.r_max:>12.3g}"
            f"{math.log(f.r_min_subnormal):>14.3g}{math.log(f.r_min):>12.3g}"
            f"{math.log(f.r_max):>12.3g}"
        )
    return 0


def cmd_eval(args) -> int:
    x = _input_vector(args)
    try:
        fmt = None if args.format == "fp64-native" else format_params(args.format)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    ctx = ArithmeticContext(fmt)
    if fmt is not None:
        x = [round_to_format(v, fmt) for v in x]
    if args.alg == "basic":
        res = lse_softmax_basic(x, ctx)
    elif args.alg == "shifted":
        res = lse_softmax_shifted(x, ctx)
    else:
        from_shifted = args.alg == "alt-shifted"
        base = lse_softmax_shifted(x, ctx) if from_shifted else lse_softmax_basic(x, ctx)
        res = softmax_alt(x, base.y, ctx, from_shifted=from_shifted)
    if args.json:
        print(
            json.dumps(
                {
                    "algorithm": res.algorithm_id,
                    "format": args.format,
                    "y": res.y,
                    "g": list(res.g),
                    "flags": sorted(res.flags),
                }
            )
        )
    else:
        print(f"algorithm: {res.algorithm_id}")
        print(f"format: {args.format}")
        print(f"y: {_fmt9(res.y)}")
        print("g: [" + ", ".join(_fmt9(v) for v in res.g) + "]")
        print("flags: " + (",".join(sorted(res.flags)) if res.flags else "none"))
    return 0


def cmd_analyze(args) -> int:
    x = _input_vector(args)
    cf = cond_lse(x)
    cg_exact, cg_upper = cond_softmax(x)
    lo, hi = y_range(x)
    bounds = {aid: bound_leading_term(aid, x).leading_factor for aid in ALGORITHM_IDS}
    if args.json:
        print(
            json.dumps(
                {
                    "cond_lse": cf,
                    "cond_softmax_exact": cg_exact,
                    "cond_softmax_upper": cg_upper,
                    "y_range": [lo, hi],
                    "bounds": bounds,
                }
            )
        )
    else:
        print(f"cond_lse: {_fmt9(cf)}")
        print(f"cond_softmax_exact: {_fmt9(cg_exact)}")
        print(f"cond_softmax_upper: {_fmt9(cg_upper)}")
        print(f"y_range: [{_fmt9(lo)}, {_fmt9(hi)}]")
        for aid in ALGORITHM_IDS:
            print(f"bound[{aid}]: {_fmt9(bounds[aid])}")
    return 0


def _parse_genspec(text: str, n: int, count: int, seed: int) -> DataSpec:
    kind, _, rest = text.partition(":")
    kind = kind.replace("-", "_")
    try:
        params = tuple(float(t) for t in rest.split(",")) if rest else ()
        return DataSpec(kind=kind, params=params, n=n, count=count, seed=seed)
    except ValueError as exc:
        print(f"error: bad generator spec {text!r}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def cmd_experiment(args) -> int:
    try:
        fmt = format_params(args.format)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if (args.gen is None) == (args.csv is None):
        print("error: give exactly one of --gen or --csv", file=sys.stderr)
        return 2
    try:
        if args.csv is not None:
            data = ingest_csv(args.csv)
        else:
            spec = _parse_genspec(args.gen, args.n, args.count, args.seed)
            data = generate(spec, fmt)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    records = run_experiment(data, fmt, workers=args.threads)
    summary = summarize(records)
    try:
        emit_csv(records, f"{args.out}.csv")
        emit_csv(summary, f"{args.out}_summary.csv")
        if args.svg:
            emit_svg_scatter(
                records,
                "bnd_lse_basic",
                "err_lse_basic",
                f"{args.out}_lse_basic.svg",
                log_axes=args.log_axes,
            )
            emit_svg_scatter(
                records,
                "bnd_lse_shift",
                "err_lse_shift",
                f"{args.out}_lse_shift.svg",
                log_axes=args.log_axes,
            )
            emit_svg_scatter(
                records,
                "trial_id",
                "sum_dev_basic",
                f"{args.out}_sum_dev_basic.svg",
                reference_line=False,
            )
            emit_svg_scatter(
                records,
                "trial_id",
                "sum_dev_shift",
                f"{args.out}_sum_dev_shift.svg",
                reference_line=False,
            )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(f"trials: {summary.trials}")
    for name, st in summary.per_algorithm.items():
        med = "n/a" if st.median is None else _fmt9(st.median)
        mx = "n/a" if st.max is None else _fmt9(st.max)
        print(
            f"{name}: finite={st.finite_count} max_err={mx} median_err={med} "
            f"violations={st.bound_violations} overflows={st.overflow_count}"
        )
    for p in summary.pairs:
        if p.count == 0:
            print(f"ratio {p.numerator}/{p.denominator}: n/a")
        else:
            ident = "n/a" if p.identical_fraction is None else f"{p.identical_fraction:.3f}"
            print(
                f"ratio {p.numerator}/{p.denominator}: mean={p.mean:.4g} "
                f"gmean={p.geometric_mean:.4g} min={p.min:.4g} max={p.max:.4g} "
                f"identical={ident}"
            )
    if summary.total_bound_violations > 0:
        print(f"BOUND VIOLATIONS: {summary.total_bound_violations}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lselab",
        description="log-sum-exp / softmax accuracy analysis in low-precision arithmetic",
    )
    sub = p.add_subparsers(dest="subcommand", required=True)

    pe = sub.add_parser("eval", help="evaluate one vector with one algorithm")
    pe.add_argument("--alg", choices=_ALG_CHOICES, default="shifted")
    pe.add_argument("--format", default="fp64")
    pe.add_argument("--x", help="comma-separated input vector")
    pe.add_argument("--json", action="store_true")
    pe.set_defaults(func=cmd_eval)

    pa = sub.add_parser("analyze", help="condition numbers and error bounds")
    pa.add_argument("--x", help="comma-separated input vector")
    pa.add_argument("--json", action="store_true")
    pa.set_defaults(func=cmd_analyze)

    px = sub.add_parser("experiment", help="run a scaled-error experiment suite")
    px.add_argument("--gen", help="generator spec, e.g. uniform:-20,20 or wide-spread:30")
    px.add_argument("--csv", help="read input vectors from CSV instead of generating")
    px.add_argument("--n", type=int, default=10)
    px.add_argument("--count", type=int, default=100)
    px.add_argument("--seed", type=int, default=0)
    px.add_argument("--format", default="fp16")
    px.add_argument("--out", default="experiment")
    px.add_argument("--threads", type=int, default=None)
    px.add_argument("--svg", action="store_true", help="also write SVG scatter plots")
    px.add_argument("--log-axes", action="store_true")
    px.set_defaults(func=cmd_experiment)

    pf = sub.add_parser("formats", help="print the supported format parameters")
    pf.set_defaults(func=cmd_formats)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
