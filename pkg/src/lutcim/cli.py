"""Command-line front end: ``lutcim {mul,cost,analyze,nn,vectors}``.

Exit codes: 0 success, 2 usage error, 1 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import costmodel, erroranalysis, nnharness
from .bitcore import BitcoreError, UWord, parse_bits
from .lutmul import EXACT_KINDS, ModelError, MultiplierConfig, MultiplierKind, program

FIG14_W = "0110"
FIG14_YS = ("1010", "1011", "0011", "1100")


class UsageError(Exception):
    pass


def parse_operand(text, width=None):
    """``0110`` is binary (MSB first, width = length); ``0d10`` is decimal."""
    text = text.strip()
    try:
        if text.lower().startswith("0d"):
            value = int(text[2:], 10)
            return UWord(width or 4, value)
        word = parse_bits(text)
    except (ValueError, BitcoreError) as exc:
        raise UsageError(f"bad operand {text!r}: {exc}") from None
    if width is not None and word.width != width:
        if word.value >> width:
            raise UsageError(f"operand {text!r} does not fit in {width} bits")
        word = UWord(width, word.value)
    return word


def _kind(text):
    try:
        return MultiplierKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _num(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else float(x)


def cmd_mul(args, out):
    w = parse_operand(args.w, args.width)
    y = parse_operand(args.y, args.width)
    try:
        model = program(MultiplierConfig(args.kind, w.width, y.width), w)
        result, trace = model.evaluate(y)
    except (ModelError, BitcoreError) as exc:
        raise UsageError(str(exc)) from None
    exact = w.value * y.value
    line = f"{result.bits()} ({result.value})"
    if result.value != exact:
        line += f"  exact {exact}, error {exact - result.value}"
    print(line, file=out)
    if args.trace:
        for s in trace.per_position:
            print(f"  stage {s.stage} bit {s.bit}: {s.kind} carry={s.carry}", file=out)
        print(f"  HA={trace.ha_count} FA={trace.fa_count}", file=out)
    return 0


def _cost_row(kind, n, weights, fanout, zlsb):
    c = costmodel.count(kind, n, fanout, zlsb)
    row = {"kind": kind.value, "n": n}
    row.update(c.as_dict())
    row["area"] = _num(costmodel.weighted_area(c, weights))
    if kind is MultiplierKind.DC and n > 4:
        row["note"] = "extrapolated"
    return row


def cmd_cost(args, out):
    try:
        weights = costmodel.load_weights(args.weights) if args.weights else costmodel.DEFAULT_WEIGHTS
    except (OSError, ValueError) as exc:
        raise UsageError(f"weights file: {exc}") from None
    zlsb = None
    if args.zlsb is not None:
        zlsb = parse_operand(args.zlsb, 6)
    try:
        if args.all:
            kinds = [k for k in costmodel.ALL_KINDS_4B if k.exact or args.n == 4]
            rows = [_cost_row(k, args.n, weights, args.fanout, None) for k in kinds]
        else:
            if args.kind is None:
                raise UsageError("cost needs --kind or --all")
            rows = [_cost_row(args.kind, args.n, weights, args.fanout, zlsb)]
    except (costmodel.UnsupportedWidth, ModelError) as exc:
        raise UsageError(str(exc)) from None
    if args.all and not args.json:
        base = rows[0]["area"]
        print(f"{'kind':<12}{'sram':>10}{'mux':>10}{'ha':>6}{'fa':>6}{'area':>12}{'vs trad':>9}", file=out)
        for r in rows:
            print(
                f"{r['kind']:<12}{r['sram']:>10}{r['mux']:>10}{r['ha']:>6}{r['fa']:>6}"
                f"{r['area']:>12}{base / r['area']:>9.3f}",
                file=out,
            )
        return 0
    body = rows if args.all else {k: v for k, v in rows[0].items() if k not in ("kind", "n")}
    print(json.dumps(body), file=out)
    return 0


def cmd_analyze(args, out):
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    target = args.target
    if target == "dist":
        dist = erroranalysis.product_distribution()
        (outdir / "distribution.csv").write_text(erroranalysis.distribution_csv(dist))
        p0 = dist[0]
        print(f"P(0)={float(p0):.6f} ({p0.numerator}/{p0.denominator})", file=out)
        print("impossible=" + ",".join(map(str, erroranalysis.impossible_values())), file=out)
        return 0
    if target == "hamming":
        rows = erroranalysis.hamming_sweep()
        (outdir / "hamming.csv").write_text(erroranalysis.hamming_csv(rows))
        best = erroranalysis.best_fixed_approximant(rows)
        r = rows[best]
        print(
            f"argmin={best} value={float(r.per_bit):.4f} ({r.per_bit.numerator}/{r.per_bit.denominator}) "
            f"unnormalized={float(r.mean_bits):.4f}",
            file=out,
        )
        print(f"published={erroranalysis.PUBLISHED_MIN_HAMMING} delta={float(r.per_bit) - erroranalysis.PUBLISHED_MIN_HAMMING:+.4f}", file=out)
        return 0
    if args.kind is None:
        raise UsageError(f"analyze {target} needs --kind approx-dc or approx-dc2")
    try:
        report = erroranalysis.error_report(args.kind)
    except erroranalysis.UnsupportedKind as exc:
        raise UsageError(str(exc)) from None
    if target == "heatmap":
        (outdir / "heatmap.csv").write_text(erroranalysis.heatmap_csv(report))
    else:
        (outdir / "histogram.csv").write_text(erroranalysis.histogram_csv(report))
    s = report.stats
    print(
        f"kind={report.kind.value} min={s.min} max={s.max} mean={float(s.mean):.4f} "
        f"mae={float(s.mean_abs):.4f} zero_fraction={float(s.zero_fraction):.4f}",
        file=out,
    )
    return 0


def cmd_nn(args, out):
    try:
        dims = nnharness.parse_topology(args.topology)
    except nnharness.DimMismatch as exc:
        raise UsageError(str(exc)) from None
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    net = nnharness.QuantizedMLP.random(dims, args.seed)
    for r in nnharness.mae_eval(net, args.trials, args.seed):
        print(r.to_json(), file=out)
    return 0


def cmd_vectors(args, out):
    w = parse_bits(FIG14_W)
    print(f"W={FIG14_W}", file=out)
    for kind in EXACT_KINDS:
        model = program(MultiplierConfig(kind), w)
        for ytext in FIG14_YS:
            y = parse_bits(ytext)
            result, _ = model.evaluate(y)
            if result.value != w.value * y.value:
                raise AssertionError(f"{kind.value} gave {result.value} for W={FIG14_W} Y={ytext}")
            print(f"{kind.value:<12} Y={ytext} OUT={result.bits()} ({result.value})", file=out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="lutcim", description="LUT-based compute-in-memory multiplier toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mul", help="multiply two operands through a multiplier model")
    m.add_argument("--kind", type=_kind, default=MultiplierKind.OPTIMIZED_DC)
    m.add_argument("--w", required=True, help="weight, binary (0110) or decimal (0d6)")
    m.add_argument("--y", required=True, help="input, binary (1010) or decimal (0d10)")
    m.add_argument("--width", type=int, help="operand width (default: binary string length, or 4)")
    m.add_argument("--trace", action="store_true", help="print the adder trace")
    m.set_defaults(func=cmd_mul)

    c = sub.add_parser("cost", help="component counts and weighted area")
    c.add_argument("--kind", type=_kind)
    c.add_argument("--all", action="store_true", help="all variants side by side")
    c.add_argument("--n", type=int, default=4, help="operand width")
    c.add_argument("--fanout", type=int, default=2, help="chunks sharing one LUT bank")
    c.add_argument("--zlsb", help="fixed Z_LSB for approx-dc (6-bit)")
    c.add_argument("--weights", help="name=value area weights file")
    c.add_argument("--json", action="store_true", help="JSON output in --all mode")
    c.set_defaults(func=cmd_cost)

    a = sub.add_parser("analyze", help="error analysis CSVs")
    a.add_argument("target", choices=["dist", "hamming", "heatmap", "histogram"])
    a.add_argument("--kind", type=_kind)
    a.add_argument("--out", default="out", help="output directory (default ./out)")
    a.set_defaults(func=cmd_analyze)

    n = sub.add_parser("nn", help="quantized MLP MAE per multiplier variant")
    n.add_argument("--trials", type=int, default=nnharness.DEFAULT_TRIALS)
    n.add_argument("--seed", type=int, default=0)
    n.add_argument("--topology", default="4-8-2")
    n.set_defaults(func=cmd_nn)

    v = sub.add_parser("vectors", help="fixed-weight test vectors on every exact variant")
    v.set_defaults(func=cmd_vectors)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.exit(2, f"lutcim {args.command}: error: {exc}\n")
    except AssertionError as exc:
        print(f"lutcim: internal invariant violated: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
