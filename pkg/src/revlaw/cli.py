"""Command-line entry point.

Exit status: 0 on success (or all checks passing), 1 when a requested
check fails, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .bitstring import BitString
from .codec import CodecId
from .combin import (
    InfiniteRateError,
    clausius_point_ratio,
    clausius_tail_ratio,
    decay_rate,
    kelvin_ratio,
    loaded_sign,
)
from .mc import ConservationViolation, TrialConfig, estimate_kelvin, estimate_transition
from .revcircuit import (
    DEFAULT_MAX_WIDTH,
    EnumerationBoundError,
    WeightCouple,
    check_bijective,
    check_conservative,
    parse_circuit,
    run,
    run_trace,
)
from .thermo import (
    DEFAULT_SLACK_BITS,
    DEFAULT_TEMPERATURE,
    PhysicalParams,
    computation_cost_lower,
    erasure_cost,
    landauer_naive,
    quasi_monotonicity_report,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

GLOBAL_DEFAULTS = {
    "format": None,
    "seed": 0,
    "temp": DEFAULT_TEMPERATURE,
    "codec": "BEST",
    "max_width": DEFAULT_MAX_WIDTH,
}
# Output format used when --format is not given.
NATIVE_FORMAT = {"run": "text", "bounds": "csv"}
# Execution settings that cannot change results stay out of the echo.
NOT_ECHOED = {"workers"}


class UsageError(Exception):
    pass


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    sup = argparse.SUPPRESS
    g.add_argument("--format", choices=["json", "csv", "text"], default=sup)
    g.add_argument("--seed", type=int, default=sup, help="64-bit seed (default 0)")
    g.add_argument("--temp", type=float, default=sup, help="bath temperature in K (default 300)")
    g.add_argument("--codec", default=sup, help="RAW, RLE, LZ78, COPYREF or BEST (default)")
    g.add_argument("--max-width", type=int, default=sup, dest="max_width",
                   help=f"exhaustive enumeration cap (default {DEFAULT_MAX_WIDTH})")
    return p


def _couple_arg(text: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}") from None
    return a, b


def _range_arg(text: str) -> range:
    try:
        parts = [int(v) for v in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) == 3 else 1
        if len(parts) not in (2, 3) or step < 1:
            raise ValueError
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"expected 'lo:hi[:step]', got {text!r}") from None
    return range(lo, hi + 1, step)


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(
        prog="revlaw", parents=[common],
        description="Erasure-cost brackets and reversibility bounds.",
    )
    parser.add_argument("--version", action="version", version=f"revlaw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a circuit on an input")
    p.add_argument("circuit", type=Path)
    p.add_argument("bits")
    p.add_argument("--trace", action="store_true", help="print every intermediate state")

    p = sub.add_parser("check", parents=[common], help="exhaustive reversibility checks")
    p.add_argument("circuit", type=Path)
    p.add_argument("--bijective", action="store_true")
    p.add_argument("--conservative", action="store_true")

    p = sub.add_parser("erase", parents=[common], help="erasure-cost bracket of a file")
    p.add_argument("s_file", type=Path)
    p.add_argument("--catalyst", type=Path)
    p.add_argument("--binary", action="store_true", help="read raw bytes, MSB first")

    p = sub.add_parser("cost", parents=[common], help="estimated cost of computing A -> B")
    p.add_argument("-A", dest="a_file", type=Path, required=True)
    p.add_argument("-B", dest="b_file", type=Path, required=True)
    p.add_argument("--catalyst", type=Path)
    p.add_argument("--binary", action="store_true")

    p = sub.add_parser("bounds", parents=[common], help="exact transition bounds")
    bsub = p.add_subparsers(dest="bound", required=True)
    q = bsub.add_parser("clausius", parents=[common])
    q.add_argument("-n", type=int, help="half length")
    q.add_argument("--source", type=_couple_arg)
    q.add_argument("--target", type=_couple_arg)
    q.add_argument("--delta", type=int, help="tail ratio: shift of at least delta_n")
    q.add_argument("--symmetric", action="store_true", help="count both imbalance directions")
    q.add_argument("--sweep", type=_range_arg, help="lo:hi[:step] over the half length")
    q.add_argument("--w", type=Fraction, default=Fraction(1, 2),
                   help="sweep source weight fraction (default 1/2)")
    q.add_argument("--delta-frac", type=Fraction, default=Fraction(1, 2), dest="delta_frac",
                   help="sweep weight shift fraction (default 1/2)")
    q.add_argument("--tail", action="store_true", help="sweep tail instead of point ratios")
    q = bsub.add_parser("kelvin", parents=[common])
    q.add_argument("-N", type=int, required=True)
    q.add_argument("-n", type=int)
    q.add_argument("-w", type=int, required=True)
    q.add_argument("--sweep", type=_range_arg, help="lo:hi[:step] over the prefix length n")

    p = sub.add_parser("mc", parents=[common], help="Monte-Carlo transition estimate")
    p.add_argument("--kelvin", action="store_true", help="estimate prefix concentration")
    p.add_argument("-n", type=int, help="half length (clausius) or prefix length (kelvin)")
    p.add_argument("--source", type=_couple_arg)
    p.add_argument("-N", type=int, help="string length (kelvin)")
    p.add_argument("-w", type=int, help="Hamming weight (kelvin)")
    p.add_argument("--gates", type=int, default=64, help="random Fredkin gate count")
    p.add_argument("--circuit", type=Path, help="explicit circuit file instead of random")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("trace", parents=[common], help="quasi-monotonicity report")
    p.add_argument("circuit", type=Path)
    p.add_argument("bits")
    p.add_argument("--slack", type=int, default=DEFAULT_SLACK_BITS)
    return parser


# --- helpers -------------------------------------------------------------------

def _read_bits(path: Optional[Path], binary: bool) -> BitString:
    if path is None:
        return BitString()
    if binary:
        return BitString.from_bytes(path.read_bytes())
    try:
        return BitString.parse(path.read_text(encoding="ascii"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise UsageError(f"{path}: not a 0/1 text file ({exc}); use --binary for raw bytes") from None


def _read_circuit(path: Path):
    return parse_circuit(path.read_text(encoding="utf-8"))


def _config(args: argparse.Namespace) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in NOT_ECHOED:
            continue
        if isinstance(v, Path):
            v = str(v)
        elif isinstance(v, range):
            v = f"{v.start}:{v.stop - 1}:{v.step}"
        elif isinstance(v, Fraction):
            v = str(v)
        elif isinstance(v, tuple):
            v = list(v)
        cfg[k] = v
    return cfg


def _emit_json(args, result) -> None:
    doc = {"version": __version__, "seed": args.seed, "config": _config(args), "result": result}
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _params(args) -> PhysicalParams:
    return PhysicalParams(temperature=args.temp)


# --- subcommands ---------------------------------------------------------------

def cmd_run(args) -> int:
    c = _read_circuit(args.circuit)
    x = BitString(args.bits)
    states = run_trace(c, x) if args.trace else [x, run(c, x)]
    out = states[-1]
    if args.format == "json":
        result = {"output": str(out)}
        if args.trace:
            result["trace"] = [str(s) for s in states]
        _emit_json(args, result)
    else:
        for s in (states if args.trace else [out]):
            print(s)
    return EXIT_OK


def cmd_check(args) -> int:
    c = _read_circuit(args.circuit)
    want_bij = args.bijective or not args.conservative
    want_cons = args.conservative or not args.bijective
    result = {"width": c.width, "gates": len(c)}
    ok = True
    if want_bij:
        v = check_bijective(c, args.max_width)
        result["bijective"] = {
            "passed": v.passed,
            "fixed_points": v.fixed_points,
            "counterexample": None if v.counterexample is None else [str(s) for s in v.counterexample],
        }
        ok &= v.passed
    if want_cons:
        structural = check_conservative(c, "structural")
        exhaustive = check_conservative(c, "exhaustive", args.max_width)
        result["conservative"] = {
            "passed": exhaustive.passed,
            "structural": structural.passed,
            "exhaustive": exhaustive.passed,
            "counterexample": None if exhaustive.counterexample is None
            else [str(s) for s in exhaustive.counterexample],
        }
        ok &= exhaustive.passed
    result["passed"] = ok
    if args.format == "text":
        for key in ("bijective", "conservative"):
            if key in result:
                r = result[key]
                extra = f" counterexample {' -> '.join(r['counterexample'])}" if r["counterexample"] else ""
                print(f"{key}: {'pass' if r['passed'] else 'FAIL'}{extra}")
    else:
        _emit_json(args, result)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_erase(args) -> int:
    s = _read_bits(args.s_file, args.binary)
    x = _read_bits(args.catalyst, args.binary)
    p = _params(args)
    bracket = erasure_cost(s, x, args.codec, p)
    rec = bracket.to_record()
    rec["naive_bits"] = len(s)
    rec["naive_joules"] = landauer_naive(len(s), p)
    if args.format == "text":
        for k, v in rec.items():
            print(f"{k}: {v}")
    else:
        _emit_json(args, rec)
    return EXIT_OK


def cmd_cost(args) -> int:
    a = _read_bits(args.a_file, args.binary)
    b = _read_bits(args.b_file, args.binary)
    x = _read_bits(args.catalyst, args.binary)
    cost = computation_cost_lower(a, b, x, args.codec, _params(args))
    rec = {"a_len": len(a), "b_len": len(b), "x_len": len(x), **cost.to_record()}
    if args.format == "text":
        for k, v in rec.items():
            print(f"{k}: {v}")
    else:
        _emit_json(args, rec)
    return EXIT_OK


def _rate(p: Fraction, n: int):
    if n < 1:
        return None
    try:
        return decay_rate(p, n)
    except InfiniteRateError:
        return float("inf")


def _clausius_rows(args) -> list[dict]:
    rows = []
    if args.sweep is not None:
        for n in args.sweep:
            s1, t1 = args.w * n, (args.w + args.delta_frac) * n
            if s1.denominator != 1 or t1.denominator != 1:
                continue
            if not (0 <= s1 <= n and 0 <= t1 <= n):
                raise UsageError(f"fractions put the couple out of range at n={n}")
            src = WeightCouple(n, int(s1), n - int(s1))
            tgt = WeightCouple(n, int(t1), n - int(t1))
            if args.tail:
                shift = loaded_sign(src) * (tgt.imbalance - src.imbalance)
                if shift < 0:
                    raise UsageError("tail sweep needs a shift toward the heavier half")
                ratio = clausius_tail_ratio(n, src, shift // 2, args.symmetric)
            else:
                ratio = clausius_point_ratio(n, src, tgt)
            rows.append(_clausius_row(n, src, tgt, ratio, "tail" if args.tail else "point"))
        return rows
    if args.n is None or args.source is None:
        raise UsageError("bounds clausius needs -n and --source (or --sweep)")
    n = args.n
    src = WeightCouple(n, *args.source)
    if args.target is not None:
        tgt = WeightCouple(n, *args.target)
        rows.append(_clausius_row(n, src, tgt, clausius_point_ratio(n, src, tgt), "point"))
    elif args.delta is not None:
        sign = loaded_sign(src)
        s1 = src.left_weight + sign * args.delta
        s2 = src.right_weight - sign * args.delta
        ratio = clausius_tail_ratio(n, src, args.delta, args.symmetric)
        rows.append(_clausius_row(n, src, (s1, s2), ratio, "tail"))
    else:
        raise UsageError("bounds clausius needs --target or --delta")
    return rows


def _clausius_row(n, src: WeightCouple, tgt, ratio: Fraction, kind: str) -> dict:
    t1, t2 = tgt.as_tuple() if isinstance(tgt, WeightCouple) else tgt
    return {
        "n": n, "s1": src.left_weight, "s2": src.right_weight, "t1": t1, "t2": t2,
        "ratio_num": ratio.numerator, "ratio_den": ratio.denominator,
        "ratio_float": float(ratio), "rate": _rate(ratio, n), "kind": kind,
    }


def _kelvin_rows(args) -> list[dict]:
    ns = args.sweep if args.sweep is not None else [args.n]
    if ns == [None]:
        raise UsageError("bounds kelvin needs -n (or --sweep)")
    rows = []
    for n in ns:
        ratio = kelvin_ratio(args.N, n, args.w)
        rows.append({
            "N": args.N, "n": n, "w": args.w,
            "ratio_num": ratio.numerator, "ratio_den": ratio.denominator,
            "ratio_float": float(ratio), "rate": _rate(ratio, n),
        })
    return rows


CLAUSIUS_COLUMNS = ["n", "s1", "s2", "t1", "t2", "ratio_num", "ratio_den", "ratio_float", "rate"]
KELVIN_COLUMNS = ["N", "n", "w", "ratio_num", "ratio_den", "ratio_float", "rate"]


def cmd_bounds(args) -> int:
    if args.bound == "clausius":
        rows, cols = _clausius_rows(args), CLAUSIUS_COLUMNS
    else:
        rows, cols = _kelvin_rows(args), KELVIN_COLUMNS
    if args.format == "json":
        _emit_json(args, {"rows": rows})
    elif args.format == "text":
        for r in rows:
            print(" ".join(f"{c}={'' if r[c] is None else r[c]}" for c in cols))
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({c: ("" if r[c] is None else r[c]) for c in cols})
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_mc(args) -> int:
    spec = _read_circuit(args.circuit) if args.circuit is not None else args.gates
    if args.kelvin:
        if None in (args.N, args.n, args.w):
            raise UsageError("mc --kelvin needs -N, -n and -w")
        stats = estimate_kelvin(args.N, args.n, args.w, spec, args.trials, args.seed, args.workers)
        rec = stats.to_record()
        ok = stats.within_bound
    else:
        if args.n is None or args.source is None:
            raise UsageError("mc needs -n and --source")
        cfg = TrialConfig(WeightCouple(args.n, *args.source), spec, args.trials, args.seed)
        stats = estimate_transition(cfg, workers=args.workers)
        rec = stats.to_record()
        ok = stats.all_within_bound
    rec["all_within_bound"] = ok
    if args.format == "text":
        print(json.dumps(rec, indent=2))
    else:
        _emit_json(args, rec)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_trace(args) -> int:
    c = _read_circuit(args.circuit)
    states = run_trace(c, BitString(args.bits))
    report = quasi_monotonicity_report(states, args.codec, args.slack)
    if args.format == "text":
        print("t\tbits\tdrop\tallowance\tflag")
        for s in report.steps:
            print(f"{s.t}\t{s.bits}\t{s.drop}\t{s.allowance}\t{'FLAG' if s.flagged else ''}")
        print(f"flagged: {len(report.flagged_steps)} ({report.note})")
    else:
        _emit_json(args, report.to_record())
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "check": cmd_check,
    "erase": cmd_erase,
    "cost": cmd_cost,
    "bounds": cmd_bounds,
    "mc": cmd_mc,
    "trace": cmd_trace,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for k, v in GLOBAL_DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    if args.format is None:
        args.format = NATIVE_FORMAT.get(args.command, "json")
    try:
        args.codec = CodecId.parse(args.codec).name
        return COMMANDS[args.command](args)
    except ConservationViolation as exc:
        print(f"revlaw: aborted, {exc}", file=sys.stderr)
        return EXIT_FAILED
    except EnumerationBoundError as exc:
        print(f"revlaw: {exc} (raise --max-width to enumerate)", file=sys.stderr)
    except (UsageError, ValueError, OSError) as exc:
        print(f"revlaw: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
