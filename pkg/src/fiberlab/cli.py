"""Command-line entry point ``fiberlab``."""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import decomp, io, lab
from . import operators as ops
from .bumps import BumpProfile, make_family


def _window(text):
    if not text:
        return 0, None
    lo, _, hi = text.partition(":")
    return int(lo or 0), (int(hi) if hi else None)


def _file_symbol(path: str, n: int) -> ops.Symbol2D:
    sym = io.read(path, as_symbol=True)
    if not isinstance(sym, ops.Symbol2D) or sym.n != n:
        raise SystemExit(f"{path}: expected a 2-D symbol of size {n}")
    return sym


def cmd_apply(args) -> int:
    inputs = [io.read_grid(p) for p in (args.in1, args.in2, args.in3) if p]
    n = inputs[0].n
    k_min, k_max = _window(args.window)
    if os.path.exists(args.symbol):
        m = _file_symbol(args.symbol, n)
        if args.op == "twisted":
            out = ops.twisted_paraproduct(*inputs, m)
        elif args.op == "tensor":
            out = ops.tensor_bilinear(*inputs, m, m)
        elif args.op == "tripletwist":
            out = ops.tripletwist(*inputs, m, m, m)
        else:
            raise SystemExit(f"operator {args.op} does not take a symbol file")
    else:
        entry, _, op = lab.resolve(lab.OpSpec(args.op, args.symbol, k_min, k_max), n)
        if len(inputs) != entry.arity:
            raise SystemExit(f"operator {args.op} needs {entry.arity} inputs, got {len(inputs)}")
        out = op(*inputs)
    io.write(args.out, out)
    return 0


def cmd_sweep(args) -> int:
    with open(args.config) as fh:
        cfg = lab.parse_sweep_config(fh.read())
    records, _ = lab.sweep(cfg, out=args.out, threads=args.threads)
    print(f"{len(records)} records written to {args.out}")
    return 0


def cmd_cone(args) -> int:
    m = ops.Symbol2D.from_function(lab._multi_symbol(args.symbol), args.n)
    dec = decomp.cone_decompose(m, modes=args.modes)
    _, res = decomp.cone_reconstruct(dec, args.n)
    lines = [
        f"symbol {args.symbol} n {args.n} modes {args.modes} scales {dec.k_min}..{dec.k_max}",
        f"profile r0 {dec.profile.r0} r1 {dec.profile.r1} phase constant {dec.phase_constant:.17g}",
        f"annulus {res.annulus[0]:g} <= |zeta| <= {res.annulus[1]:g} ({res.points} points)",
        f"max residual {res.max_residual:.6e} l2 residual {res.l2_residual:.6e}",
        f"decay exponents {dec.decay.exponents[0]:.4f} {dec.decay.exponents[1]:.4f} c_2 {dec.decay.c_N:.6g}",
    ]
    text = "\n".join(lines) + "\n"
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(dec.to_csv())
    return 0


def cmd_cz(args) -> int:
    F = io.read_grid(args.input)
    dec = decomp.fiberwise_cz(F, args.level, args.p2, args.p3prime)
    rep = decomp.cz_verify(dec, F)
    text = dec.report()
    text += f"verification {'passed' if rep.passed else 'FAILED'}: " + ", ".join(
        f"{k}={'ok' if v else 'fail'}" for k, v in rep.checks.items()
    ) + "\n"
    text += "".join(f"  {d}\n" for d in rep.diagnostics)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if rep.passed else 1


def cmd_counterexample(args) -> int:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = lab.parse_counterexample_config(fh.read())
    text = lab.counterexample_experiment(cfg).text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_telescope(args) -> int:
    fam = make_family(BumpProfile(), args.n, args.kmin, args.kmax)
    rng = np.random.default_rng(args.seed)
    f = rng.standard_normal(args.n) + 1j * rng.standard_normal(args.n)
    g = rng.standard_normal(args.n) + 1j * rng.standard_normal(args.n)
    r = decomp.telescoping_check(f, g, fam, fam, fam.k_min, fam.k_max)
    rel = r / (np.abs(f).max() * np.abs(g).max())
    print(f"window {fam.k_min}..{fam.k_max} residual {r:.3e} relative {rel:.3e}")
    return 0


def cmd_range(args) -> int:
    p = [args.p1, args.p2] + ([args.p3] if args.p3 is not None else [])
    e = lab.ExponentTuple(tuple(p))
    label = "p4'" if e.arity == 3 else "p3'"
    print(f"{lab.known_range(args.case, e)} ({label} = {e.output:.17g})")
    return 0


def _exponent(text: str) -> float:
    return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fiberlab", description="Fiber-wise multiplier laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("apply", help="apply an operator to MPFW1 inputs")
    p.add_argument("--op", required=True, choices=sorted(lab.OPERATORS))
    p.add_argument("--in1", required=True)
    p.add_argument("--in2", required=True)
    p.add_argument("--in3")
    p.add_argument("--symbol", default="riesz", help="riesz, one, or an MPFW1 symbol file")
    p.add_argument("--window", help="scale window kmin:kmax")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("sweep", help="run a norm-ratio sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cone", help="cone decomposition of a named symbol")
    p.add_argument("--symbol", default="riesz", choices=["riesz", "one"])
    p.add_argument("--modes", type=int, default=16)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--report")
    p.add_argument("--csv", help="write the coefficients as CSV")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("cz", help="fiber-wise Calderon-Zygmund decomposition")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--level", type=float, required=True)
    p.add_argument("--p2", type=float, required=True)
    p.add_argument("--p3prime", type=float, required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_cz)

    p = sub.add_parser("counterexample", help="lambda-scaling reduction experiment")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("telescope", help="telescoping identity residual on random data")
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--kmin", type=int, default=0)
    p.add_argument("--kmax", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_telescope)

    p = sub.add_parser("range", help="classify exponents against a known range")
    p.add_argument("--case", required=True)
    p.add_argument("--p1", type=_exponent, required=True)
    p.add_argument("--p2", type=_exponent, required=True)
    p.add_argument("--p3", type=_exponent)
    p.set_defaults(func=cmd_range)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
