"""Command-line front end: ``admmlp {project,decode,fer,info}``.

Exit status is 0 on success, 1 on usage or I/O errors and 2 when a
decoder fails to converge to a codeword.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from .admm import DecoderConfig, decode
from .bp import BpConfig, bp_decode
from .channel import ChannelConfig, frame_rng, llr, transmit
from .code_model import BUILTIN_CODES, CodeFormatError, CodewordSampler, load_code, syndrome_ok
from .fixed_point import decode_fixed, make_format_plan, quantize_llr
from .harness import DEFAULT_FIXED_TOLERANCE, SpecError, SweepSpec, run_sweep
from .polytope import oracle_project_pp, project_pp

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; 2 is reserved for non-convergence here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(vec) -> str:
    return " ".join(f"{v:.6g}" for v in np.asarray(vec, dtype=float))


# --- project -----------------------------------------------------------------

def cmd_project(args) -> int:
    if args.dim < 2:
        raise UsageError("--dim must be at least 2")
    if args.vector is not None:
        try:
            v = np.array([float(t) for t in args.vector.split(",")])
        except ValueError:
            raise UsageError(f"cannot parse --vector {args.vector!r}") from None
        if v.shape != (args.dim,):
            raise UsageError(f"--vector has {v.size} entries, --dim is {args.dim}")
        if not np.all(np.isfinite(v)):
            raise UsageError("--vector entries must be finite")
        points = v[None, :]
    else:
        rng = np.random.default_rng(args.seed)
        points = rng.uniform(-1.0, 2.0, size=(args.random, args.dim))
    res = project_pp(points)
    oracle = oracle_project_pp(points) if args.oracle else None
    for k, v in enumerate(points):
        print(f"input:      {_fmt(v)}")
        print(f"projection: {_fmt(res.z[k])}")
        print(f"facet:      {''.join(str(b) for b in res.facet[k])}"
              f"{'  (simplex path)' if res.used_simplex[k] else ''}")
        if oracle is not None:
            print(f"oracle:     {_fmt(oracle[k])}")
            print(f"linf_gap:   {np.abs(oracle[k] - res.z[k]).max():.3e}")
        if k + 1 < len(points):
            print()
    return EXIT_OK


# --- decode ------------------------------------------------------------------

def _read_llrs(path: str, n: int) -> np.ndarray:
    try:
        vals = [float(line) for line in Path(path).read_text().split()]
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if len(vals) != n:
        raise UsageError(f"{path}: expected {n} LLRs, found {len(vals)}")
    return np.array(vals)


def cmd_decode(args) -> int:
    H = load_code(args.code)
    sent = None
    channel = None
    if args.llr is not None:
        gamma = _read_llrs(args.llr, H.n)
    else:
        channel = ChannelConfig(args.channel, H.dimension / H.n)
        rng = frame_rng(args.seed, 0)
        sent = CodewordSampler(H).sample(rng)
        y = transmit(sent, channel, rng)
        gamma = llr(y, channel)

    if args.decoder == "admm":
        d = decode(H, gamma, DecoderConfig(args.max_iters))
    elif args.decoder == "bp":
        d = bp_decode(H, gamma, BpConfig(args.max_iters))
    else:
        plan = make_format_plan(args.w_llr, args.w_msg, args.rounding, args.centered)
        if channel is not None:
            unit = llr(y, channel, fixed_scale=True)
        else:
            # file LLRs carry no channel context; map the largest onto the top code
            peak = np.abs(gamma).max()
            unit = gamma / peak if peak > 0 else gamma
        cfg = DecoderConfig(args.max_iters, integrality_tolerance=DEFAULT_FIXED_TOLERANCE)
        d = decode_fixed(H, quantize_llr(unit, plan), cfg, plan)

    valid = syndrome_ok(H, d.hard)
    print(f"hard:          {''.join(str(int(b)) for b in d.hard)}")
    print(f"iterations:    {d.iterations_used}")
    print(f"converged:     {d.converged}")
    print(f"valid:         {valid}")
    print(f"ml_certificate: {d.ml_certificate}")
    if sent is not None:
        print(f"bit_errors:    {int(np.count_nonzero(d.hard != sent))}")
    return EXIT_OK if (d.converged and valid) else EXIT_NONCONVERGED


# --- fer -----------------------------------------------------------------------

def cmd_fer(args) -> int:
    try:
        text = Path(args.spec).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read spec: {exc}") from None
    spec = SweepSpec.from_json(text)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc}") from None

    def progress(pt):
        print(f"{pt.ebn0_db:6.2f} dB  {pt.decoder_id:<40s} frames={pt.frames:<8d} "
              f"errors={pt.frame_errors:<5d} fer={pt.fer:.3e}", flush=True)

    run_sweep(spec, out, workers=args.workers, progress=progress)
    print(f"wrote {out / (spec.name + '.json')} and {out / (spec.name + '.csv')}")
    return EXIT_OK


# --- info ----------------------------------------------------------------------

def cmd_info(args) -> int:
    if args.code is None:
        for name, path in BUILTIN_CODES.items():
            print(f"{name:<10s} {path}")
        return EXIT_OK
    H = load_code(args.code)
    k = H.dimension
    print(f"n={H.n} m={H.m} k={k} rate={k / H.n:.4f} edges={H.num_edges}")
    vd = sorted(Counter(H.variable_degrees.tolist()).items())
    cd = sorted(Counter(H.check_degrees.tolist()).items())
    print("variable degrees: " + ", ".join(f"{d}x{c}" for d, c in vd))
    print("check degrees:    " + ", ".join(f"{d}x{c}" for d, c in cd))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="admmlp", description="ADMM-LP decoding of binary linear codes")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pr = sub.add_parser("project", help="project points onto the parity polytope")
    pr.add_argument("--dim", type=int, required=True)
    src = pr.add_mutually_exclusive_group(required=True)
    src.add_argument("--vector", help="comma-separated coordinates")
    src.add_argument("--random", type=int, metavar="K", help="K uniform points in [-1, 2]^d")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--oracle", action="store_true", help="also run the Dykstra oracle")
    pr.set_defaults(func=cmd_project)

    de = sub.add_parser("decode", help="decode one frame")
    de.add_argument("--code", required=True, help="alist or QC json file, or a builtin name")
    src = de.add_mutually_exclusive_group(required=True)
    src.add_argument("--llr", help="text file with one LLR per line")
    src.add_argument("--channel", type=float, metavar="EBN0_DB",
                     help="simulate a random codeword over AWGN at this Eb/N0")
    de.add_argument("--seed", type=int, default=0)
    de.add_argument("--decoder", choices=["admm", "admm-fixed", "bp"], default="admm")
    de.add_argument("--max-iters", type=int, default=500)
    de.add_argument("--w-llr", type=int, default=8)
    de.add_argument("--w-msg", type=int, default=11)
    de.add_argument("--rounding", choices=["truncate", "round_half_even"], default="truncate")
    de.add_argument("--centered", action="store_true")
    de.set_defaults(func=cmd_decode)

    fe = sub.add_parser("fer", help="run a frame-error-rate sweep")
    fe.add_argument("--spec", required=True, help="sweep JSON")
    fe.add_argument("--out", required=True, help="output directory")
    fe.add_argument("--workers", type=int, default=1)
    fe.set_defaults(func=cmd_fer)

    info = sub.add_parser("info", help="summarize a code (or list builtin codes)")
    info.add_argument("--code")
    info.set_defaults(func=cmd_info)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(message)s")
    if getattr(args, "max_iters", 1) < 1 or getattr(args, "workers", 1) < 1 \
            or (getattr(args, "random", None) is not None and args.random < 1):
        print("admmlp: error: counts must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, SpecError, CodeFormatError, ValueError, OSError) as exc:
        print(f"admmlp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
