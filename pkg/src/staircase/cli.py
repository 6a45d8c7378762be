"""Command-line entry point: ``staircase <command> [flags]``.

Tables go to stdout as CSV (default) or JSON; diagnostics go to stderr.
Randomized commands require ``--seed`` and echo it in the output header.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from staircase import floor, sim, streamfile
from staircase.blocks import encode_stream
from staircase.floor import PatternShape
from staircase.resolver import decode_stream_improved
from staircase.window import DecoderConfig, decode_stream_regular


class CliError(Exception):
    pass


# -- output ----------------------------------------------------------------

def _cell(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.4e}"
    return str(value)


def emit(args, columns, rows, meta=None, out=None):
    """Write ``rows`` as CSV with a ``# key=value`` preamble, or as JSON."""
    out = out or sys.stdout
    meta = meta or {}
    if args.format == "json":
        doc = dict(meta)
        doc["columns"] = list(columns)
        doc["rows"] = [dict(zip(columns, (_json_value(v) for v in row))) for row in rows]
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    for key, value in meta.items():
        out.write(f"# {key}={value}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_cell(v) for v in row) + "\n")


def _json_value(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def _need_seed(args):
    if args.seed is None:
        raise CliError(f"{args.command} is randomized and needs --seed")


def _params(args):
    return streamfile.params_for(args.q, args.t, args.shorten)


def _config(args, improved: bool) -> DecoderConfig:
    W = args.window if args.window is not None else (10 if improved else 7)
    return DecoderConfig(W=W, v_max=args.vmax)


def _parse_shapes(text: str, t: int) -> list[PatternShape]:
    shapes = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        try:
            K, L, eps = (int(v) for v in item.split(","))
        except ValueError:
            raise CliError(f"bad shape {item!r}, expected K,L,eps") from None
        shapes.append(PatternShape(K, L, eps, t))
    return shapes


# -- commands --------------------------------------------------------------

def cmd_encode(args):
    params = _params(args)
    if args.m is not None and args.m != params.m:
        raise CliError(f"--m {args.m} does not match the code (m={params.m})")
    per_block = params.payload_bits
    if args.input:
        with open(args.input, "rb") as fh:
            bits = np.unpackbits(np.frombuffer(fh.read(), np.uint8), bitorder="little")
        count = max(1, math.ceil(bits.size / per_block))
        info = np.zeros(count * per_block, np.uint8)
        info[: bits.size] = bits
        seed = None
    else:
        _need_seed(args)
        if args.blocks < 1:
            raise CliError("--blocks must be >= 1")
        rng = np.random.default_rng(args.seed)
        info = rng.integers(0, 2, args.blocks * per_block, dtype=np.uint8)
        seed = args.seed
    stream = encode_stream(params, info)
    streamfile.write(args.output, stream)
    meta = {"seed": seed} if seed is not None else {}
    emit(args, ["blocks", "m", "payload_bits"], [(len(stream), params.m, int(info.size))], meta)


def cmd_bsc(args):
    _need_seed(args)
    stream = streamfile.read(args.input)
    received, mask = sim.bsc_apply(stream, args.p, args.seed)
    streamfile.write(args.output, received)
    emit(args, ["p", "bits", "flipped"], [(args.p, int(stream.blocks[1:].size), int(mask.sum()))],
         {"seed": args.seed})


def cmd_decode(args):
    stream = streamfile.read(args.input)
    code = stream.params.code
    for flag, have in (("q", code.field.q), ("t", code.t), ("shorten", code.shorten), ("m", stream.m)):
        want = getattr(args, flag)
        if want is not None and want != have:
            raise CliError(f"--{flag} {want} conflicts with the stream header ({have})")
    config = _config(args, args.improved)
    reference = streamfile.read(args.reference) if args.reference else None
    decode = decode_stream_improved if args.improved else decode_stream_regular
    decoded, report = decode(stream, config, reference=reference)
    if args.output:
        streamfile.write(args.output, decoded)
    columns = ["blocks", "windows", "passes", "bits_flipped", "residual_words", "bit_errors"]
    row = (len(stream), report.windows, report.passes, report.bits_flipped,
           report.residual_nonzero, report.bit_errors)
    emit(args, columns, [row], {"decoder": "improved" if args.improved else "regular"})


def cmd_fig4(args):
    if args.gamma:
        _need_seed(args)
    args.sampler = args.sampler or args.default_sampler
    lo, hi = floor.epsilon_bounds(args.K, args.L, args.t)
    binom_floor = math.comb(args.L, args.t + 1) ** args.K
    rows = []
    for eps in range(lo, hi + 1):
        shape = PatternShape(args.K, args.L, eps, args.t)
        n_tilde = floor.row_count_tilde(shape)
        gamma_n = None
        if args.gamma:
            gamma = floor.gamma_estimate(shape, args.gamma, args.seed + eps, args.sampler)
            gamma_n = gamma * n_tilde
        rows.append((eps, floor.n_hat(shape), n_tilde, floor.exact_count(shape), gamma_n, binom_floor))
    meta = {"K": args.K, "L": args.L, "t": args.t}
    if args.gamma:
        meta.update(seed=args.seed, gamma_samples=args.gamma, sampler=args.sampler)
    emit(args, ["eps", "n_hat", "n_tilde", "n_exact", "gamma_n", "binom_floor"], rows, meta)


def cmd_count(args):
    args.sampler = args.sampler or args.default_sampler
    lo, hi = floor.epsilon_bounds(args.K, args.L, args.t)
    eps_values = [args.eps] if args.eps is not None else range(lo, hi + 1)
    if args.gamma:
        _need_seed(args)
        kind = "gamma_n"
    else:
        kind = "n_tilde" if args.tilde else "n_hat" if args.hat else "n_exact"
    rows = []
    for eps in eps_values:
        shape = PatternShape(args.K, args.L, eps, args.t)
        if args.gamma:
            gamma = floor.gamma_estimate(shape, args.gamma, args.seed + eps, args.sampler)
            value = gamma * floor.row_count_tilde(shape)
        elif args.tilde:
            value = floor.row_count_tilde(shape)
        elif args.hat:
            value = floor.n_hat(shape)
        else:
            value = floor.exact_count(shape)
        rows.append((eps, value))
    meta = {"K": args.K, "L": args.L, "t": args.t}
    if args.gamma:
        meta.update(seed=args.seed, gamma_samples=args.gamma, sampler=args.sampler)
    emit(args, ["eps", kind], rows, meta)


def cmd_table1(args):
    params = _params(args)
    t = params.code.t
    if args.shapes:
        keys = [(s.K, s.L, s.eps) for s in _parse_shapes(args.shapes, t)]
    else:
        keys = list(sim.DEFAULT_SOLVED_FRACTIONS)
    meta = {"p": args.p, "xi": args.xi, "m": params.m, "t": t}
    if args.printed:
        unknown = [k for k in keys if k not in sim.DEFAULT_SOLVED_FRACTIONS]
        if unknown:
            raise CliError(f"no printed solved fraction for {unknown}")
        solved = {k: sim.DEFAULT_SOLVED_FRACTIONS[k] for k in keys}
        meta["solved"] = "printed"
    else:
        _need_seed(args)
        config = _config(args, True)
        solved = {}
        for key in keys:
            report = sim.run_solved_fraction(PatternShape(*key, t), params, args.trials, args.seed, config)
            solved[key] = report.solved_fraction
            print(f"{key}: {report.resolved}/{report.trials} in {report.elapsed:.1f}s", file=sys.stderr)
        meta.update(seed=args.seed, trials=args.trials, solved="simulated")
    terms = sim.floor_terms(solved, params.m, t, args.p, args.xi)
    rows = [(tm.shape.K, tm.shape.L, tm.shape.eps, tm.solved_fraction, tm.P_C_old, tm.P_C_new, tm.P_floor)
            for tm in terms]
    meta["floor_total"] = f"{floor.floor_total(terms):.4e}"
    emit(args, ["K", "L", "eps", "solved", "pc_old", "pc_new", "p_floor"], rows, meta)


def cmd_floor(args):
    if not 0 < args.pmin <= args.pmax < 1:
        raise CliError("need 0 < pmin <= pmax < 1")
    if args.points < 1:
        raise CliError("--points must be >= 1")
    grid = np.geomspace(args.pmin, args.pmax, args.points)
    rows = sim.conjectured_floor_curve(sim.DEFAULT_SOLVED_FRACTIONS, args.m, args.t, args.xi, grid)
    meta = {"m": args.m, "t": args.t, "xi": args.xi, "kind": "formula conjecture"}
    emit(args, ["p", "ber_regular", "ber_improved"], rows, meta)


def cmd_capacity(args):
    rate = sim.parse_rate(args.rate)
    p = sim.capacity_threshold(rate)
    if args.format == "json":
        emit(args, ["rate", "p_star"], [(str(rate), p)])
    else:
        sys.stdout.write(f"{p:.6f}\n")


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="staircase", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--seed", type=int)
    code = argparse.ArgumentParser(add_help=False)
    code.add_argument("--q", type=int, default=9)
    code.add_argument("--t", type=int, default=2)
    code.add_argument("--shorten", type=int, default=2)
    code.add_argument("--m", type=int)
    decoder = argparse.ArgumentParser(add_help=False)
    decoder.add_argument("--window", type=int, help="window size W (default 7, or 10 with --improved)")
    decoder.add_argument("--vmax", type=int, default=8)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", parents=[common, code], help="encode a payload into a stream file")
    p.add_argument("--input", help="payload bytes (default: random bits from --seed)")
    p.add_argument("--blocks", type=int, default=16, help="data blocks for a random payload")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("bsc", parents=[common], help="pass a stream file through a BSC")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_bsc)

    p = sub.add_parser("decode", parents=[common, decoder], help="decode a stream file")
    for flag in ("q", "t", "shorten", "m"):
        p.add_argument(f"--{flag}", type=int, help="check against the stream header")
    p.add_argument("--improved", action="store_true")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--reference", help="transmitted stream, for error counts")
    p.set_defaults(func=cmd_decode)

    shape = argparse.ArgumentParser(add_help=False)
    shape.add_argument("--K", type=int, default=6)
    shape.add_argument("--L", type=int, default=6)
    shape.add_argument("--t", type=int, default=2)
    # default resolved per command; set_defaults would leak through the shared parent
    shape.add_argument("--sampler", choices=sorted(floor.SAMPLERS))

    p = sub.add_parser("fig4", parents=[common, shape], help="pattern counts over all weights")
    p.add_argument("--gamma", type=int, default=0, help="samples per weight for gamma_n")
    p.set_defaults(func=cmd_fig4, default_sampler="recipe")

    p = sub.add_parser("count", parents=[common, shape], help="count stall patterns")
    p.set_defaults(default_sampler="uniform")
    p.add_argument("--eps", type=int)
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--exact", action="store_true")
    kind.add_argument("--tilde", action="store_true")
    kind.add_argument("--hat", action="store_true")
    kind.add_argument("--gamma", type=int, default=0, metavar="N")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("table1", parents=[common, code, decoder], help="solved fractions and floor terms")
    p.add_argument("--shapes", help="semicolon-separated K,L,eps triples")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--printed", action="store_true", help="use the printed solved fractions")
    p.add_argument("--p", type=float, default=sim.DEFAULT_P)
    p.add_argument("--xi", type=float, default=sim.DEFAULT_XI)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("floor", parents=[common], help="conjectured output BER curves")
    p.add_argument("--pmin", type=float, default=4e-3)
    p.add_argument("--pmax", type=float, default=6e-3)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--xi", type=float, default=sim.DEFAULT_XI)
    p.add_argument("--m", type=int, default=255)
    p.add_argument("--t", type=int, default=2)
    p.set_defaults(func=cmd_floor)

    p = sub.add_parser("capacity", parents=[common], help="BSC crossover at which capacity = rate")
    p.add_argument("--rate", required=True, help="e.g. 236/255 or 0.5")
    p.set_defaults(func=cmd_capacity)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"staircase {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
