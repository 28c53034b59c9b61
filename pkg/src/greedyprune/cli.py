"""Command-line entry point: ``greedyprune <command> [options]``.

Exit codes: 0 success, 2 usage/config error, 3 I/O or file-format error,
4 algorithmic error (e.g. an instance too large for the exact solver).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import objective_value
from .cost import CostParams, tflops_ratio, tokens_for_ratio
from .errors import AlgorithmError, ConfigError, FormatError
from .harness import DEFAULT_TAU, METHODS, RunConfig, compare_methods, make_record, run_method, sweep_tau
from .io import (
    checksum_hex,
    decode_token_file,
    planted_sidecar_path,
    read_planted_metadata,
    read_saliency_file,
    read_selection,
    write_planted_metadata,
    write_selection,
    dumps_selection,
    write_token_file,
    SelectionRecord,
)
from .saliency import ablate_top_fraction, compute_saliency
from .synth import PlantedInstance, generate_clustered
from .viz import GridMap

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_ALGO = 0, 2, 3, 4

TAU_HELP = f"redundancy threshold (default {DEFAULT_TAU}; artifact default, not a published value)"


def _grid(text: str):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, e.g. 24x24; got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("grid dimensions must be positive")
    return w, h


def _floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers; got {text!r}") from None


def _load_input(path, saliency_file=None):
    data = Path(path).read_bytes()
    tokens, query = decode_token_file(data)
    if saliency_file is not None:
        weights = read_saliency_file(saliency_file)
        if weights.shape[0] != tokens.shape[0]:
            raise ConfigError(f"--saliency-file has {weights.shape[0]} values for {tokens.shape[0]} tokens")
    elif query is not None:
        weights = compute_saliency(tokens, query)
    else:
        raise ConfigError(f"{path} carries no query vector; pass --saliency-file")
    return tokens, weights, checksum_hex(data)


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_prune(args) -> int:
    cfg = RunConfig(
        method=args.method,
        budget=args.budget,
        tau=args.tau,
        backfill=not args.no_backfill,
        seed=args.seed,
        grid=args.grid,
        cap=args.cap,
        seed_rule=args.seed_rule,
    )
    tokens, weights, checksum = _load_input(args.input, args.saliency_file)
    sel, us = run_method(cfg, tokens, weights)
    rec = make_record(cfg, sel, tokens, weights, checksum, 0 if args.no_timing else us)
    if args.output:
        write_selection(args.output, rec)
    else:
        sys.stdout.write(dumps_selection(rec))
    return EXIT_OK


def _planted_for(args, tokens):
    path = args.planted or planted_sidecar_path(args.input)
    if args.planted is None and not Path(path).exists():
        return None
    meta = read_planted_metadata(path)
    return PlantedInstance(
        tokens=tokens,
        query=np.zeros(tokens.shape[1]),
        cluster_of=np.asarray(meta["cluster_of"]),
        planted_critical=tuple(meta["planted_critical"]),
        intra_sim_min=meta["intra_sim_min"],
        inter_sim_max=meta["inter_sim_max"],
    )


def cmd_compare(args) -> int:
    tokens, weights, _ = _load_input(args.input, args.saliency_file)
    table = compare_methods(
        tokens,
        weights,
        args.methods,
        args.budget,
        args.tau,
        seed=args.seed,
        grid=args.grid,
        planted=_planted_for(args, tokens),
        cap=args.cap,
        timing=not args.no_timing,
    )
    _emit(table.render(args.format), args.output)
    return EXIT_OK


def cmd_sweep_tau(args) -> int:
    tokens, weights, _ = _load_input(args.input, args.saliency_file)
    table = sweep_tau(tokens, weights, args.budget, args.taus, backfill=not args.no_backfill)
    _emit(table.render(args.format), args.output)
    return EXIT_OK


def cmd_flops(args) -> int:
    try:
        params = CostParams(
            total_layers=args.layers,
            prune_layer=args.prune_layer,
            text_len=args.text_len,
            orig_visual=args.visual,
            hidden_dim=args.hidden,
            ffn_dim=args.ffn,
            pruned_visual=None if args.target is not None else args.pruned,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.target is not None:
        print(tokens_for_ratio(args.target, params))
    else:
        print(f"{tflops_ratio(params):.6f}")
    return EXIT_OK


def cmd_gen(args) -> int:
    inst = generate_clustered(args.seed, args.clusters, args.per_cluster, args.dim, args.intra, args.inter)
    write_token_file(args.output, inst.tokens, inst.query)
    write_planted_metadata(planted_sidecar_path(args.output), inst, args.seed)
    return EXIT_OK


def cmd_viz(args) -> int:
    rec = read_selection(args.selection)
    data = Path(args.input).read_bytes()
    tokens, _ = decode_token_file(data)
    n = tokens.shape[0]
    w, h = args.grid
    if w * h != n:
        raise ConfigError(f"--grid {w}x{h} does not match n={n} tokens")
    if rec.input_checksum != checksum_hex(data):
        print(f"warning: {args.selection} was produced from a different token file", file=sys.stderr)
    retained = [i for i in rec.indices if i not in set(rec.backfilled_indices)]
    gm = GridMap.from_selection(w, h, n, retained, rec.backfilled_indices)
    if args.pgm is None and args.svg is None:
        raise ConfigError("pass --pgm and/or --svg")
    if args.pgm:
        Path(args.pgm).write_bytes(gm.to_pgm(args.cell_px))
    if args.svg:
        Path(args.svg).write_text(gm.to_svg(args.cell_px), encoding="utf-8")
    return EXIT_OK


def cmd_ablate(args) -> int:
    tokens, weights, checksum = _load_input(args.input, args.saliency_file)
    sel = ablate_top_fraction(weights, args.fraction)
    rec = SelectionRecord(
        method="ablate",
        budget=sel.budget,
        tau=None,
        indices=list(sel.indices),
        backfilled=0,
        objective=objective_value(weights, sel),
        feasibility_violation_count=0,
        runtime_microseconds=0,
        input_checksum=checksum,
        extra={"fraction": args.fraction},
    )
    if args.output:
        write_selection(args.output, rec)
    else:
        sys.stdout.write(dumps_selection(rec))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="greedyprune", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp):
        sp.add_argument("--input", "-i", required=True, help="token file (TOKD)")
        sp.add_argument("--saliency-file", help="externally computed saliency, one value per token")

    def add_common(sp):
        sp.add_argument("--budget", "-M", type=int, required=True, help="number of tokens to keep")
        sp.add_argument("--tau", type=float, default=DEFAULT_TAU, help=TAU_HELP)
        sp.add_argument("--seed", type=int, default=0, help="seed for the random baseline")
        sp.add_argument("--grid", type=_grid, help="token grid as WxH (row-major)")
        sp.add_argument("--cap", type=int, default=24, help="largest n for the exact solver")
        sp.add_argument("--no-timing", action="store_true", help="record runtime as 0 for byte-stable output")
        sp.add_argument("--output", "-o", help="output path (default: stdout)")

    sp = sub.add_parser("prune", help="run one selector and write a selection record")
    add_input(sp)
    add_common(sp)
    sp.add_argument("--method", choices=METHODS, default="greedy")
    sp.add_argument("--no-backfill", action="store_true", help="do not top up when candidates run out")
    sp.add_argument("--seed-rule", choices=("lowest", "max_norm"), default="lowest", help="maxmin start token")
    sp.set_defaults(func=cmd_prune)

    sp = sub.add_parser("compare", help="compare selectors at a shared budget")
    add_input(sp)
    add_common(sp)
    sp.add_argument("--methods", type=lambda s: [m.strip() for m in s.split(",") if m.strip()],
                    default=["greedy", "topk", "maxmin", "random"], help="comma-separated method list")
    sp.add_argument("--planted", help="planted-instance sidecar (default: <input>.planted.json if present)")
    sp.add_argument("--format", choices=("text", "csv"), default="text")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("sweep-tau", help="greedy pruning across thresholds")
    add_input(sp)
    sp.add_argument("--budget", "-M", type=int, required=True)
    sp.add_argument("--taus", type=_floats, required=True, help="comma-separated thresholds")
    sp.add_argument("--no-backfill", action="store_true")
    sp.add_argument("--format", choices=("text", "csv"), default="text")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_sweep_tau)

    sp = sub.add_parser("flops", help="TFLOPS ratio, or the token count for a target ratio")
    sp.add_argument("--layers", "-T", type=int, default=32)
    sp.add_argument("--prune-layer", "-K", type=int, default=1)
    sp.add_argument("--text-len", "-N", type=int, default=64)
    sp.add_argument("--visual", type=int, default=576, help="visual tokens before pruning")
    sp.add_argument("--pruned", type=int, default=64, help="visual tokens after pruning")
    sp.add_argument("--hidden", "-d", type=int, default=4096)
    sp.add_argument("--ffn", "-m", type=int, default=11008)
    sp.add_argument("--target", type=float, help="print the largest token count within this ratio")
    sp.set_defaults(func=cmd_flops)

    sp = sub.add_parser("gen", help="write a planted synthetic instance")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--clusters", type=int, default=4)
    sp.add_argument("--per-cluster", type=int, default=8)
    sp.add_argument("--dim", type=int, default=64)
    sp.add_argument("--intra", type=float, default=0.95, help="minimum same-cluster cosine")
    sp.add_argument("--inter", type=float, default=0.30, help="maximum cross-cluster cosine")
    sp.add_argument("--output", "-o", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("viz", help="grid map of retained tokens (PGM and/or SVG)")
    sp.add_argument("--selection", "-s", required=True)
    sp.add_argument("--input", "-i", required=True, help="token file the selection came from")
    sp.add_argument("--grid", type=_grid, required=True)
    sp.add_argument("--pgm")
    sp.add_argument("--svg")
    sp.add_argument("--cell-px", type=int, default=8)
    sp.set_defaults(func=cmd_viz)

    sp = sub.add_parser("ablate", help="list the top fraction of tokens by saliency")
    add_input(sp)
    sp.add_argument("--fraction", type=float, default=0.2)
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_ablate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"greedyprune: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, OSError) as exc:
        print(f"greedyprune: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AlgorithmError, ValueError) as exc:
        print(f"greedyprune: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ALGO


if __name__ == "__main__":
    sys.exit(main())
