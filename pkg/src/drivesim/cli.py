"""Command-line entry points: analyze, run, batch, oracle."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import games
from .config import load_config
from .runner import run_batch, run_training, write_outputs


def _parse_seed_range(text: str) -> list[int]:
    """Accept '0..19' ranges or comma-separated seed lists."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok]


def _matrix_from_args(args) -> games.PayoffMatrix:
    return games.PayoffMatrix(
        reward=args.R, punishment=args.P, temptation=args.T, sucker=args.S
    )


def cmd_analyze(args) -> int:
    m = _matrix_from_args(args)
    cls = games.classify(m)
    print(f"matrix T={m.temptation} R={m.reward} P={m.punishment} S={m.sucker}")
    print(f"class: {cls.value}")
    print(f"dominant action: {games.dominant_action(m)}")
    print(f"pure nash: {sorted(games.pure_nash_2x2(m))}")
    shaped = games.shape_drive(m)
    print(
        f"drive-shaped: T={shaped.temptation} R={shaped.reward} "
        f"P={shaped.punishment} S={shaped.sucker} "
        f"dominant={games.dominant_action(shaped)} nash={sorted(games.pure_nash_2x2(shaped))}"
    )
    if cls is not games.GameClass.NOT_PD:
        x = games.mate_min_token(m)
        print(f"mate min token: {x}")
        shaped_mate = games.shape_mate(m, x)
        print(
            f"mate-shaped (x={x}): T={shaped_mate.temptation} R={shaped_mate.reward} "
            f"P={shaped_mate.punishment} S={shaped_mate.sucker}"
        )
    ia = games.shape_ia(m, args.alpha, args.beta)
    print(
        f"ia-shaped (a={args.alpha}, b={args.beta}): T={ia.temptation} R={ia.reward} "
        f"P={ia.punishment} S={ia.sucker}"
    )
    if args.graph:
        g = games.Graph.from_edge_list(Path(args.graph).read_text())
        print(f"graph: {g.n} nodes, {len(g.edges())} edges")
        for shaped_flag in (False, True):
            eq = games.enumerate_pure_nash(g, m, shaped=shaped_flag)
            label = "shaped" if shaped_flag else "raw"
            print(f"graphical pure nash ({label}): {sorted(''.join(p) for p in eq)}")
        print(f"domination number (total): {games.domination_number(g, 'total')}")
    return 0


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    out_dir = args.out or cfg.out_dir
    progress = None
    if args.verbose:
        def progress(epoch, metrics):
            if epoch % args.log_every == 0:
                line = " ".join(f"{k}={v:.4g}" for k, v in metrics.items())
                print(f"epoch {epoch}: {line}", file=sys.stderr)
    result = run_training(cfg, progress=progress)
    paths = write_outputs([result], out_dir, save_params=args.save_params)
    print(f"wrote {paths['metrics']}")
    return 0


def cmd_batch(args) -> int:
    cfg = load_config(args.config)
    seeds = _parse_seed_range(args.seeds)
    results = run_batch(cfg, seeds, jobs=args.jobs)
    out_dir = args.out or cfg.out_dir
    paths = write_outputs(results, out_dir)
    print(f"wrote {paths['metrics']} and {paths['summary']} ({len(results)} runs)")
    return 0


def cmd_oracle(args) -> int:
    m = _matrix_from_args(args)
    if args.graph:
        g = games.Graph.from_edge_list(Path(args.graph).read_text())
    else:
        g = games.Graph.complete(args.n)
    eq = games.enumerate_pure_nash(g, m, shaped=args.shaped)
    for profile in sorted(eq):
        print("".join(profile))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="drivesim",
        description="Peer-incentive learning testbed for social dilemmas with drifting rewards",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form dilemma analysis for a 2x2 matrix")
    for flag in ("T", "R", "P", "S"):
        p.add_argument(f"--{flag}", type=float, required=True)
    p.add_argument("--alpha", type=float, default=5.0)
    p.add_argument("--beta", type=float, default=0.05)
    p.add_argument("--graph", help="edge-list file (one 'u v' pair per line)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("run", help="single seeded training run")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--save-params", action="store_true", help="write final network checkpoints")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--log-every", type=int, default=50)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="independent runs over a seed list")
    p.add_argument("--config", required=True)
    p.add_argument("--seeds", required=True, help="e.g. 0..19 or 0,3,7")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("oracle", help="brute-force pure-Nash enumeration")
    for flag in ("T", "R", "P", "S"):
        p.add_argument(f"--{flag}", type=float, required=True)
    p.add_argument("--n", type=int, default=2, help="complete-graph size if no --graph")
    p.add_argument("--graph")
    p.add_argument("--shaped", action="store_true")
    p.set_defaults(func=cmd_oracle)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
