"""Command-line entry point.

Subcommands::

    pdarena experiment --config exp.json --out results/ [--seed N] [--jobs N]
    pdarena simulate --agent pda --player biased --seed 7 [--iterations N]
    pdarena serve [--port N] [--host H] [--seed N]
    pdarena report --rounds results/rounds.csv [--out DIR]

Exit codes: 0 success, 1 runtime failure, 2 usage/configuration errors.
The PDARENA_CONFIG environment variable supplies the default experiment
config path.  Every random draw in every subcommand descends from the single
master seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import harness, service
from .agents import build_agent
from .config import (
    DEFAULT_EXPERIMENT_PATH,
    load_experiment,
    load_roster,
)
from .engine import Match
from .errors import ConfigError
from .harness import (
    ExperimentReport,
    apply_comparisons,
    read_rounds_csv,
    run_experiment,
    run_round,
    summarize,
    write_report,
)
from .health import load_m2mm
from .mcts import MctsConfig


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdarena")
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="run a seeded round batch and write reports")
    exp.add_argument("--config", default=os.environ.get("PDARENA_CONFIG"),
                     help="experiment JSON (default: bundled, or $PDARENA_CONFIG)")
    exp.add_argument("--out", required=True, help="output directory")
    exp.add_argument("--seed", type=int, default=None, help="master seed override")
    exp.add_argument("--jobs", type=int, default=None, help="parallel round workers")

    sim = sub.add_parser("simulate", help="run one round and print the result")
    sim.add_argument("--agent", default="mcts", choices=("mcts", "pda", "dda"))
    sim.add_argument("--player", default="biased", choices=("biased", "uniform"))
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--iterations", type=int, default=1000, help="search budget")
    sim.add_argument("--roster", default=None, help="roster JSON path")

    srv = sub.add_parser("serve", help="start the live-play HTTP service")
    srv.add_argument("--port", type=int, default=8640)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--seed", type=int, default=0)

    rep = sub.add_parser("report", help="recompute summary.json from rounds.csv")
    rep.add_argument("--rounds", required=True, help="path to rounds.csv")
    rep.add_argument("--out", default=None, help="output directory (default: alongside)")
    rep.add_argument("--config", default=None,
                     help="experiment JSON providing the comparison specs")
    return parser


def _cmd_experiment(args) -> int:
    if args.seed is not None and args.seed < 0:
        print("error: --seed must be >= 0", file=sys.stderr)
        return 2
    cfg = load_experiment(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    report = run_experiment(cfg, jobs=args.jobs)
    csv_path, json_path = write_report(report, args.out)
    print(f"wrote {csv_path} and {json_path}")
    for pairing, block in report.summary.items():
        bal = block["bal_end"]
        hpd = block["hp_diff"]
        print(
            f"{pairing}: bal {bal['mean']:.3f} +/- {bal['sd']:.3f}  "
            f"hp_diff {hpd['mean']:+.1f} +/- {hpd['sd']:.1f}  wins {block['wins']}"
        )
    for comp in report.comparisons:
        label = f"{comp['a']} vs {comp['b']} {comp['metric']} [{comp['method']}]"
        if "error" in comp:
            print(f"{label}: {comp['error']}")
        else:
            print(f"{label}: statistic {comp['statistic']:.3f} p {comp['p_value']:.4f}")
    return 0


def _cmd_simulate(args) -> int:
    actions, rules = load_roster(args.roster)
    match = Match(actions, rules, load_m2mm())
    mcts_block = {"iterations": args.iterations}
    agent = build_agent(
        {"kind": args.agent, "mcts": mcts_block},
        match,
        gate_seed=harness.derive_seed(args.seed, "gate"),
    )
    model = harness.build_player_model({"kind": args.player}, match)
    result = run_round(model, agent, match, args.seed, pairing=args.agent)
    print(
        f"pairing={result.pairing} round={result.round_index} seed={result.seed} "
        f"bal_end={result.bal_end:.4f} hp_diff={result.hp_diff} "
        f"winner={result.winner.value} frames={result.frames}"
    )
    return 0


def _cmd_serve(args) -> int:
    service.serve(host=args.host, port=args.port, master_seed=args.seed)
    return 0


def _cmd_report(args) -> int:
    rounds_path = Path(args.rounds)
    rounds = read_rounds_csv(rounds_path)
    if args.config:
        comparisons = load_experiment(args.config).comparisons
    else:
        comparisons = _comparisons_from_existing(rounds_path)
    by_round = sorted({r.round_index for r in rounds})
    seeds = {r.round_index: r.seed for r in rounds}
    report = ExperimentReport(
        rounds=rounds,
        summary=summarize(rounds),
        comparisons=apply_comparisons(rounds, comparisons),
        rounds_per_pairing=len(by_round),
        master_seed=_master_seed_from_existing(rounds_path, seeds),
    )
    out_dir = Path(args.out) if args.out else rounds_path.parent
    csv_path, json_path = write_report(report, out_dir)
    print(f"wrote {csv_path} and {json_path}")
    return 0


def _comparisons_from_existing(rounds_path: Path):
    """Reuse the comparison specs recorded in an adjacent summary.json."""
    from .config import ComparisonSpec

    summary_path = rounds_path.parent / "summary.json"
    if not summary_path.exists():
        return ()
    try:
        existing = json.loads(summary_path.read_text())
    except json.JSONDecodeError:
        return ()
    seen = []
    for comp in existing.get("comparisons", []):
        key = (comp.get("a"), comp.get("b"), comp.get("metric"), comp.get("alternative"))
        if None in key:
            continue
        methods = tuple(
            c["method"] for c in existing["comparisons"]
            if (c.get("a"), c.get("b"), c.get("metric"), c.get("alternative")) == key
            and "method" in c
        )
        spec = ComparisonSpec(key[0], key[1], key[2], key[3], methods)
        if spec not in seen:
            seen.append(spec)
    return tuple(seen)


def _master_seed_from_existing(rounds_path: Path, seeds: dict) -> int:
    summary_path = rounds_path.parent / "summary.json"
    if summary_path.exists():
        try:
            return int(json.loads(summary_path.read_text()).get("master_seed", 0))
        except (json.JSONDecodeError, TypeError, ValueError):
            pass
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "experiment": _cmd_experiment,
        "simulate": _cmd_simulate,
        "serve": _cmd_serve,
        "report": _cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
