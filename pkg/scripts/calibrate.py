#!/usr/bin/env python3
"""Run the real experiment pipeline over roster variants and master seeds.

Reports, per variant: bal means, wilcoxon p (bal, one-sided), |hp| means,
player wins, and wall time, so the bundled default can be chosen on
robustness rather than on one lucky seed.
"""

import copy
import dataclasses
import json
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, "src")

from pdarena import harness  # noqa: E402
from pdarena.config import load_experiment  # noqa: E402

BASE_ROSTER = json.loads(Path("src/pdarena/data/roster.json").read_text())


def variant_roster(kick_damage, punch_damage, guard_frames, penalty, reach=None):
    roster = copy.deepcopy(BASE_ROSTER)
    for a in roster["actions"]:
        if "KICK" in a["id"]:
            a["damage"] = kick_damage
        elif "PUNCH" in a["id"]:
            a["damage"] = punch_damage
        elif a["kind"] == "GUARD":
            a["active_frames"] = guard_frames
        if reach is not None and a["damage"] > 0:
            a["reach"] = reach
    roster["rules"]["block_penalty_frames"] = penalty
    return roster


def evaluate(name, roster, seeds, rounds=20, iterations=1000, player_extra=None):
    with tempfile.TemporaryDirectory() as tmp:
        roster_path = Path(tmp) / "roster.json"
        roster_path.write_text(json.dumps(roster))
        base = load_experiment()
        for master_seed in seeds:
            cfg = dataclasses.replace(
                base,
                rounds=rounds,
                master_seed=master_seed,
                roster_path=str(roster_path),
                mcts={**base.mcts, "iterations": iterations},
                player={**base.player, **(player_extra or {})},
            )
            harness._MATCH_CACHE.clear()
            t0 = time.perf_counter()
            rep = harness.run_experiment(cfg, jobs=2)
            wall = time.perf_counter() - t0
            s = rep.summary
            wil = next(
                c for c in rep.comparisons
                if c["metric"] == "bal_end" and c["method"] == "WILCOXON_SIGNED_RANK"
            )
            print(
                f"{name} seed={master_seed}: bal {s['pda']['bal_end']['mean']:.3f} vs "
                f"{s['mcts']['bal_end']['mean']:.3f} (wilcoxon p={wil.get('p_value', 1):.4f}) "
                f"|hp| {s['pda']['abs_hp_diff']['mean']:.0f} vs {s['mcts']['abs_hp_diff']['mean']:.0f} "
                f"wins {s['pda']['wins']['PLAYER']} vs {s['mcts']['wins']['PLAYER']} "
                f"wall {wall:.0f}s",
                flush=True,
            )


if __name__ == "__main__":
    seeds = [int(x) for x in sys.argv[1].split(",")] if len(sys.argv) > 1 else [2019]
    rounds = int(sys.argv[2]) if len(sys.argv) > 2 else 30
    evaluate("default roster", BASE_ROSTER, seeds, rounds)
