#!/usr/bin/env python3
"""Time the tree search and a full round on the bundled roster."""

import random
import sys
import time

sys.path.insert(0, "src")

from pdarena import Match, MctsAgent, MctsConfig, Side, load_roster, mcts  # noqa: E402
from pdarena.harness import run_round  # noqa: E402
from pdarena.players import biased_player  # noqa: E402


def main() -> None:
    iterations = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
    actions, rules = load_roster()
    match = Match(actions, rules)
    state = match.new_round(0)
    cfg = MctsConfig(iterations=iterations)

    t0 = time.perf_counter()
    n = 20
    for seed in range(n):
        mcts.search(state, Side.AI, cfg, random.Random(seed))
    per_search = (time.perf_counter() - t0) / n
    print(f"search: {per_search * 1000:.1f} ms at {iterations} iterations")

    model = biased_player(actions)
    t0 = time.perf_counter()
    result = run_round(model, MctsAgent(cfg), match, seed=1, pairing="mcts")
    wall = time.perf_counter() - t0
    print(
        f"round: {wall:.2f} s, {result.frames} frames, "
        f"winner {result.winner.value}, bal {result.bal_end:.3f}"
    )


if __name__ == "__main__":
    main()
