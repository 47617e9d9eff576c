"""pdarena: a deterministic fighting-game sim with a dominance-adjusting AI.

The package splits into: `engine` (frame-stepped two-fighter core), `health`
(body-segment momentum and balancedness math), `mcts` (open-loop tree
search), `agents` (opponent policies), `players` (synthetic player models),
`stats` (paired tests), `harness` (seeded experiments and reports),
`service` (live-play HTTP sessions), and `cli`.
"""

from .engine import (
    ActionSpec,
    GameState,
    Height,
    HitEvent,
    Kind,
    Match,
    MatchRules,
    Phase,
    RoundOutcome,
    Side,
    Winner,
    hp_diff,
    is_round_over,
    legal_actions,
    new_match,
    step,
)
from .health import (
    MotionMomentumTable,
    SegmentMomenta,
    accumulate,
    balancedness,
    expected_momenta,
    fitness_table,
    gap_decrease,
    gaps,
    load_m2mm,
)
from .mcts import MctsConfig, hp_swing, search, ucb1
from .agents import DdaAgent, MctsAgent, PdaAgent, harmless_action
from .players import PlayerModel, act_player, biased_player, observe, uniform_player
from .stats import Alternative, Method, TestResult, paired_t_test, wilcoxon_signed_rank
from .harness import (
    ExperimentReport,
    RoundResult,
    run_experiment,
    run_round,
    write_report,
)
from .config import ExperimentConfig, load_experiment, load_roster

__version__ = "0.1.0"
