import dataclasses
import math
import random

import pytest

from pdarena import mcts
from pdarena.agents import (
    DEFAULT_HARMLESS_SET,
    DdaAgent,
    MctsAgent,
    PdaAgent,
    build_agent,
    harmless_action,
)
from pdarena.engine import Phase, Side
from pdarena.errors import ConfigError
from pdarena.health import SegmentMomenta, accumulate
from pdarena.mcts import MctsConfig

from test_mcts import OneShotGame, StubState


class StubRng:
    def __init__(self, values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)

    def randrange(self, n):
        return int(self.values.pop(0)) % n


def small_cfg(**kw):
    base = dict(iterations=60)
    base.update(kw)
    return MctsConfig(**base)


RIGHT_PUNCH_MOMENTA = SegmentMomenta(5.83, 0.49, 0.51, 0.38)


# ---------------------------------------------------------------- detection


def test_on_player_motion_scores_healthy_motion(default_match):
    agent = PdaAgent(default_match, cfg=small_cfg())
    assert agent.pdr == 0.5  # neutral before any detection
    agent.on_player_motion("LEFT_PUNCH", RIGHT_PUNCH_MOMENTA)
    assert agent.pdr == pytest.approx(1.0)
    assert agent.last_motion == "LEFT_PUNCH"


def test_on_player_motion_scores_unbalancing_motion(default_match):
    agent = PdaAgent(default_match, cfg=small_cfg())
    agent.on_player_motion("RIGHT_KICK", RIGHT_PUNCH_MOMENTA)
    assert agent.pdr == pytest.approx(0.0)


def test_two_motion_roster_matches_fitness_example(default_match, m2mm):
    # restrict the effective set to {LEFT_PUNCH, LEFT_KICK}: fitness 1 / 0
    from pdarena.engine import Match

    subset = [
        a for a in default_match.actions
        if a.id in ("LEFT_PUNCH", "LEFT_KICK", "WALK_FWD", "RUSH", "IDLE")
    ]
    match = Match(subset, default_match.rules, m2mm)
    agent = PdaAgent(match, cfg=small_cfg())
    agent.on_player_motion("LEFT_PUNCH", RIGHT_PUNCH_MOMENTA)
    assert agent.pdr == pytest.approx(1.0)
    agent.on_player_motion("LEFT_KICK", RIGHT_PUNCH_MOMENTA)
    assert agent.pdr == pytest.approx(0.0)


def test_non_effective_motion_leaves_rate(default_match):
    agent = PdaAgent(default_match, cfg=small_cfg())
    agent.on_player_motion("LEFT_PUNCH", RIGHT_PUNCH_MOMENTA)
    before = agent.pdr
    agent.on_player_motion("WALK_FWD", RIGHT_PUNCH_MOMENTA)
    assert agent.pdr == before


def test_unknown_motion_raises(default_match):
    agent = PdaAgent(default_match, cfg=small_cfg())
    with pytest.raises(KeyError):
        agent.on_player_motion("HEADBUTT", RIGHT_PUNCH_MOMENTA)


def test_rate_persists_until_next_detection(default_match):
    agent = PdaAgent(default_match, cfg=small_cfg())
    momenta = RIGHT_PUNCH_MOMENTA
    agent.on_player_motion("LEFT_PUNCH", momenta)
    held = agent.pdr
    momenta = accumulate(momenta, "WALK_FWD", default_match.table)
    agent.on_player_motion("WALK_FWD", momenta)
    agent.on_player_motion("IDLE", momenta)
    assert agent.pdr == held


# ---------------------------------------------------------------- gate


def test_gate_rule_boundaries(default_match):
    state = default_match.new_round(0)
    agent = PdaAgent(default_match, cfg=small_cfg())
    agent._strong = lambda st, rng: "STRONG"

    agent.pdr = 0.0
    agent.gate_rng = StubRng([0.5])
    assert agent.act(state, random.Random(0)) == "STRONG"

    agent.pdr = 1.0
    agent.gate_rng = StubRng([0.97, 0.0])
    assert agent.act(state, random.Random(0)) in DEFAULT_HARMLESS_SET

    # r = pdr exactly yields; strong requires r strictly above
    agent.pdr = 0.7
    agent.gate_rng = StubRng([0.69, 0.0])
    assert agent.act(state, random.Random(0)) in DEFAULT_HARMLESS_SET
    agent.gate_rng = StubRng([0.7, 0.0])
    assert agent.act(state, random.Random(0)) in DEFAULT_HARMLESS_SET
    agent.gate_rng = StubRng([0.71])
    assert agent.act(state, random.Random(0)) == "STRONG"


def test_gate_frequency_smoke(default_match):
    state = default_match.new_round(0)
    agent = PdaAgent(default_match, cfg=small_cfg(), gate_seed=11)
    agent._strong = lambda st, rng: "STRONG"
    agent.pdr = 0.3
    n = 2000
    yields = sum(agent.act(state, random.Random(0)) != "STRONG" for _ in range(n))
    sigma = math.sqrt(0.3 * 0.7 / n)
    assert abs(yields / n - 0.3) < 4 * sigma


def test_pda_with_zero_rate_matches_plain_search(default_match):
    state = default_match.new_round(0)
    cfg = small_cfg(iterations=150)
    for seed in (0, 5, 9):
        plain = MctsAgent(cfg).act(state, random.Random(seed))
        agent = PdaAgent(default_match, cfg=cfg, pdr=0.0, gate_seed=seed)
        assert agent.act(state, random.Random(seed)) == plain


# ---------------------------------------------------------------- harmless


def test_harmless_closes_distance_when_far(default_match):
    state = default_match.new_round(0)  # spawn distance 400 > any reach
    action = harmless_action(state, ["WALK_FWD", "RUSH"], default_match, random.Random(0))
    assert action in ("WALK_FWD", "RUSH")


def test_harmless_uniform_within_reach(default_match):
    state = default_match.new_round(0)
    state = dataclasses.replace(
        state, ai=dataclasses.replace(state.ai, x=state.player.x + 50)
    )
    rng = StubRng([2])  # uniform index 2 over the 3-element set
    action = harmless_action(state, ["WALK_FWD", "RUSH", "STAND_GUARD"],
                             default_match, rng)
    assert action == "STAND_GUARD"


def test_harmless_rejects_damaging_actions(default_match):
    state = default_match.new_round(0)
    with pytest.raises(ConfigError):
        harmless_action(state, ["RIGHT_PUNCH"], default_match, random.Random(0))
    with pytest.raises(ConfigError):
        harmless_action(state, [], default_match, random.Random(0))
    with pytest.raises(ConfigError):
        PdaAgent(default_match, cfg=small_cfg(), harmless_set=("RIGHT_KICK",))


def test_harmless_never_damages(default_match):
    # a pda agent pinned to always yield never produces a damaging event
    from pdarena import engine
    from pdarena.players import biased_player, act_player

    class AlwaysYield(PdaAgent):
        def on_player_motion(self, motion, momenta):
            self.pdr = 1.0

    agent = AlwaysYield(default_match, cfg=small_cfg(), pdr=1.0)
    state = default_match.new_round(3)
    model = biased_player(default_match.actions)
    rng_p, rng_a = random.Random(3), random.Random(4)
    for _ in range(600):
        if engine.is_round_over(state) is not None:
            break
        pa = act_player(model, state, rng_p) if state.player.phase is Phase.IDLE else None
        aa = agent.act(state, rng_a) if state.ai.phase is Phase.IDLE else None
        state, events = engine.step(state, pa, aa)
        for ev in events:
            if ev.attacker is Side.AI:
                assert ev.damage_dealt == 0
    assert state.player.hp == 150


# ---------------------------------------------------------------- mcts / dda agents


def test_mcts_agent_picks_dominant_stub_action():
    game = OneShotGame({"A": 12, "B": -12})
    action = mcts.search(StubState(), Side.AI, small_cfg(iterations=200),
                         random.Random(0), game=game)
    assert action == "A"


def test_mcts_agent_deterministic(default_match):
    state = default_match.new_round(1)
    agent = MctsAgent(small_cfg(iterations=100))
    assert agent.act(state, random.Random(5)) == agent.act(state, random.Random(5))


def test_dda_agent_prefers_parity():
    # player at 150, agent at 100: dealing exactly 50 equalizes
    game = OneShotGame({"D10": 10, "D50": 50, "D80": 80})
    agent = DdaAgent(cfg=small_cfg(iterations=400))
    state = StubState()
    state = dataclasses.replace(state, ai=dataclasses.replace(state.ai, hp=100))
    assert agent.act(state, random.Random(0), game=game) == "D50"


def test_dda_agent_ties_break_low_index():
    # every action preserves parity: lowest-index action wins the tie
    game = OneShotGame({"Z0": 0, "Z1": 0, "Z2": 0})
    agent = DdaAgent(cfg=small_cfg(iterations=150))
    assert agent.act(StubState(), random.Random(1), game=game) == "Z0"


def test_dda_agent_on_engine_state(default_match):
    state = default_match.new_round(0)
    agent = DdaAgent(cfg=small_cfg())
    a = agent.act(state, random.Random(2))
    b = agent.act(state, random.Random(2))
    assert a == b
    assert a in [x.id for x in default_match.actions]


# ---------------------------------------------------------------- factory


def test_build_agent_kinds(default_match):
    assert isinstance(build_agent({"kind": "mcts"}, default_match), MctsAgent)
    assert isinstance(build_agent({"kind": "pda"}, default_match), PdaAgent)
    assert isinstance(build_agent({"kind": "dda"}, default_match), DdaAgent)


def test_build_agent_applies_parameters(default_match):
    agent = build_agent(
        {"kind": "pda", "pdr": 0.25, "harmless_set": ["WALK_FWD"],
         "mcts": {"iterations": 5}},
        default_match,
        base_mcts={"iterations": 99, "c": 0.5},
    )
    assert agent.pdr == 0.25
    assert agent.harmless_set == ("WALK_FWD",)
    assert agent.cfg.iterations == 5 and agent.cfg.c == 0.5


def test_build_agent_unknown_kind(default_match):
    with pytest.raises(ConfigError):
        build_agent({"kind": "oracle"}, default_match)
    with pytest.raises(ConfigError):
        build_agent({"kind": "pda", "bogus": 1}, default_match)
