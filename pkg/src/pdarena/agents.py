"""Opponent policies: plain tree search, the dominance-adjusting agent, and
a difficulty-equalizing baseline.

The dominance-adjusting agent (kind "pda") watches the player's attack
motions.  Each detected effective motion is scored by how much it would
rebalance the player's body-segment use (fitness in [0, 1], computed against
the momenta accumulated *before* that motion lands in the books), and the
score is held as the current dominance rate until the next detection.  At
every decision the agent draws r uniform on [0, 1): strictly above the rate
it plays its strong searched action, otherwise it yields with a harmless
zero-damage action - rushing or walking at the player, staying hittable.

The gate and the harmless choice consume a dedicated RNG stream so that the
strong branch sees exactly the stream a plain search agent would; an agent
whose rate is pinned to 0 is move-for-move identical to the plain agent.

The "dda" baseline swaps the search reward for closeness of the post-rollout
HP difference to a target gap, steering toward parity instead of damage.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import mcts
from .engine import GameState, Match, Phase, Side
from .engine import _K_MOVE
from .errors import ConfigError
from .health import SegmentMomenta, fitness_table
from .mcts import MctsConfig

# Rush-only by default: its short commitment lets the agent re-decide before
# a freshly detected attack becomes active, so a yield window protects only
# the motion that earned it.
DEFAULT_HARMLESS_SET = ("RUSH",)
INITIAL_PDR = 0.5


@dataclass
class MctsAgent:
    """Strong baseline: plain search with the HP-swing reward."""

    cfg: MctsConfig = field(default_factory=MctsConfig)

    def act(self, state: GameState, rng: random.Random, game=None) -> str:
        return mcts.search(state, Side.AI, self.cfg, rng, game=game)


def harmless_action(
    state: GameState, harmless_set: list[str], match: Match, rng: random.Random
) -> str:
    """Pick a zero-damage action per the yield policy.

    Outside the player's longest attack reach: close in (seeded-random among
    the set's toward-player moves).  Within reach: seeded-uniform over the
    whole set, keeping the agent hittable.
    """
    if not harmless_set:
        raise ConfigError("harmless_set must not be empty")
    cr = match.compiled
    for a in harmless_set:
        if a not in cr.index:
            raise ConfigError(f"harmless action {a!r} not in roster")
        if cr.damage[cr.index[a]] > 0:
            raise ConfigError(f"harmless action {a!r} deals damage")
    dist = abs(state.player.x - state.ai.x)
    if dist > cr.max_attack_reach:
        toward = [
            a
            for a in harmless_set
            if cr.kind[cr.index[a]] == _K_MOVE and cr.speed[cr.index[a]] > 0
        ]
        if toward:
            return toward[rng.randrange(len(toward))]
    return harmless_set[rng.randrange(len(harmless_set))]


@dataclass
class PdaAgent:
    """Yields or fights according to the player's motion-health fitness."""

    match: Match
    cfg: MctsConfig = field(default_factory=MctsConfig)
    harmless_set: tuple[str, ...] = DEFAULT_HARMLESS_SET
    pdr: float = INITIAL_PDR
    last_motion: str | None = None
    gate_seed: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.pdr <= 1:
            raise ConfigError("pdr must lie in [0, 1]")
        # validate the harmless set eagerly so misconfiguration fails fast
        cr = self.match.compiled
        if not self.harmless_set:
            raise ConfigError("harmless_set must not be empty")
        for a in self.harmless_set:
            if a not in cr.index:
                raise ConfigError(f"harmless action {a!r} not in roster")
            if cr.damage[cr.index[a]] > 0:
                raise ConfigError(f"harmless action {a!r} deals damage")
        self.gate_rng = random.Random(self.gate_seed)

    def on_player_motion(self, motion: str, momenta: SegmentMomenta) -> None:
        """Re-score dominance from a detected effective motion.

        `momenta` are the player's accumulated momenta *excluding* the
        detected motion (detection happens before the motion is executed).
        Non-effective motions leave the rate untouched; unknown motions
        raise KeyError.
        """
        if motion not in self.match.table:
            raise KeyError(f"unknown motion {motion!r}")
        if motion not in self.match.effective_motions:
            return
        ft = fitness_table(momenta, self.match.effective_motions, self.match.table)
        self.pdr = ft.fitness[motion]
        self.last_motion = motion

    def act(self, state: GameState, rng: random.Random) -> str:
        r = self.gate_rng.random()
        if r > self.pdr:
            return self._strong(state, rng)
        return harmless_action(state, list(self.harmless_set), self.match, self.gate_rng)

    def _strong(self, state: GameState, rng: random.Random) -> str:
        return mcts.search(state, Side.AI, self.cfg, rng)


@dataclass
class DdaAgent:
    """Search baseline that steers the HP difference toward a target gap."""

    cfg: MctsConfig = field(default_factory=MctsConfig)
    target_hp_gap: int = 0

    def act(self, state: GameState, rng: random.Random, game=None) -> str:
        target = self.target_hp_gap

        def parity_reward(before_my: int, after_my: int, before_opp: int, after_opp: int) -> float:
            # searching side is the AI, so hp_diff = player - ai = opp - my
            return -abs((after_opp - after_my) - target)

        return mcts.search(state, Side.AI, self.cfg, rng, eval_fn=parity_reward, game=game)


def act_mcts(state: GameState, cfg: MctsConfig, rng: random.Random) -> str:
    if state.ai.phase is not Phase.IDLE:
        raise ValueError("AI is not at a decision point")
    return MctsAgent(cfg).act(state, rng)


def build_agent(spec: dict, match: Match, base_mcts: dict | None = None, gate_seed: int = 0):
    """Construct an agent from a config block like {"kind": "pda", ...}."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    merged = dict(base_mcts or {})
    merged.update(spec.pop("mcts", {}))
    try:
        cfg = MctsConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad mcts block: {exc}") from None
    try:
        if kind == "mcts":
            return MctsAgent(cfg=cfg, **spec)
        if kind == "pda":
            harmless = tuple(spec.pop("harmless_set", DEFAULT_HARMLESS_SET))
            return PdaAgent(
                match=match, cfg=cfg, harmless_set=harmless, gate_seed=gate_seed, **spec
            )
        if kind == "dda":
            return DdaAgent(cfg=cfg, **spec)
    except TypeError as exc:
        raise ConfigError(f"bad agent parameters for {kind!r}: {exc}") from None
    raise ConfigError(f"unknown agent kind {kind!r} (expected mcts, pda, or dda)")
