"""Synthetic player models: weighted action choice with hit reinforcement.

Stands in for human play at desk scale.  A model holds one positive-ish
weight per roster action and samples legal actions proportionally.  Landing
a hit multiplies the landed action's weight by (1 + reinforce_rate) - what
works gets repeated - and a blocked hit divides by a configurable fraction
of the same step - what the opponent visibly shuts down gets dropped.
Whiffs produce no contact event and change nothing.

The default model is side-biased: left-side attacks start with their weight
scaled by (1 - side_bias), so at side_bias=1 they are never chosen at all.
The bias leaves balancedness headroom for an adaptive opponent to work on.
Optional knobs: reach-gated attack selection, a relative weight floor, and
repeat-fatigue; all are off by default so that one RNG draw per decision
maps to the same choice for the same weight state, which keeps
paired-design rounds coupled across different opponents.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from . import engine
from .engine import ActionSpec, GameState, HitEvent, Kind, Side

# Initial mass for non-attack actions in the default biased model; attacks
# carry base mass 1.0 so in-reach play stays fight-shaped while approach
# dominates at range.
_NON_ATTACK_WEIGHTS = {
    "WALK_FWD": 0.6,
    "RUSH": 0.3,
    "WALK_BACK": 0.1,
    "STAND_GUARD": 0.15,
    "CROUCH_GUARD": 0.15,
    "IDLE": 0.1,
}
_LEFT_MOTIONS = ("LEFT_PUNCH", "LEFT_KICK")


@dataclass(frozen=True)
class PlayerModel:
    weights: dict[str, float]
    reinforce_rate: float = 0.2
    side_bias: float = 0.8
    # Fraction of the reinforcement step applied as decay when an attack is
    # blocked: 1.0 undoes a full landing step, 0 disables the decay.
    block_decay: float = 1.0
    # Optional: no weight may fall below this fraction of the current
    # maximum (a move that keeps failing is shelved, not forgotten).  Off by
    # default; it caps how far the mix can concentrate.
    weight_floor: float = 0.0
    # Repeating the same motion back-to-back gets progressively less likely
    # when below 1.0 (the motions stand in for full-body moves).  Disabled by
    # default.
    fatigue: float = 1.0
    last_action: str | None = None
    streak: int = 0
    # When False, selection ignores positions entirely; one RNG draw per
    # decision then maps to the same action for the same weights, which keeps
    # paired rounds tightly coupled across different opponents.
    reach_aware: bool = False

    def __post_init__(self) -> None:
        if not self.weights or all(w <= 0 for w in self.weights.values()):
            raise ValueError("player model needs at least one positive weight")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be >= 0")
        if self.reinforce_rate < 0:
            raise ValueError("reinforce_rate must be >= 0")
        if not 0 <= self.side_bias <= 1:
            raise ValueError("side_bias must lie in [0, 1]")
        if not 0 <= self.block_decay <= 1:
            raise ValueError("block_decay must lie in [0, 1]")
        if not 0 <= self.weight_floor < 1:
            raise ValueError("weight_floor must lie in [0, 1)")
        if not 0 < self.fatigue <= 1:
            raise ValueError("fatigue must lie in (0, 1]")


def biased_player(
    actions: list[ActionSpec],
    side_bias: float = 0.8,
    reinforce_rate: float = 0.2,
    weights: dict[str, float] | None = None,
    **model_kwargs,
) -> PlayerModel:
    """Build the default right-side-leaning model for a roster.

    Explicit `weights` entries override the computed defaults per action.
    """
    computed: dict[str, float] = {}
    for a in actions:
        if a.kind is Kind.ATTACK:
            w = 1.0
            if a.motion_id in _LEFT_MOTIONS:
                w *= 1.0 - side_bias
        else:
            w = _NON_ATTACK_WEIGHTS.get(a.id, 0.2)
        computed[a.id] = w
    if weights:
        computed.update(weights)
    return PlayerModel(
        computed, reinforce_rate=reinforce_rate, side_bias=side_bias, **model_kwargs
    )


def uniform_player(
    actions: list[ActionSpec], reinforce_rate: float = 0.2, **model_kwargs
) -> PlayerModel:
    return PlayerModel(
        {a.id: 1.0 for a in actions},
        reinforce_rate=reinforce_rate,
        side_bias=0.0,
        **model_kwargs,
    )


def act_player(model: PlayerModel, state: GameState, rng: random.Random, game=engine) -> str:
    """Sample a legal action proportionally to the model's weights.

    With `reach_aware`, attacks that cannot reach the opponent from the
    current positions get zero mass for this decision.
    """
    legal = game.legal_actions(state, Side.PLAYER)
    weights = [model.weights.get(a, 0.0) for a in legal]
    if model.streak > 0 and model.last_action is not None:
        tired = model.fatigue**model.streak
        weights = [
            w * tired if a == model.last_action else w for a, w in zip(legal, weights)
        ]
    if model.reach_aware and hasattr(state, "match"):
        cr = state.match.compiled
        dist = abs(state.player.x - state.ai.x)
        gated = list(weights)
        for pos, a in enumerate(legal):
            i = cr.index.get(a)
            if i is not None and cr.damage[i] > 0 and dist > cr.reach[i]:
                gated[pos] = 0.0
        if sum(gated) > 0:
            weights = gated
    total = sum(weights)
    if total <= 0:
        return legal[0]
    r = rng.random() * total
    acc = 0.0
    for action, w in zip(legal, weights):
        acc += w
        if r < acc:
            return action
    return legal[-1]


def note_choice(model: PlayerModel, action: str) -> PlayerModel:
    """Record a performed action so repeat-fatigue can apply next decision."""
    if action == model.last_action:
        return replace(model, streak=model.streak + 1)
    return replace(model, last_action=action, streak=1)


def observe(model: PlayerModel, event: HitEvent) -> PlayerModel:
    """Update weights from one of the player's own contact events.

    A landed hit multiplies the action's weight by (1 + reinforce_rate); a
    blocked hit divides by the same factor (an action the opponent visibly
    shuts down stops being effective, so it stops being repeated).  Whiffs
    produce no event and change nothing.

    Selection only depends on weight ratios, so when a weight outgrows a
    large bound all weights are rescaled (with a tiny positive floor) to keep
    them finite over arbitrarily long event histories.
    """
    if event.attacker is not Side.PLAYER:
        raise ValueError("observe only consumes the player's own hit events")
    if event.action not in model.weights:
        return model
    weights = dict(model.weights)
    if event.damage_dealt > 0:
        weights[event.action] *= 1.0 + model.reinforce_rate
    elif event.blocked:
        weights[event.action] *= 1.0 - model.block_decay * model.reinforce_rate
    else:
        return model
    if weights[event.action] > 1e12:
        scale = 1.0 / weights[event.action]
        weights = {
            a: (max(w * scale, 1e-300) if w > 0 else 0.0) for a, w in weights.items()
        }
    if model.weight_floor > 0:
        floor = model.weight_floor * max(weights.values())
        weights = {a: (max(w, floor) if w > 0 else 0.0) for a, w in weights.items()}
    return replace(model, weights=weights)
