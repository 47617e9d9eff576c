"""Deterministic frame-stepped two-fighter core on a 1-D arena.

Rules of the game:

* Two characters start at configured spawn positions with 150 HP each.
* Time advances one frame per `step`.  A character picks a new action only
  while IDLE; once begun, an action runs STARTUP -> ACTIVE -> RECOVERY and
  cannot be interrupted.
* MOVE actions displace the character every ACTIVE frame by `move_speed`
  toward the opponent (negative speed moves away); positions are clamped to
  the arena and characters may pass each other.
* An ATTACK makes contact on the first ACTIVE frame where its reach covers
  the opponent; it strikes at most once per execution.  Contact is blocked
  (zero damage) when the defender's guard height equals the attack height,
  and the blocked attacker is stuck for `block_penalty_frames` extra frames,
  so a correct guard buys a punish window.  Simultaneous contacts resolve
  against pre-frame HP; HP is clamped at 0.
* A GUARD action raises guard_height to its configured height during its
  ACTIVE frames.
* A round ends when either HP reaches 0 or the frame limit is hit; at
  timeout the higher-HP side wins, equal HP is a draw, and two simultaneous
  lethal hits are a draw.

The engine is purely deterministic; all randomness lives in agents and
player models.  Internally states compile down to a flat list of ints (the
"core") so tree-search rollouts can advance cheaply; the dataclass API is a
thin shell over the same transition function.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .errors import ConfigError, IllegalActionError
from .health import MotionMomentumTable, load_m2mm

INITIAL_HP = 150


class Side(str, Enum):
    PLAYER = "PLAYER"
    AI = "AI"


class Kind(str, Enum):
    ATTACK = "ATTACK"
    MOVE = "MOVE"
    GUARD = "GUARD"
    IDLE = "IDLE"


class Height(str, Enum):
    NONE = "NONE"
    HIGH = "HIGH"
    LOW = "LOW"


class Phase(str, Enum):
    IDLE = "IDLE"
    STARTUP = "STARTUP"
    ACTIVE = "ACTIVE"
    RECOVERY = "RECOVERY"


class Winner(str, Enum):
    PLAYER = "PLAYER"
    AI = "AI"
    DRAW = "DRAW"


@dataclass(frozen=True)
class ActionSpec:
    id: str
    motion_id: str
    kind: Kind
    damage: int = 0
    reach: int = 0
    height: Height = Height.NONE
    startup_frames: int = 0
    active_frames: int = 1
    recovery_frames: int = 0
    move_speed: int = 0

    def __post_init__(self) -> None:
        if self.damage < 0:
            raise ConfigError(f"action {self.id}: damage must be >= 0")
        if self.damage > 0 and self.kind is not Kind.ATTACK:
            raise ConfigError(f"action {self.id}: only ATTACK actions may deal damage")
        if min(self.startup_frames, self.active_frames, self.recovery_frames) < 0:
            raise ConfigError(f"action {self.id}: frame counts must be >= 0")
        if self.startup_frames + self.active_frames + self.recovery_frames < 1:
            raise ConfigError(f"action {self.id}: total duration must be >= 1 frame")
        if self.reach < 0:
            raise ConfigError(f"action {self.id}: reach must be >= 0")
        if self.move_speed != 0 and self.kind is not Kind.MOVE:
            raise ConfigError(f"action {self.id}: only MOVE actions may set move_speed")


@dataclass(frozen=True)
class MatchRules:
    arena_width: int = 800
    round_frame_limit: int = 3600
    player_spawn_x: int = 200
    ai_spawn_x: int = 600
    block_penalty_frames: int = 12

    def __post_init__(self) -> None:
        if self.arena_width < 1 or self.round_frame_limit < 1:
            raise ConfigError("arena_width and round_frame_limit must be >= 1")
        if self.block_penalty_frames < 0:
            raise ConfigError("block_penalty_frames must be >= 0")
        for x in (self.player_spawn_x, self.ai_spawn_x):
            if not 0 <= x <= self.arena_width:
                raise ConfigError("spawn positions must lie inside the arena")


@dataclass(frozen=True)
class CharacterState:
    hp: int = INITIAL_HP
    x: int = 0
    current_action: Optional[str] = None
    phase: Phase = Phase.IDLE
    phase_frames_left: int = 0
    guard_height: Height = Height.NONE
    struck: bool = False


@dataclass(frozen=True)
class GameState:
    frame: int
    player: CharacterState
    ai: CharacterState
    round_frame_limit: int
    rng_seed: int
    match: "Match" = field(repr=False, compare=False)


@dataclass(frozen=True)
class HitEvent:
    attacker: Side
    action: str
    damage_dealt: int
    blocked: bool


@dataclass(frozen=True)
class RoundOutcome:
    winner: Winner
    hp_diff: int
    end_frame: int
    bal_end: Optional[float] = None


# Int codes used by the compiled core.
_PH_IDLE, _PH_STARTUP, _PH_ACTIVE, _PH_RECOVERY = 0, 1, 2, 3
_K_IDLE, _K_ATTACK, _K_MOVE, _K_GUARD = 0, 1, 2, 3
_H_NONE, _H_HIGH, _H_LOW = 0, 1, 2

_PHASES = (Phase.IDLE, Phase.STARTUP, Phase.ACTIVE, Phase.RECOVERY)
_PHASE_CODE = {p: c for c, p in enumerate(_PHASES)}
_KIND_CODE = {Kind.IDLE: _K_IDLE, Kind.ATTACK: _K_ATTACK, Kind.MOVE: _K_MOVE, Kind.GUARD: _K_GUARD}
_HEIGHTS = (Height.NONE, Height.HIGH, Height.LOW)
_HEIGHT_CODE = {h: c for c, h in enumerate(_HEIGHTS)}

# Core layout: [frame, php, px, pact, pphase, pleft, pstruck,
#                      ahp, ax, aact, aphase, aleft, astruck]
_F = 0
_P = 1  # player block offset
_A = 7  # ai block offset
_HP, _X, _ACT, _PHASE, _LEFT, _STRUCK = 0, 1, 2, 3, 4, 5


class CompiledRoster:
    """Roster flattened into parallel tuples indexed by action position."""

    __slots__ = (
        "ids", "index", "kind", "damage", "reach", "height",
        "startup", "active", "recovery", "speed", "motion", "effective",
        "n", "max_attack_reach",
    )

    def __init__(self, actions: list[ActionSpec]):
        if not actions:
            raise ConfigError("roster must contain at least one action")
        ids = [a.id for a in actions]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate action ids in roster")
        self.ids = tuple(ids)
        self.index = {a: i for i, a in enumerate(ids)}
        self.kind = tuple(_KIND_CODE[a.kind] for a in actions)
        self.damage = tuple(a.damage for a in actions)
        self.reach = tuple(a.reach for a in actions)
        self.height = tuple(_HEIGHT_CODE[a.height] for a in actions)
        self.startup = tuple(a.startup_frames for a in actions)
        self.active = tuple(a.active_frames for a in actions)
        self.recovery = tuple(a.recovery_frames for a in actions)
        self.speed = tuple(a.move_speed for a in actions)
        self.motion = tuple(a.motion_id for a in actions)
        self.effective = tuple(a.damage > 0 for a in actions)
        self.n = len(actions)
        self.max_attack_reach = max(
            (a.reach for a in actions if a.damage > 0), default=0
        )


class Match:
    """A roster + rules pairing from which rounds are spawned."""

    def __init__(
        self,
        actions: list[ActionSpec],
        rules: MatchRules | None = None,
        table: MotionMomentumTable | None = None,
    ):
        self.rules = rules if rules is not None else MatchRules()
        self.table = table if table is not None else load_m2mm()
        self.actions = list(actions)
        self.compiled = CompiledRoster(self.actions)
        for a in self.actions:
            if a.motion_id not in self.table:
                raise ConfigError(
                    f"action {a.id}: motion {a.motion_id!r} missing from momentum table"
                )
        self.effective_motions = [a.motion_id for a in self.actions if a.damage > 0]

    def motion_of(self, action_id: str) -> str:
        cr = self.compiled
        return cr.motion[cr.index[action_id]]

    def new_round(self, seed: int) -> GameState:
        r = self.rules
        return GameState(
            frame=0,
            player=CharacterState(hp=INITIAL_HP, x=r.player_spawn_x),
            ai=CharacterState(hp=INITIAL_HP, x=r.ai_spawn_x),
            round_frame_limit=r.round_frame_limit,
            rng_seed=seed,
            match=self,
        )


def new_match(
    actions: list[ActionSpec],
    rules: MatchRules | None = None,
    seed: int = 0,
    table: MotionMomentumTable | None = None,
) -> GameState:
    """Validate the roster against the momentum table and spawn a fresh round."""
    return Match(actions, rules, table).new_round(seed)


def legal_actions(state: GameState, side: Side) -> list[str]:
    """Full roster at an IDLE decision point; the in-progress action otherwise."""
    ch = state.player if side is Side.PLAYER else state.ai
    if ch.phase is Phase.IDLE:
        return list(state.match.compiled.ids)
    return [ch.current_action]  # type: ignore[list-item]


def hp_diff(state: GameState) -> int:
    return state.player.hp - state.ai.hp


def is_round_over(state: GameState) -> Optional[RoundOutcome]:
    p, a = state.player.hp, state.ai.hp
    if p > 0 and a > 0 and state.frame < state.round_frame_limit:
        return None
    if p == a:
        winner = Winner.DRAW
    elif p > a:
        winner = Winner.PLAYER
    else:
        winner = Winner.AI
    return RoundOutcome(winner=winner, hp_diff=p - a, end_frame=state.frame)


def to_core(state: GameState) -> list[int]:
    out = [state.frame]
    for ch in (state.player, state.ai):
        act = -1 if ch.current_action is None else state.match.compiled.index[ch.current_action]
        out += [ch.hp, ch.x, act, _PHASE_CODE[ch.phase], ch.phase_frames_left, int(ch.struck)]
    return out


def _char_from_core(core: list[int], base: int, cr: CompiledRoster) -> CharacterState:
    act = core[base + _ACT]
    phase = _PHASES[core[base + _PHASE]]
    guard = Height.NONE
    if act >= 0 and cr.kind[act] == _K_GUARD and phase is Phase.ACTIVE:
        guard = _HEIGHTS[cr.height[act]]
    return CharacterState(
        hp=core[base + _HP],
        x=core[base + _X],
        current_action=None if act < 0 else cr.ids[act],
        phase=phase,
        phase_frames_left=core[base + _LEFT],
        guard_height=guard,
        struck=bool(core[base + _STRUCK]),
    )


def from_core(core: list[int], state: GameState) -> GameState:
    cr = state.match.compiled
    return replace(
        state,
        frame=core[_F],
        player=_char_from_core(core, _P, cr),
        ai=_char_from_core(core, _A, cr),
    )


def _begin(core: list[int], base: int, act: int, cr: CompiledRoster) -> None:
    st = cr.startup[act]
    if st > 0:
        ph, left = _PH_STARTUP, st
    elif cr.active[act] > 0:
        ph, left = _PH_ACTIVE, cr.active[act]
    else:
        ph, left = _PH_RECOVERY, cr.recovery[act]
    core[base + _ACT] = act
    core[base + _PHASE] = ph
    core[base + _LEFT] = left
    core[base + _STRUCK] = 0


def _countdown(core: list[int], base: int, cr: CompiledRoster) -> None:
    ph = core[base + _PHASE]
    if ph == _PH_IDLE:
        return
    left = core[base + _LEFT] - 1
    act = core[base + _ACT]
    while left == 0:
        if ph == _PH_STARTUP:
            ph, left = _PH_ACTIVE, cr.active[act]
        elif ph == _PH_ACTIVE:
            ph, left = _PH_RECOVERY, cr.recovery[act]
        else:  # recovery finished
            core[base + _ACT] = -1
            core[base + _PHASE] = _PH_IDLE
            core[base + _LEFT] = 0
            core[base + _STRUCK] = 0
            return
    core[base + _PHASE] = ph
    core[base + _LEFT] = left


def advance_core(
    core: list[int],
    cr: CompiledRoster,
    arena_width: int,
    pa: int,
    aa: int,
    events: Optional[list[tuple[int, int, int, bool]]] = None,
    block_penalty: int = 0,
) -> None:
    """Advance the compiled core one frame in place.

    `pa`/`aa` are consumed only for a side that is IDLE this frame (legality
    is the caller's job).  When `events` is given, contacts are appended as
    (side_code, action_idx, damage_dealt, blocked) with side_code 0=player.
    """
    # 1. initiation
    if core[_P + _PHASE] == _PH_IDLE:
        _begin(core, _P, pa, cr)
    if core[_A + _PHASE] == _PH_IDLE:
        _begin(core, _A, aa, cr)

    p_act, a_act = core[_P + _ACT], core[_A + _ACT]
    p_active = core[_P + _PHASE] == _PH_ACTIVE
    a_active = core[_A + _PHASE] == _PH_ACTIVE
    px, ax = core[_P + _X], core[_A + _X]

    # 2. movement (from pre-frame positions, simultaneous)
    if p_active and cr.kind[p_act] == _K_MOVE:
        dirn = (ax > px) - (ax < px)
        nx = px + dirn * cr.speed[p_act]
        core[_P + _X] = 0 if nx < 0 else (arena_width if nx > arena_width else nx)
    if a_active and cr.kind[a_act] == _K_MOVE:
        dirn = (px > ax) - (px < ax)
        nx = ax + dirn * cr.speed[a_act]
        core[_A + _X] = 0 if nx < 0 else (arena_width if nx > arena_width else nx)

    # 3. contacts against post-movement distance, pre-frame HP, simultaneous
    dist = core[_A + _X] - core[_P + _X]
    if dist < 0:
        dist = -dist
    p_guard = cr.height[p_act] if (p_active and cr.kind[p_act] == _K_GUARD) else _H_NONE
    a_guard = cr.height[a_act] if (a_active and cr.kind[a_act] == _K_GUARD) else _H_NONE
    p_loss = a_loss = 0
    if (
        p_active
        and cr.kind[p_act] == _K_ATTACK
        and not core[_P + _STRUCK]
        and dist <= cr.reach[p_act]
    ):
        core[_P + _STRUCK] = 1
        h = cr.height[p_act]
        if h != _H_NONE and h == a_guard:
            core[_P + _LEFT] += block_penalty
            if events is not None:
                events.append((0, p_act, 0, True))
        else:
            a_loss = min(cr.damage[p_act], core[_A + _HP])
            if events is not None:
                events.append((0, p_act, a_loss, False))
    if (
        a_active
        and cr.kind[a_act] == _K_ATTACK
        and not core[_A + _STRUCK]
        and dist <= cr.reach[a_act]
    ):
        core[_A + _STRUCK] = 1
        h = cr.height[a_act]
        if h != _H_NONE and h == p_guard:
            core[_A + _LEFT] += block_penalty
            if events is not None:
                events.append((1, a_act, 0, True))
        else:
            p_loss = min(cr.damage[a_act], core[_P + _HP])
            if events is not None:
                events.append((1, a_act, p_loss, False))
    if a_loss:
        core[_A + _HP] -= a_loss
    if p_loss:
        core[_P + _HP] -= p_loss

    # 4. clock and phase countdown
    core[_F] += 1
    _countdown(core, _P, cr)
    _countdown(core, _A, cr)


def core_round_over(core: list[int], frame_limit: int) -> bool:
    return core[_P + _HP] == 0 or core[_A + _HP] == 0 or core[_F] >= frame_limit


def _resolve_action(
    state: GameState, side: Side, action: Optional[str]
) -> int:
    ch = state.player if side is Side.PLAYER else state.ai
    cr = state.match.compiled
    if ch.phase is Phase.IDLE:
        if action is None or action not in cr.index:
            raise IllegalActionError(f"{side.value}: {action!r} is not a legal action")
        return cr.index[action]
    if action is not None and action != ch.current_action:
        raise IllegalActionError(
            f"{side.value}: cannot switch to {action!r} while {ch.current_action!r} is in progress"
        )
    return cr.index[ch.current_action]  # type: ignore[index]


def step(
    state: GameState, player_action: Optional[str], ai_action: Optional[str]
) -> tuple[GameState, list[HitEvent]]:
    """Advance exactly one frame; raises IllegalActionError on contract breaches.

    Passing None for a side is shorthand for "continue the in-progress
    action" and is only legal while that side is mid-action.
    """
    if is_round_over(state) is not None:
        raise IllegalActionError("round is already over")
    pa = _resolve_action(state, Side.PLAYER, player_action)
    aa = _resolve_action(state, Side.AI, ai_action)
    core = to_core(state)
    raw_events: list[tuple[int, int, int, bool]] = []
    cr = state.match.compiled
    rules = state.match.rules
    advance_core(
        core, cr, rules.arena_width, pa, aa, raw_events, rules.block_penalty_frames
    )
    events = [
        HitEvent(
            attacker=Side.PLAYER if side_code == 0 else Side.AI,
            action=cr.ids[act],
            damage_dealt=dealt,
            blocked=blocked,
        )
        for side_code, act, dealt, blocked in raw_events
    ]
    return from_core(core, state), events


def state_digest(state: GameState) -> str:
    """Stable hash of the observable state, for trace-equality checks."""
    parts = [state.frame, state.round_frame_limit, state.rng_seed]
    for ch in (state.player, state.ai):
        parts += [
            ch.hp, ch.x, ch.current_action or "", ch.phase.value,
            ch.phase_frames_left, ch.guard_height.value, ch.struck,
        ]
    return hashlib.sha1(repr(parts).encode()).hexdigest()
