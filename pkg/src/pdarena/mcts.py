"""Open-loop Monte-Carlo tree search over fighter states.

The tree stores action sequences for the searching side only (open loop: no
game states are kept in nodes).  Each iteration runs the four classic steps:

* selection   - descend by max UCB1 while children exist,
* expansion   - a leaf shallower than `d_max` whose visit count exceeds
                `n_max` creates all children at once (the root is expanded
                up front so any budget yields a root child),
* simulation  - play the path's actions at the searcher's decision points,
                then uniformly random legal actions; the opponent plays
                uniformly random legal actions throughout; the rollout runs
                `t_sim` frames or until the round ends,
* backprop    - reward = own HP change minus the opponent's HP change over
                the rollout, credited to every traversed node.

The final move is the root child with the most visits; ties break on higher
mean reward, then lowest roster index.

Search accepts any game exposing `legal_actions`, `step`, `is_round_over`
and states shaped like the engine's (tests use tiny stub games); rollouts on
real engine states are routed through the engine's compiled core, which this
module keeps behaviorally identical to the generic path (same rule set, same
RNG draw sequence - see `force_generic` and the equivalence tests).
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Callable, Optional

from . import engine
from .engine import GameState, Phase, Side, to_core
from .engine import _A, _F, _P
from .engine import _K_ATTACK, _K_MOVE, _PH_ACTIVE, _PH_IDLE
from .engine import _HP as _CHP

EvalFn = Callable[[int, int, int, int], float]


@dataclass(frozen=True)
class MctsConfig:
    """Search parameters; defaults follow the reference configuration."""

    c: float = 0.42
    n_max: int = 7
    d_max: int = 3
    t_sim: int = 60
    iterations: int = 1000
    time_ms: Optional[float] = None  # wall-clock budget overrides iterations
    check_invariants: bool = False

    def __post_init__(self) -> None:
        if self.c < 0:
            raise ValueError("c must be >= 0")
        if self.n_max < 1 or self.d_max < 1 or self.t_sim < 1:
            raise ValueError("n_max, d_max and t_sim must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.time_ms is not None and self.time_ms <= 0:
            raise ValueError("time_ms must be > 0")


class MctsNode:
    __slots__ = ("action", "depth", "visits", "total_reward", "children", "expanded_at")

    def __init__(self, action: Optional[str], depth: int):
        self.action = action
        self.depth = depth
        self.visits = 0
        self.total_reward = 0.0
        self.children: list[MctsNode] = []
        self.expanded_at = 0

    @property
    def mean_reward(self) -> float:
        return self.total_reward / self.visits if self.visits else 0.0


def ucb1(mean_reward: float, visits: int, parent_visits: int, c: float) -> float:
    """UCB1 score; unvisited nodes score +inf so they are tried first."""
    if visits == 0:
        return math.inf
    return mean_reward + c * math.sqrt(2.0 * math.log(parent_visits) / visits)


def hp_swing(before_my: int, after_my: int, before_opp: int, after_opp: int) -> float:
    """Default reward: own HP change minus the opponent's HP change."""
    return (after_my - before_my) - (after_opp - before_opp)


def _select(node: MctsNode, c: float) -> MctsNode:
    # same scoring as ucb1(); unrolled with the parent log hoisted, and the
    # first unvisited child short-circuits since it scores +inf
    n = node.visits
    log_term = 2.0 * math.log(n) if n > 0 else 0.0
    sqrt = math.sqrt
    best = None
    best_score = -math.inf
    for child in node.children:
        v = child.visits
        if v == 0:
            return child
        score = child.total_reward / v + c * sqrt(log_term / v)
        if score > best_score:
            best, best_score = child, score
    return best  # type: ignore[return-value]


def _generic_rollout(state, side, path_actions, cfg, rng, game, eval_fn) -> float:
    start_frame = state.frame
    qi = 0
    s = state
    while s.frame - start_frame < cfg.t_sim and game.is_round_over(s) is None:
        pa = aa = None
        if s.player.phase is Phase.IDLE:
            if side is Side.PLAYER and qi < len(path_actions):
                pa = path_actions[qi]
                qi += 1
            else:
                legal = game.legal_actions(s, Side.PLAYER)
                pa = legal[rng.randrange(len(legal))]
        if s.ai.phase is Phase.IDLE:
            if side is Side.AI and qi < len(path_actions):
                aa = path_actions[qi]
                qi += 1
            else:
                legal = game.legal_actions(s, Side.AI)
                aa = legal[rng.randrange(len(legal))]
        s, _ = game.step(s, pa, aa)
    if side is Side.AI:
        return eval_fn(state.ai.hp, s.ai.hp, state.player.hp, s.player.hp)
    return eval_fn(state.player.hp, s.player.hp, state.ai.hp, s.ai.hp)


def _fast_rollout(root_core, match, side_is_ai, path_idx, cfg, rng, eval_fn) -> float:
    """Rollout on compiled-core locals; one inlined copy of the frame rules.

    Behavior matches the engine's `advance_core` exactly (the equivalence
    tests against `force_generic=True` pin this) with two rollout-only
    additions: the path queue feeds the searcher's decisions, and stretches
    where neither side can move, decide, or make contact are skipped in one
    jump.
    """
    rules = match.rules
    width = rules.arena_width
    limit = rules.round_frame_limit
    penalty = rules.block_penalty_frames
    cr = match.compiled
    kind = cr.kind
    dmg = cr.damage
    reach = cr.reach
    height = cr.height
    startup = cr.startup
    active = cr.active
    recovery = cr.recovery
    speed = cr.speed
    n = cr.n
    randrange = rng.randrange
    idle, start_ph, active_ph, rec_ph = _PH_IDLE, 1, _PH_ACTIVE, 3
    k_attack, k_move, k_guard = _K_ATTACK, _K_MOVE, 3

    frame = root_core[_F]
    php, px, pact, pph, pleft, pstruck = root_core[1:7]
    ahp, ax, aact, aph, aleft, astruck = root_core[7:13]
    horizon = frame + cfg.t_sim
    qi = 0
    n_path = len(path_idx)

    while frame < horizon and php > 0 and ahp > 0 and frame < limit:
        # decisions and initiation
        if pph == idle:
            if not side_is_ai and qi < n_path:
                pact = path_idx[qi]
                qi += 1
            else:
                pact = randrange(n)
            pstruck = 0
            st = startup[pact]
            if st > 0:
                pph, pleft = start_ph, st
            elif active[pact] > 0:
                pph, pleft = active_ph, active[pact]
            else:
                pph, pleft = rec_ph, recovery[pact]
        if aph == idle:
            if side_is_ai and qi < n_path:
                aact = path_idx[qi]
                qi += 1
            else:
                aact = randrange(n)
            astruck = 0
            st = startup[aact]
            if st > 0:
                aph, aleft = start_ph, st
            elif active[aact] > 0:
                aph, aleft = active_ph, active[aact]
            else:
                aph, aleft = rec_ph, recovery[aact]

        pk = kind[pact]
        ak = kind[aact]
        p_active = pph == active_ph
        a_active = aph == active_ph

        # simultaneous movement from pre-frame positions
        if p_active and pk == k_move:
            dirn = (ax > px) - (ax < px)
            nx = px + dirn * speed[pact]
            px = 0 if nx < 0 else (width if nx > width else nx)
        if a_active and ak == k_move:
            dirn = (px > ax) - (px < ax)
            nx = ax + dirn * speed[aact]
            ax = 0 if nx < 0 else (width if nx > width else nx)

        dist = ax - px
        if dist < 0:
            dist = -dist
        ploss = aloss = 0
        if p_active and pk == k_attack and not pstruck and dist <= reach[pact]:
            pstruck = 1
            h = height[pact]
            if h != 0 and a_active and ak == k_guard and height[aact] == h:
                pleft += penalty
            else:
                aloss = dmg[pact]
        if a_active and ak == k_attack and not astruck and dist <= reach[aact]:
            astruck = 1
            h = height[aact]
            if h != 0 and p_active and pk == k_guard and height[pact] == h:
                aleft += penalty
            else:
                ploss = dmg[aact]
        if aloss:
            ahp = ahp - aloss if ahp > aloss else 0
        if ploss:
            php = php - ploss if php > ploss else 0

        frame += 1
        if pph:
            pleft -= 1
            while pleft == 0:
                if pph == start_ph:
                    pph, pleft = active_ph, active[pact]
                elif pph == active_ph:
                    pph, pleft = rec_ph, recovery[pact]
                else:
                    pph, pact, pleft, pstruck = idle, -1, 0, 0
                    break
        if aph:
            aleft -= 1
            while aleft == 0:
                if aph == start_ph:
                    aph, aleft = active_ph, active[aact]
                elif aph == active_ph:
                    aph, aleft = rec_ph, recovery[aact]
                else:
                    aph, aact, aleft, astruck = idle, -1, 0, 0
                    break

        # fast-forward while neither side can move, decide, or connect
        if pph and aph:
            if (kind[pact] != k_move or pph != active_ph) and (
                kind[aact] != k_move or aph != active_ph
            ):
                dist = ax - px
                if dist < 0:
                    dist = -dist
                if not (
                    pph == active_ph
                    and kind[pact] == k_attack
                    and not pstruck
                    and dist <= reach[pact]
                ) and not (
                    aph == active_ph
                    and kind[aact] == k_attack
                    and not astruck
                    and dist <= reach[aact]
                ):
                    skip = pleft if pleft < aleft else aleft
                    rem = horizon - frame
                    if rem < skip:
                        skip = rem
                    skip -= 1
                    if skip > 0:
                        frame += skip
                        pleft -= skip
                        aleft -= skip

    if side_is_ai:
        return eval_fn(root_core[_A + _CHP], ahp, root_core[_P + _CHP], php)
    return eval_fn(root_core[_P + _CHP], php, root_core[_A + _CHP], ahp)


def _check_conservation(root: MctsNode, iterations: int) -> None:
    assert root.visits == iterations, "root visits must equal completed iterations"
    stack = [root]
    while stack:
        node = stack.pop()
        if node.children:
            child_visits = sum(ch.visits for ch in node.children)
            assert child_visits == node.visits - node.expanded_at, (
                "child visits must equal parent visits minus pre-expansion visits"
            )
            stack.extend(node.children)


def search_tree(
    state,
    side: Side,
    cfg: MctsConfig,
    rng: random.Random,
    game=None,
    eval_fn: Optional[EvalFn] = None,
    force_generic: bool = False,
) -> tuple[str, MctsNode]:
    """Run the search and return (chosen action id, root node)."""
    if game is None:
        game = engine
    if eval_fn is None:
        eval_fn = hp_swing
    me = state.player if side is Side.PLAYER else state.ai
    if me.phase is not Phase.IDLE:
        raise ValueError(f"{side.value} is not at a decision point")
    legal_root = game.legal_actions(state, side)
    if not legal_root:
        raise ValueError("no legal actions to search over")

    fast = not force_generic and game is engine and isinstance(state, GameState)
    if fast:
        root_core = to_core(state)
        match = state.match
        side_is_ai = side is Side.AI
        idx = match.compiled.index

    root = MctsNode(None, 0)
    root.children = [MctsNode(a, 1) for a in legal_root]

    deadline = None
    if cfg.time_ms is not None:
        deadline = time.perf_counter() + cfg.time_ms / 1000.0
    iterations = 0
    while True:
        if deadline is not None:
            if iterations > 0 and time.perf_counter() >= deadline:
                break
        elif iterations >= cfg.iterations:
            break
        iterations += 1

        node = root
        path = [root]
        while node.children:
            node = _select(node, cfg.c)
            path.append(node)
        if node.depth < cfg.d_max and node.visits > cfg.n_max:
            node.children = [MctsNode(a, node.depth + 1) for a in legal_root]
            node.expanded_at = node.visits
            node = _select(node, cfg.c)
            path.append(node)

        path_actions = [n.action for n in path[1:]]
        if fast:
            reward = _fast_rollout(
                root_core,
                match,
                side_is_ai,
                [idx[a] for a in path_actions],
                cfg,
                rng,
                eval_fn,
            )
        else:
            reward = _generic_rollout(state, side, path_actions, cfg, rng, game, eval_fn)
        for n in path:
            n.visits += 1
            n.total_reward += reward
        if cfg.check_invariants:
            _check_conservation(root, iterations)

    best = root.children[0]
    for child in root.children[1:]:
        if child.visits > best.visits or (
            child.visits == best.visits and child.mean_reward > best.mean_reward
        ):
            best = child
    return best.action, root  # type: ignore[return-value]


def search(
    state,
    side: Side,
    cfg: MctsConfig,
    rng: random.Random,
    game=None,
    eval_fn: Optional[EvalFn] = None,
    force_generic: bool = False,
) -> str:
    """Pick an action for `side`; see `search_tree` for the mechanics."""
    action, _ = search_tree(state, side, cfg, rng, game, eval_fn, force_generic)
    return action
