"""Seeded round batches, summary statistics, and report files.

A round wires the pieces together: at every player decision the model picks
an action, the action's motion is announced to the opponent agent (which may
re-score its dominance rate) and then booked into the momentum accumulator;
the engine advances frame by frame; landed player hits reinforce the model.
At termination the round records end-of-round balancedness, the HP
difference, the winner, and the frame count.

Experiments run a fixed number of rounds per (player, agent) pairing with a
paired design: round i uses the same player seed (hence the same player RNG
stream) against every agent, so per-round differences are comparable and the
configured paired tests apply.  Within a pairing the player model carries
over from round to round - the synthetic player, like the humans it stands
in for, keeps what it has learned about the current opponent across a
session - so rounds of one pairing run sequentially while pairings may run
in parallel.  All seeds derive from one master seed.

Reports are written as `rounds.csv` (one row per round) plus `summary.json`
(means, standard deviations, win counts, test results); both are
byte-reproducible and the CSV parses back into the exact round records.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import random
import statistics
from dataclasses import dataclass
from pathlib import Path

from . import engine, health, players
from .agents import build_agent
from .config import ComparisonSpec, ExperimentConfig, load_roster
from .engine import Match, Phase, Side, Winner
from .errors import ConfigError, DegenerateInputError
from .health import SegmentMomenta, load_m2mm
from .players import PlayerModel, biased_player, uniform_player
from .stats import Alternative, Method, paired_t_test, wilcoxon_signed_rank

ROUNDS_CSV_HEADER = "pairing,round,seed,bal_end,hp_diff,winner,frames"


@dataclass(frozen=True)
class RoundResult:
    pairing: str
    round_index: int
    seed: int
    bal_end: float
    hp_diff: int
    winner: Winner
    frames: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.bal_end <= 1.0:
            raise ValueError("bal_end must lie in [0, 1]")
        if not -engine.INITIAL_HP <= self.hp_diff <= engine.INITIAL_HP:
            raise ValueError("hp_diff out of range")


@dataclass(frozen=True)
class ExperimentReport:
    rounds: list[RoundResult]
    summary: dict
    comparisons: list[dict]
    rounds_per_pairing: int
    master_seed: int


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from labeled parts (independent of hash seeds)."""
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def stream_fingerprint(seed: int, draws: int = 4) -> str:
    rng = random.Random(seed)
    return hashlib.sha1(repr([rng.random() for _ in range(draws)]).encode()).hexdigest()


def play_round(
    player: PlayerModel,
    agent,
    match: Match,
    seed: int,
    pairing: str = "",
    round_index: int = 0,
) -> tuple[RoundResult, PlayerModel]:
    """Play one seeded round; returns the result and the evolved player model."""
    player_rng = random.Random(seed)
    agent_rng = random.Random(derive_seed(seed, "agent"))
    state = match.new_round(seed)
    momenta = SegmentMomenta()
    model = player
    has_motion_hook = hasattr(agent, "on_player_motion")
    while (outcome := engine.is_round_over(state)) is None:
        pa = None
        if state.player.phase is Phase.IDLE:
            pa = players.act_player(model, state, player_rng)
            model = players.note_choice(model, pa)
            motion = match.motion_of(pa)
            if has_motion_hook:
                # announce before booking: the rate is scored against the
                # momenta as they stand when the motion is recognized
                agent.on_player_motion(motion, momenta)
            momenta = health.accumulate(momenta, motion, match.table)
        aa = None
        if state.ai.phase is Phase.IDLE:
            aa = agent.act(state, agent_rng)
        state, events = engine.step(state, pa, aa)
        for ev in events:
            if ev.attacker is Side.PLAYER:
                model = players.observe(model, ev)
    result = RoundResult(
        pairing=pairing,
        round_index=round_index,
        seed=seed,
        bal_end=health.balancedness(momenta),
        hp_diff=outcome.hp_diff,
        winner=outcome.winner,
        frames=outcome.end_frame,
    )
    return result, model


def run_round(
    player: PlayerModel,
    agent,
    match: Match,
    seed: int,
    pairing: str = "",
    round_index: int = 0,
) -> RoundResult:
    """Play one seeded round to termination and score it."""
    return play_round(player, agent, match, seed, pairing, round_index)[0]


def build_player_model(spec: dict, match: Match) -> PlayerModel:
    spec = dict(spec)
    kind = spec.pop("kind", "biased")
    try:
        if kind == "biased":
            return biased_player(match.actions, **spec)
        if kind == "uniform":
            return uniform_player(match.actions, **spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad player parameters for {kind!r}: {exc}") from None
    raise ConfigError(f"unknown player kind {kind!r} (expected biased or uniform)")


_MATCH_CACHE: dict[tuple, Match] = {}


def _match_for(cfg: ExperimentConfig) -> Match:
    key = (cfg.roster_path, cfg.m2mm_path)
    match = _MATCH_CACHE.get(key)
    if match is None:
        actions, rules = load_roster(cfg.roster_path)
        table = load_m2mm(cfg.m2mm_path)
        match = Match(actions, rules, table)
        _MATCH_CACHE[key] = match
    return match


def _experiment_pairing(cfg: ExperimentConfig, pairing_index: int) -> list[RoundResult]:
    """All rounds of one pairing, self-contained for worker processes.

    The player model evolves across the pairing's rounds; each round gets a
    fresh agent (dominance rate and momenta reset per round) and the player
    seed shared with the other pairings.
    """
    match = _match_for(cfg)
    pairing = cfg.pairings[pairing_index]
    player_spec = pairing.player if pairing.player is not None else cfg.player
    model = build_player_model(player_spec, match)
    results = []
    for round_index in range(cfg.rounds):
        agent = build_agent(
            pairing.agent,
            match,
            base_mcts=cfg.mcts,
            gate_seed=derive_seed(cfg.master_seed, "gate", pairing.id, round_index),
        )
        seed = derive_seed(cfg.master_seed, "player", round_index)
        result, model = play_round(
            model, agent, match, seed, pairing=pairing.id, round_index=round_index
        )
        results.append(result)
    return results


def run_experiment(cfg: ExperimentConfig, jobs: int | None = None) -> ExperimentReport:
    """Run every (pairing, round) cell and assemble the report.

    Pairings may execute in parallel (`jobs` overrides the config); rounds
    within a pairing are sequential because the player model carries over.
    Results are merged by (pairing order, round index) so output is
    independent of scheduling.
    """
    jobs = cfg.jobs if jobs is None else jobs
    # validate eagerly on the coordinating process before any work starts
    match = _match_for(cfg)
    for pairing in cfg.pairings:
        build_agent(pairing.agent, match, base_mcts=cfg.mcts)
        build_player_model(pairing.player if pairing.player is not None else cfg.player, match)

    pairing_results: dict[int, list[RoundResult]] = {}
    if jobs > 1 and len(cfg.pairings) > 1:
        with concurrent.futures.ProcessPoolExecutor(
            max_workers=min(jobs, len(cfg.pairings))
        ) as pool:
            futures = {
                pool.submit(_experiment_pairing, cfg, pi): pi
                for pi in range(len(cfg.pairings))
            }
            for fut in concurrent.futures.as_completed(futures):
                pairing_results[futures[fut]] = fut.result()
    else:
        for pi in range(len(cfg.pairings)):
            pairing_results[pi] = _experiment_pairing(cfg, pi)
    rounds = [r for pi in sorted(pairing_results) for r in pairing_results[pi]]

    # paired-design integrity: round i's player stream is pairing-independent
    fingerprints = {
        ri: stream_fingerprint(derive_seed(cfg.master_seed, "player", ri))
        for ri in range(cfg.rounds)
    }
    for r in rounds:
        assert stream_fingerprint(r.seed) == fingerprints[r.round_index], (
            "player RNG stream differs across pairings for the same round"
        )

    summary = summarize(rounds)
    comparisons = apply_comparisons(rounds, cfg.comparisons)
    return ExperimentReport(
        rounds=rounds,
        summary=summary,
        comparisons=comparisons,
        rounds_per_pairing=cfg.rounds,
        master_seed=cfg.master_seed,
    )


def _metric(r: RoundResult, name: str) -> float:
    if name == "bal_end":
        return r.bal_end
    if name == "hp_diff":
        return float(r.hp_diff)
    if name == "abs_hp_diff":
        return float(abs(r.hp_diff))
    raise ConfigError(f"unknown metric {name!r}")


def summarize(rounds: list[RoundResult]) -> dict:
    """Per-pairing means, standard deviations, and win counts."""
    by_pairing: dict[str, list[RoundResult]] = {}
    for r in rounds:
        by_pairing.setdefault(r.pairing, []).append(r)
    out: dict = {}
    for pairing, rs in by_pairing.items():
        rs = sorted(rs, key=lambda r: r.round_index)
        block: dict = {"rounds": len(rs)}
        for metric in ("bal_end", "hp_diff", "abs_hp_diff"):
            values = [_metric(r, metric) for r in rs]
            block[metric] = {
                "mean": statistics.fmean(values),
                "sd": statistics.stdev(values) if len(values) >= 2 else 0.0,
            }
        block["wins"] = {
            w.value: sum(1 for r in rs if r.winner is w)
            for w in (Winner.PLAYER, Winner.AI, Winner.DRAW)
        }
        out[pairing] = block
    return out


def apply_comparisons(
    rounds: list[RoundResult], comparisons: tuple[ComparisonSpec, ...]
) -> list[dict]:
    by_pairing: dict[str, dict[int, RoundResult]] = {}
    for r in rounds:
        by_pairing.setdefault(r.pairing, {})[r.round_index] = r
    out = []
    for comp in comparisons:
        a_rounds = by_pairing.get(comp.a, {})
        b_rounds = by_pairing.get(comp.b, {})
        shared = sorted(set(a_rounds) & set(b_rounds))
        pairs = [
            (_metric(a_rounds[i], comp.metric), _metric(b_rounds[i], comp.metric))
            for i in shared
        ]
        for method_name in comp.methods:
            method = Method(method_name)
            entry = {
                "a": comp.a,
                "b": comp.b,
                "metric": comp.metric,
                "alternative": comp.alternative,
                "method": method.value,
            }
            try:
                if method is Method.WILCOXON_SIGNED_RANK:
                    res = wilcoxon_signed_rank(pairs, Alternative(comp.alternative))
                else:
                    res = paired_t_test(pairs, Alternative(comp.alternative))
                entry.update(
                    statistic=res.statistic, p_value=res.p_value, n=res.n, exact=res.exact
                )
            except (DegenerateInputError, ValueError) as exc:
                # a test that cannot run (all-zero diffs, too few pairs) is
                # recorded rather than aborting the whole report
                entry["error"] = str(exc)
            out.append(entry)
    return out


def rounds_to_csv(rounds: list[RoundResult]) -> str:
    lines = [ROUNDS_CSV_HEADER]
    for r in rounds:
        lines.append(
            f"{r.pairing},{r.round_index},{r.seed},{r.bal_end!r},{r.hp_diff},"
            f"{r.winner.value},{r.frames}"
        )
    return "\n".join(lines) + "\n"


def read_rounds_csv(path: str | Path) -> list[RoundResult]:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != ROUNDS_CSV_HEADER:
        raise ConfigError(f"{path}: expected header {ROUNDS_CSV_HEADER!r}")
    rounds = []
    for ln in lines[1:]:
        pairing, rnd, seed, bal, hpd, winner, frames = ln.split(",")
        rounds.append(
            RoundResult(
                pairing=pairing,
                round_index=int(rnd),
                seed=int(seed),
                bal_end=float(bal),
                hp_diff=int(hpd),
                winner=Winner(winner),
                frames=int(frames),
            )
        )
    return rounds


def report_to_summary_json(report: ExperimentReport) -> str:
    payload = {
        "rounds_per_pairing": report.rounds_per_pairing,
        "master_seed": report.master_seed,
        "pairings": report.summary,
        "comparisons": report.comparisons,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_report(report: ExperimentReport, out_dir: str | Path) -> tuple[Path, Path]:
    """Emit rounds.csv and summary.json; summary must match the round list."""
    recomputed = summarize(report.rounds)
    assert recomputed == report.summary, "summary is not recomputable from rounds"
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "rounds.csv"
    json_path = out / "summary.json"
    try:
        csv_path.write_text(rounds_to_csv(report.rounds))
        json_path.write_text(report_to_summary_json(report))
    except OSError as exc:
        raise OSError(f"failed writing report under {out}: {exc}") from exc
    return csv_path, json_path
