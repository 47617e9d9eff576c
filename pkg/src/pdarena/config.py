"""JSON configuration loading for rosters, rules, and experiments.

Roster file schema (see data/roster.json for the bundled default)::

    {
      "rules":   {"arena_width": int, "round_frame_limit": int,
                  "player_spawn_x": int, "ai_spawn_x": int},
      "actions": [{"id", "motion_id", "kind", "damage", "reach", "height",
                   "startup_frames", "active_frames", "recovery_frames",
                   "move_speed"}, ...]
    }

Experiment file schema (see data/experiment.json)::

    {
      "rounds": int, "master_seed": int, "jobs": int,
      "roster": path or null, "m2mm": path or null,
      "player": {"kind": "biased"|"uniform", "side_bias": float,
                 "reinforce_rate": float, "weights": {action: float}?},
      "mcts":   {"c", "n_max", "d_max", "t_sim", "iterations", "time_ms"?},
      "pairings": [{"id": str, "agent": {"kind": "mcts"|"pda"|"dda", ...},
                    "player": {...}?}, ...],
      "comparisons": [{"a", "b", "metric", "alternative", "methods"}, ...]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .engine import ActionSpec, Height, Kind, MatchRules
from .errors import ConfigError

_DATA_DIR = Path(__file__).parent / "data"
DEFAULT_ROSTER_PATH = _DATA_DIR / "roster.json"
DEFAULT_EXPERIMENT_PATH = _DATA_DIR / "experiment.json"


def _read_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None


def load_roster(path: str | Path | None = None) -> tuple[list[ActionSpec], MatchRules]:
    """Parse a roster file into action specs and match rules."""
    path = Path(path) if path is not None else DEFAULT_ROSTER_PATH
    raw = _read_json(path)
    try:
        rules = MatchRules(**raw.get("rules", {}))
    except TypeError as exc:
        raise ConfigError(f"{path}: bad rules block: {exc}") from None
    actions = []
    for entry in raw.get("actions", []):
        entry = dict(entry)
        try:
            entry["kind"] = Kind(entry["kind"])
            entry["height"] = Height(entry.get("height", "NONE"))
            actions.append(ActionSpec(**entry))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: bad action entry {entry.get('id')!r}: {exc}") from None
    if not actions:
        raise ConfigError(f"{path}: roster has no actions")
    return actions, rules


@dataclass(frozen=True)
class ComparisonSpec:
    a: str
    b: str
    metric: str = "bal_end"
    alternative: str = "TWO_SIDED"
    methods: tuple[str, ...] = ("WILCOXON_SIGNED_RANK", "PAIRED_T")

    def __post_init__(self) -> None:
        if self.metric not in ("bal_end", "hp_diff", "abs_hp_diff"):
            raise ConfigError(f"unknown comparison metric {self.metric!r}")


@dataclass(frozen=True)
class PairingSpec:
    id: str
    agent: dict
    player: dict | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    rounds: int = 30
    master_seed: int = 0
    jobs: int = 1
    roster_path: str | None = None
    m2mm_path: str | None = None
    player: dict = field(default_factory=dict)
    mcts: dict = field(default_factory=dict)
    pairings: tuple[PairingSpec, ...] = ()
    comparisons: tuple[ComparisonSpec, ...] = ()

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be >= 0")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not self.pairings:
            raise ConfigError("experiment needs at least one pairing")
        ids = [p.id for p in self.pairings]
        if len(set(ids)) != len(ids):
            raise ConfigError("pairing ids must be unique")
        for c in self.comparisons:
            for side in (c.a, c.b):
                if side not in ids:
                    raise ConfigError(f"comparison references unknown pairing {side!r}")


def load_experiment(path: str | Path | None = None) -> ExperimentConfig:
    path = Path(path) if path is not None else DEFAULT_EXPERIMENT_PATH
    raw = _read_json(path)
    try:
        pairings = tuple(
            PairingSpec(id=p["id"], agent=dict(p["agent"]), player=p.get("player"))
            for p in raw.get("pairings", [])
        )
        comparisons = tuple(
            ComparisonSpec(
                a=c["a"],
                b=c["b"],
                metric=c.get("metric", "bal_end"),
                alternative=c.get("alternative", "TWO_SIDED"),
                methods=tuple(c.get("methods", ("WILCOXON_SIGNED_RANK", "PAIRED_T"))),
            )
            for c in raw.get("comparisons", [])
        )
        return ExperimentConfig(
            rounds=raw.get("rounds", 30),
            master_seed=raw.get("master_seed", 0),
            jobs=raw.get("jobs", 1),
            roster_path=raw.get("roster"),
            m2mm_path=raw.get("m2mm"),
            player=dict(raw.get("player", {})),
            mcts=dict(raw.get("mcts", {})),
            pairings=pairings,
            comparisons=comparisons,
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
