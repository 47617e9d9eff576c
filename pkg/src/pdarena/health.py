"""Body-segment momentum accounting and the balancedness metric.

Every motion a player performs adds a fixed momentum increment to each of
four body segments (right arm, left arm, right leg, left leg).  From the
accumulated per-segment momenta we derive:

* the expected momentum of each segment (the max of its left/right pair),
* the gap between expected and actual momentum per segment,
* balancedness  Bal = 1 - 2 * sum(gaps) / sum(expected),  in [0, 1],
* a per-motion fitness score: the predicted drop in total gap if the motion
  were performed now, min-max normalized over a motion set to [0, 1].

Momenta only ever grow within a round and are reset to zero at round start.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

SEGMENTS = ("right_arm", "left_arm", "right_leg", "left_leg")

_DATA_DIR = Path(__file__).parent / "data"
DEFAULT_M2MM_PATH = _DATA_DIR / "m2mm.csv"


@dataclass(frozen=True)
class SegmentMomenta:
    """Accumulated movement momentum of the four body segments."""

    right_arm: float = 0.0
    left_arm: float = 0.0
    right_leg: float = 0.0
    left_leg: float = 0.0

    def __post_init__(self) -> None:
        for name in SEGMENTS:
            if getattr(self, name) < 0:
                raise ValueError(f"momentum {name} must be >= 0")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.right_arm, self.left_arm, self.right_leg, self.left_leg)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in SEGMENTS}


@dataclass(frozen=True)
class MotionMomentumTable:
    """Maps a motion id to its per-segment momentum increment 4-vector."""

    rows: dict[str, tuple[float, float, float, float]]

    def __post_init__(self) -> None:
        for motion, vec in self.rows.items():
            if len(vec) != 4 or any(v < 0 for v in vec):
                raise ValueError(f"motion {motion!r}: increments must be 4 nonnegative values")

    def __contains__(self, motion: str) -> bool:
        return motion in self.rows

    def increments(self, motion: str) -> tuple[float, float, float, float]:
        try:
            return self.rows[motion]
        except KeyError:
            raise KeyError(f"unknown motion {motion!r}") from None

    def motions(self) -> list[str]:
        return list(self.rows)


@dataclass(frozen=True)
class HealthSnapshot:
    """Expected momenta, gaps, and balancedness for one momentum state."""

    em: tuple[float, float, float, float]
    gap: tuple[float, float, float, float]
    bal: float


@dataclass(frozen=True)
class FitnessTable:
    """Per-motion predicted gap decrease and its [0, 1] normalization."""

    gap_decrease: dict[str, float]
    fitness: dict[str, float]
    min_decrease: float
    max_decrease: float


def load_m2mm(path: str | Path | None = None) -> MotionMomentumTable:
    """Load a motion momentum table from CSV.

    Header must start with ``motion,right_arm,left_arm,right_leg,left_leg``;
    a trailing ``comment`` column and ``#`` comment lines are tolerated (the
    bundled file uses the comment column to mark rows that are local filler
    rather than measured data).
    """
    path = Path(path) if path is not None else DEFAULT_M2MM_PATH
    rows: dict[str, tuple[float, float, float, float]] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader, None)
        expected = ["motion", "right_arm", "left_arm", "right_leg", "left_leg"]
        if header is None or [h.strip() for h in header[:5]] != expected:
            raise ValueError(f"{path}: header must start with {','.join(expected)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or not row[0].strip():
                continue
            if len(row) < 5:
                raise ValueError(f"{path}:{lineno}: expected at least 5 columns")
            motion = row[0].strip()
            if motion in rows:
                raise ValueError(f"{path}:{lineno}: duplicate motion {motion!r}")
            try:
                vec = tuple(float(v) for v in row[1:5])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            rows[motion] = vec  # type: ignore[assignment]
    return MotionMomentumTable(rows)


def accumulate(momenta: SegmentMomenta, motion: str, table: MotionMomentumTable) -> SegmentMomenta:
    """Add the motion's per-segment increments; raises KeyError for unknown motions."""
    mm = table.increments(motion)
    return SegmentMomenta(
        momenta.right_arm + mm[0],
        momenta.left_arm + mm[1],
        momenta.right_leg + mm[2],
        momenta.left_leg + mm[3],
    )


def expected_momenta(momenta: SegmentMomenta) -> tuple[float, float, float, float]:
    """Expected momentum per segment: the max of each left/right pair."""
    arm = max(momenta.right_arm, momenta.left_arm)
    leg = max(momenta.right_leg, momenta.left_leg)
    return (arm, arm, leg, leg)


def gaps(momenta: SegmentMomenta) -> tuple[float, float, float, float]:
    """Per-segment shortfall against the expected momentum (0 for each pair's max)."""
    em = expected_momenta(momenta)
    am = momenta.as_tuple()
    return tuple(e - a for e, a in zip(em, am))  # type: ignore[return-value]


def balancedness(momenta: SegmentMomenta) -> float:
    """Bal = 1 - 2 * sum(gaps) / sum(expected momenta).

    Zero total expected momentum (nothing moved yet) is defined as perfectly
    balanced: returns 1.0.
    """
    em = expected_momenta(momenta)
    total_em = sum(em)
    if total_em == 0:
        return 1.0
    bal = 1.0 - 2.0 * sum(gaps(momenta)) / total_em
    # fully one-sided pairs make 2*sum(gaps) == total_em exactly in real
    # arithmetic; a single ulp of rounding must not leak outside [0, 1]
    return min(1.0, max(0.0, bal))


def snapshot(momenta: SegmentMomenta) -> HealthSnapshot:
    return HealthSnapshot(expected_momenta(momenta), gaps(momenta), balancedness(momenta))


def gap_decrease(momenta: SegmentMomenta, motion: str, table: MotionMomentumTable) -> float:
    """Predicted drop in total gap if `motion` were performed now.

    sum(gap_s) - sum(|gap_s - mm_s(motion)|), with the expected momenta held
    fixed at their current values; performing the motion would in reality also
    raise some expected momenta, so this is a deliberate one-step estimate.
    """
    gap = gaps(momenta)
    mm = table.increments(motion)
    return sum(gap) - sum(abs(g - m) for g, m in zip(gap, mm))


def fitness_table(
    momenta: SegmentMomenta, motions: list[str], table: MotionMomentumTable
) -> FitnessTable:
    """Min-max normalize gap_decrease over `motions` into [0, 1].

    A degenerate set (all decreases equal, including a single motion) maps
    every motion to the neutral value 0.5.
    """
    if not motions:
        raise ValueError("motions must be non-empty")
    dec = {m: gap_decrease(momenta, m, table) for m in motions}
    lo = min(dec.values())
    hi = max(dec.values())
    if hi == lo:
        fit = {m: 0.5 for m in motions}
    else:
        fit = {m: (d - lo) / (hi - lo) for m, d in dec.items()}
    return FitnessTable(dec, fit, lo, hi)
