"""Paired nonparametric and parametric tests used by the experiment harness.

The Wilcoxon signed-rank test drops zero differences, midranks ties, and for
n <= 20 computes the exact p-value by enumerating all 2^n sign assignments
of the observed absolute-difference ranks (vectorized over bit masks).  For
larger n it falls back to the normal approximation with tie-corrected
variance and continuity correction.

The paired t-test evaluates the Student-t tail through the regularized
incomplete beta function, implemented here with the standard continued
fraction so the test carries no statistics-package dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError


class Alternative(str, Enum):
    TWO_SIDED = "TWO_SIDED"
    GREATER = "GREATER"
    LESS = "LESS"


class Method(str, Enum):
    WILCOXON_SIGNED_RANK = "WILCOXON_SIGNED_RANK"
    PAIRED_T = "PAIRED_T"


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class, despite the name

    method: Method
    statistic: float
    p_value: float
    n: int
    alternative: Alternative
    exact: bool

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p_value must lie in [0, 1]")


EXACT_LIMIT = 20  # enumeration cap: 2^20 sign patterns


def _differences(pairs: Sequence[tuple[float, float]]) -> list[float]:
    return [float(x) - float(y) for x, y in pairs]


def _midranks(values: list[float]) -> list[float]:
    """Ranks of `values` with ties sharing their average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def wilcoxon_signed_rank(
    pairs: Sequence[tuple[float, float]],
    alternative: Alternative = Alternative.TWO_SIDED,
    mode: str = "auto",
) -> TestResult:
    """Test whether paired differences are symmetric around zero.

    The statistic is the positive-rank sum W+.  `mode` is "auto" (exact up
    to n=20), "exact", or "approx".  GREATER means first > second element.
    Raises DegenerateInputError when every difference is zero.
    """
    alternative = Alternative(alternative)
    diffs = [d for d in _differences(pairs) if d != 0.0]
    if not diffs:
        raise DegenerateInputError("all paired differences are zero")
    n = len(diffs)
    ranks = _midranks([abs(d) for d in diffs])
    w_plus = sum(r for d, r in zip(diffs, ranks) if d > 0)

    exact = mode == "exact" or (mode == "auto" and n <= EXACT_LIMIT)
    if exact:
        # Work on doubled ranks so midranks (k + 0.5) stay integral.
        ranks2 = np.asarray([int(round(2 * r)) for r in ranks], dtype=np.int64)
        w2 = int(round(2 * w_plus))
        masks = np.arange(1 << n, dtype=np.uint32)
        bits = (masks[:, None] >> np.arange(n, dtype=np.uint32)) & 1
        sums = bits @ ranks2
        total = float(1 << n)
        p_ge = float(np.count_nonzero(sums >= w2)) / total
        p_le = float(np.count_nonzero(sums <= w2)) / total
        if alternative is Alternative.GREATER:
            p = p_ge
        elif alternative is Alternative.LESS:
            p = p_le
        else:
            p = min(1.0, 2.0 * min(p_ge, p_le))
    else:
        mean = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        counts: dict[float, int] = {}
        for r in ranks:
            counts[r] = counts.get(r, 0) + 1
        var -= sum(t**3 - t for t in counts.values()) / 48.0
        if var <= 0:
            raise DegenerateInputError("zero variance in signed ranks")
        sd = math.sqrt(var)
        if alternative is Alternative.GREATER:
            p = _normal_sf((w_plus - mean - 0.5) / sd)
        elif alternative is Alternative.LESS:
            p = 1.0 - _normal_sf((w_plus - mean + 0.5) / sd)
        else:
            z = (abs(w_plus - mean) - 0.5) / sd
            p = min(1.0, 2.0 * _normal_sf(max(z, 0.0)))
    return TestResult(
        method=Method.WILCOXON_SIGNED_RANK,
        statistic=float(w_plus),
        p_value=float(p),
        n=n,
        alternative=alternative,
        exact=exact,
    )


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz's method)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 200):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-14:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _beta_cont_frac(a, b, x) / a
    return 1.0 - bt * _beta_cont_frac(b, a, 1.0 - x) / b


def student_t_sf(t: float, df: float) -> float:
    """P(T > t) for Student's t with `df` degrees of freedom."""
    if df <= 0:
        raise ValueError("df must be > 0")
    x = df / (df + t * t)
    half_tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x)
    return half_tail if t >= 0 else 1.0 - half_tail


def paired_t_test(
    pairs: Sequence[tuple[float, float]],
    alternative: Alternative = Alternative.TWO_SIDED,
) -> TestResult:
    """t = mean(d) / (sd(d) / sqrt(n)) on paired differences, df = n - 1."""
    alternative = Alternative(alternative)
    diffs = _differences(pairs)
    n = len(diffs)
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0:
        raise DegenerateInputError("zero variance in paired differences")
    t = mean / math.sqrt(var / n)
    if alternative is Alternative.GREATER:
        p = student_t_sf(t, n - 1)
    elif alternative is Alternative.LESS:
        p = 1.0 - student_t_sf(t, n - 1)
    else:
        p = min(1.0, 2.0 * student_t_sf(abs(t), n - 1))
    return TestResult(
        method=Method.PAIRED_T,
        statistic=float(t),
        p_value=float(p),
        n=n,
        alternative=alternative,
        exact=False,
    )
