"""Welch's t-test, Pearson correlation and corpus group/trend comparisons."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    DomainError,
    LengthMismatch,
    MissingMetadata,
    SampleTooSmall,
    TooFewDecades,
    ZeroVariance,
)

_EPS = 1e-16
_TINY = 1e-300
_MAX_TERMS = 100_000


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_TERMS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if not (a > 0 and b > 0) or not (0.0 <= x <= 1.0):
        raise DomainError(f"incomplete beta undefined for a={a}, b={b}, x={x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with df degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))


def _deviations(xs: Sequence[float]) -> tuple[float, list[float]]:
    mean = math.fsum(xs) / len(xs)
    return mean, [x - mean for x in xs]


def _scaled_sum_sq(devs: Sequence[float], scale: float) -> float:
    return math.fsum((d / scale) ** 2 for d in devs)


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    mean_x: float
    mean_y: float
    n_x: int
    n_y: int
    excluded: int = 0


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int


def welch_t_test(xs: Sequence[float], ys: Sequence[float]) -> TTestResult:
    """Two-sided Welch test with Welch-Satterthwaite degrees of freedom."""
    xs, ys = list(xs), list(ys)
    if len(xs) < 2 or len(ys) < 2:
        raise SampleTooSmall("each sample needs at least 2 values")
    mx, dx = _deviations(xs)
    my, dy = _deviations(ys)
    # t and df are scale-free, so work in units of the largest deviation to
    # keep squares of tiny or huge values representable
    scale = max(map(abs, dx + dy), default=0.0)
    if scale == 0:
        raise ZeroVariance("both samples are constant")
    sx = _scaled_sum_sq(dx, scale) / (len(xs) - 1) / len(xs)
    sy = _scaled_sum_sq(dy, scale) / (len(ys) - 1) / len(ys)
    se2 = sx + sy
    t = (mx - my) / scale / math.sqrt(se2)
    u, w = sx / se2, sy / se2
    df = 1.0 / (u * u / (len(xs) - 1) + w * w / (len(ys) - 1))
    return TTestResult(t, df, student_t_two_sided(t, df), mx, my, len(xs), len(ys))


def pearson(xs: Sequence[float], ys: Sequence[float]) -> CorrelationResult:
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} != {len(ys)}")
    n = len(xs)
    if n < 3:
        raise SampleTooSmall("pearson needs at least 3 points")
    _, dx = _deviations(xs)
    _, dy = _deviations(ys)
    cx, cy = max(map(abs, dx)), max(map(abs, dy))
    if cx == 0 or cy == 0:
        raise ZeroVariance("a variable is constant")
    dx = [d / cx for d in dx]
    dy = [d / cy for d in dy]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    if abs(r) == 1.0:
        return CorrelationResult(r, 0.0, n)
    t = r * math.sqrt((n - 2) / (1 - r * r))
    return CorrelationResult(r, student_t_two_sided(t, n - 2), n)


# corpus-level comparisons over metric rows joined with metadata

Row = Mapping[str, object]


def _present(value) -> bool:
    if value is None or value == "":
        return False
    return not (isinstance(value, float) and math.isnan(value))


def group_compare(rows: Iterable[Row], metric: str) -> TTestResult:
    """Welch test of ``metric`` between fiction (x) and nonfiction (y) rows.

    Rows need an ``is_fiction`` flag; rows where the metric is absent are
    excluded and counted in ``excluded``.
    """
    fiction: list[float] = []
    nonfiction: list[float] = []
    excluded = 0
    for row in rows:
        flag = row.get("is_fiction")
        if flag is None or flag == "":
            continue
        value = row.get(metric)
        if not _present(value):
            excluded += 1
            continue
        (fiction if flag else nonfiction).append(float(value))
    if not fiction or not nonfiction:
        raise MissingMetadata(f"need both fiction and nonfiction rows with {metric!r}")
    res = welch_t_test(fiction, nonfiction)
    return TTestResult(**{**res.__dict__, "excluded": excluded})


def decade_means(rows: Iterable[Row], metric: str, fiction: bool) -> dict[int, float]:
    buckets: dict[int, list[float]] = defaultdict(list)
    for row in rows:
        if row.get("is_fiction") is None or bool(row.get("is_fiction")) != fiction:
            continue
        decade, value = row.get("decade"), row.get(metric)
        if _present(decade) and _present(value):
            buckets[int(decade)].append(float(value))
    return {d: math.fsum(v) / len(v) for d, v in sorted(buckets.items())}


def decade_trend(rows: Iterable[Row], metric: str, fiction: bool) -> CorrelationResult:
    """Pearson r between decade and the per-decade mean of ``metric`` within one group."""
    means = decade_means(rows, metric, fiction)
    if len(means) < 3:
        raise TooFewDecades(f"{len(means)} decades with data; need 3")
    return pearson(list(means), list(means.values()))
