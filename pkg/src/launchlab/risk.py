"""Post-migration risk annotation.

Two signals label each launch: ``min_price_ratio`` (lowest price inside a
window after migration, normalized by the migration price) catches outright
collapses, and a deterministic manipulation score catches price-managed
launches whose ratio stays high while a single party runs recurring
sell-into-buys / buy-into-capitulation cycles. The label rule: high when
either signal trips, low only when both are quiet, medium otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

POST_WINDOW_SECONDS = 3600
RISK_LEVELS = ("high", "medium", "low")

# min_price_ratio histogram bin edges; the last bin holds ratio >= 1.
HISTOGRAM_BINS = ((0.0, 0.2), (0.2, 0.4), (0.4, 0.6), (0.6, 0.8), (0.8, 1.0), (1.0, 1.0))

# Contribution weights of the three manipulation signals.
SCORE_WEIGHTS = (0.4, 0.3, 0.3)


@dataclass(frozen=True)
class PostSeries:
    """Per-second post-migration channels, one hour long.

    Channels: last trade price (carried forward through quiet seconds),
    buy and sell token volumes, trade count, and signed net token flow.
    """

    price: tuple[float, ...]
    buy_volume: tuple[float, ...]
    sell_volume: tuple[float, ...]
    tx_count: tuple[int, ...]
    net_flow: tuple[float, ...]

    def __post_init__(self) -> None:
        n = len(self.price)
        if n != POST_WINDOW_SECONDS:
            raise ValueError(f"post series must cover {POST_WINDOW_SECONDS} seconds, got {n}")
        for name in ("buy_volume", "sell_volume", "tx_count", "net_flow"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"channel {name} length mismatch")
        if any(p <= 0 for p in self.price):
            raise ValueError("prices must be positive")

    def channels(self) -> np.ndarray:
        """(time, 5) array: price, buy_volume, sell_volume, tx_count, net_flow."""
        return np.column_stack(
            [self.price, self.buy_volume, self.sell_volume, self.tx_count, self.net_flow]
        ).astype(np.float64)


@dataclass(frozen=True)
class RiskLabel:
    mint: str
    min_price_ratio: float
    pred_score: float
    level: str
    window_minutes: int = 20


@dataclass(frozen=True)
class LabelThresholds:
    """Annotation-rule cutoffs; defaults follow the published rule."""

    high_ratio: float = 0.3
    high_score: float = 0.7
    low_ratio: float = 0.7
    low_score: float = 0.3


def min_price_ratio(
    series: PostSeries, migration_price: float, window_minutes: int = 20
) -> float:
    """Minimum price in the first ``window_minutes``, over the migration price."""
    if migration_price <= 0:
        raise ValueError("migration_price must be positive")
    window = window_minutes * 60
    if window <= 0:
        raise ValueError("window must cover at least one second")
    prices = series.price[: min(window, len(series.price))]
    if not prices:
        raise ValueError("empty annotation window")
    return min(prices) / migration_price


def _moving_average(x: np.ndarray, width: int) -> np.ndarray:
    if width <= 1:
        return x
    kernel = np.ones(width) / width
    return np.convolve(x, kernel, mode="same")


def _ramp(value: float, lo: float, hi: float) -> float:
    if hi <= lo:
        return 0.0
    return float(np.clip((value - lo) / (hi - lo), 0.0, 1.0))


def _reversal_signal(flow: np.ndarray, gross: np.ndarray) -> float:
    """Count of large alternating net-flow reversals, normalized to [0, 1].

    The net flow is smoothed and split into sign runs; a run counts as a
    directional push when it is sustained and its peak clears a threshold
    set against the local gross volume (a dominant single source is the only
    way sustained net flow stays a large fraction of gross). Alternations
    between qualifying pushes of opposite sign are reversals.
    """
    if float(gross.mean()) <= 0:
        return 0.0
    # Remove slow drift so only cycle-scale pushes remain, then express the
    # smoothed net flow relative to the local gross volume.
    baseline = _moving_average(flow, 601)
    smooth = _moving_average(flow, 15) - baseline
    local_gross = np.maximum(_moving_average(gross, 61), 1e-9)
    rel = smooth / local_gross

    # Sign runs of the relative flow that are both sustained and strong.
    pushes: list[tuple[int, int, int]] = []  # (sign, start, end)
    run_sign = 0
    run_peak = 0.0
    run_start = 0
    run_end = 0
    for i, v in enumerate(rel):
        sign = 1 if v > 0 else (-1 if v < 0 else 0)
        if sign == 0:
            continue
        if sign != run_sign:
            if run_sign != 0 and run_peak >= 0.55 and run_end - run_start >= 9:
                pushes.append((run_sign, run_start, run_end))
            run_sign = sign
            run_peak = abs(v)
            run_start = i
        else:
            run_peak = max(run_peak, abs(v))
        run_end = i
    if run_sign != 0 and run_peak >= 0.55 and run_end - run_start >= 9:
        pushes.append((run_sign, run_start, run_end))

    # A reversal is a push followed promptly by an opposite-signed push;
    # isolated bursts separated by long quiet stretches do not count.
    reversals = 0
    for (sign_a, _, end_a), (sign_b, start_b, _) in zip(pushes, pushes[1:]):
        if sign_a != sign_b and start_b - end_a <= 18:
            reversals += 1
    return _ramp(reversals, 3.0, 20.0)


def _periodicity_signal(price: np.ndarray) -> float:
    """Strength of recurring structure in coarse price returns.

    Returns are winsorized first so a handful of one-off dump spikes cannot
    masquerade as a cycle; only genuinely repeated structure survives.
    """
    coarse = price[::10]
    returns = np.diff(np.log(coarse))
    std = returns.std()
    if std <= 1e-12:
        return 0.0
    clipped = np.clip(returns, returns.mean() - 3 * std, returns.mean() + 3 * std)
    std = clipped.std()
    if std <= 1e-12:
        return 0.0
    centered = (clipped - clipped.mean()) / std
    n = len(centered)
    best = 0.0
    for lag in range(2, min(60, n // 3)):
        c = float(np.mean(centered[:-lag] * centered[lag:]))
        best = max(best, abs(c))
    return _ramp(best, 0.12, 0.45)


def _counterflow_signal(flow: np.ndarray, price: np.ndarray) -> float:
    """Anti-correlation between net flow and the following price move.

    Scans several horizons because the cycle period varies; the strongest
    anti-correlation wins.
    """
    smooth = _moving_average(flow, 15)
    log_price = np.log(price)
    best = 0.0
    for horizon in (10, 20, 30, 45, 60, 90):
        future_ret = log_price[horizon:] - log_price[:-horizon]
        x = smooth[: len(future_ret)]
        if x.std() <= 1e-12 or future_ret.std() <= 1e-12:
            continue
        corr = float(np.corrcoef(x, future_ret)[0, 1])
        best = max(best, -corr)
    return _ramp(best, 0.06, 0.30)


def heuristic_manipulation_score(series: PostSeries) -> float:
    """Deterministic score in [0, 1] for structured sell-buy price management.

    Combines three normalized signals with fixed weights: large alternating
    net-flow reversals, periodic structure in price returns, and net flow
    anti-correlating with the subsequent price move.
    """
    price = np.asarray(series.price, dtype=np.float64)
    flow = np.asarray(series.net_flow, dtype=np.float64)
    gross = np.asarray(series.buy_volume, dtype=np.float64) + np.asarray(
        series.sell_volume, dtype=np.float64
    )
    if not np.any(flow) and price.max() == price.min():
        return 0.0
    w_rev, w_per, w_cf = SCORE_WEIGHTS
    score = (
        w_rev * _reversal_signal(flow, gross)
        + w_per * _periodicity_signal(price)
        + w_cf * _counterflow_signal(flow, price)
    )
    return float(np.clip(score, 0.0, 1.0))


def label(
    ratio: float, pred_score: float, thresholds: LabelThresholds = LabelThresholds()
) -> str:
    """Annotation rule: the three predicates partition every (ratio, score)."""
    if ratio < thresholds.high_ratio or pred_score >= thresholds.high_score:
        return "high"
    if ratio >= thresholds.low_ratio and pred_score < thresholds.low_score:
        return "low"
    return "medium"


@dataclass
class AnnotationReport:
    labels: list[RiskLabel] = field(default_factory=list)
    histogram: list[int] = field(default_factory=lambda: [0] * len(HISTOGRAM_BINS))
    skipped: list[str] = field(default_factory=list)

    def level_counts(self) -> dict[str, int]:
        counts = {level: 0 for level in RISK_LEVELS}
        for lbl in self.labels:
            counts[lbl.level] += 1
        return counts


def _histogram_bin(ratio: float) -> int:
    if ratio >= 1.0:
        return len(HISTOGRAM_BINS) - 1
    for i, (lo, hi) in enumerate(HISTOGRAM_BINS[:-1]):
        if lo <= ratio < hi:
            return i
    return 0


def annotate_corpus(
    series_by_mint: dict[str, PostSeries],
    migration_prices: dict[str, float],
    mints: list[str],
    external_scores: dict[str, float] | None = None,
    thresholds: LabelThresholds = LabelThresholds(),
    window_minutes: int = 20,
) -> AnnotationReport:
    """Label every mint and build the min_price_ratio histogram.

    Externally supplied prediction scores (for example from a trained
    detector) override the built-in heuristic. Mints with no post series are
    skipped with a warning entry rather than failing the batch.
    """
    report = AnnotationReport()
    for mint in mints:
        series = series_by_mint.get(mint)
        if series is None or mint not in migration_prices:
            report.skipped.append(mint)
            continue
        ratio = min_price_ratio(series, migration_prices[mint], window_minutes)
        if external_scores is not None and mint in external_scores:
            score = external_scores[mint]
        else:
            score = heuristic_manipulation_score(series)
        level = label(ratio, score, thresholds)
        report.labels.append(RiskLabel(mint, ratio, score, level, window_minutes))
        report.histogram[_histogram_bin(ratio)] += 1
    return report
