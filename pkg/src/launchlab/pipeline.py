"""Pipeline orchestration: parse -> cluster -> features -> annotate,
plus the detection-task filter, the token-selection backtest, and the
per-risk-level distribution report.

Each stage reads and writes only corpus files, so stages can be rerun
individually; outputs are deterministic functions of the inputs.
"""

from __future__ import annotations

import hashlib
import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from . import dataio
from .bundles import DEFAULT_CEX_ADDRESSES, CexList, cluster, extract_in_tx_traces
from .dataio import CorpusPaths, SelectionResult
from .features import FeatureRow, compute_launch_features
from .risk import LabelThresholds, RiskLabel, annotate_corpus
from .txparse import BreakdownReport, parse_corpus


@dataclass
class PipelineConfig:
    sniper_window_s: int = 5
    bucket_seconds: int = 10
    window_minutes: int = 20
    thresholds: LabelThresholds = field(default_factory=LabelThresholds)
    cex: CexList = field(default_factory=lambda: CexList(DEFAULT_CEX_ADDRESSES))
    external_scores: dict[str, float] | None = None


@dataclass
class PipelineResult:
    features: list[FeatureRow]
    labels: list[RiskLabel]
    breakdown: BreakdownReport
    skipped: list[str]


def parse_stage(paths: CorpusPaths) -> BreakdownReport:
    """Parse every launch's transactions; write events and the breakdown."""
    total = BreakdownReport()
    for record in dataio.read_launches(paths.launches):
        txs = dataio.read_transactions(paths.txs(record.mint))
        events, report = parse_corpus(txs)
        dataio.write_events(paths.events(record.mint), events)
        total.counts.update(report.counts)
        total.total += report.total
        total.reorder_warnings += report.reorder_warnings
    dataio.write_breakdown(paths.breakdown, total)
    return total


def cluster_stage(paths: CorpusPaths, cex: CexList) -> None:
    """Cluster file traces plus co-purchase traces into bundles per launch."""
    for record in dataio.read_launches(paths.launches):
        events = dataio.read_events(paths.events(record.mint))
        traces = list(dataio.read_traces(paths.traces(record.mint)))
        traces.extend(extract_in_tx_traces(events))
        dataio.write_bundles(paths.bundles(record.mint), cluster(traces, cex))


def features_stage(paths: CorpusPaths, config: PipelineConfig) -> list[FeatureRow]:
    feed = dataio.read_sol_feed(paths.sol_feed) if paths.sol_feed.exists() else []
    rows = []
    for record in dataio.read_launches(paths.launches):
        events = dataio.read_events(paths.events(record.mint))
        bundles = dataio.read_bundles(paths.bundles(record.mint))
        traces = dataio.read_traces(paths.traces(record.mint))
        row, ts = compute_launch_features(
            mint=record.mint,
            events=events,
            dev=record.creator,
            migrate_ts=record.migrate_ts,
            bundles=bundles,
            traces=traces,
            sol_price_feed=feed,
            sniper_window_s=config.sniper_window_s,
            bucket_seconds=config.bucket_seconds,
        )
        dataio.write_timeseries(paths.timeseries(record.mint), ts)
        rows.append(row)
    dataio.write_features(paths.features, rows)
    dataio.write_feature_schema(paths.feature_schema)
    return rows


def annotate_stage(paths: CorpusPaths, config: PipelineConfig):
    """Label every launch from its post-migration series."""
    mints = []
    series = {}
    prices = {}
    for record in dataio.read_launches(paths.launches):
        mints.append(record.mint)
        post_path = paths.post(record.mint)
        if post_path.exists():
            post = dataio.read_post_series(post_path)
            series[record.mint] = post
            prices[record.mint] = post.price[0]
    report = annotate_corpus(
        series, prices, mints,
        external_scores=config.external_scores,
        thresholds=config.thresholds,
        window_minutes=config.window_minutes,
    )
    dataio.write_labels(paths.labels, report.labels)
    dataio.write_label_histogram(paths.label_histogram, report)
    return report


def run_pipeline(corpus_dir: str | Path, config: PipelineConfig | None = None) -> PipelineResult:
    """Run all stages over a corpus directory, persisting every artifact."""
    config = config or PipelineConfig()
    paths = CorpusPaths(Path(corpus_dir))
    breakdown = parse_stage(paths)
    cluster_stage(paths, config.cex)
    features = features_stage(paths, config)
    report = annotate_stage(paths, config)
    return PipelineResult(features, report.labels, breakdown, report.skipped)


# -- detection-task filter -----------------------------------------------------

MIN_TIME_SPAN_S = 60
MIN_HOLDERS = 100


def filter_task(
    features: list[FeatureRow], labels: list[RiskLabel]
) -> tuple[list[tuple[str, int]], dict[str, int]]:
    """Build the binary detection dataset.

    Launches with a sale shorter than one minute or fewer than 100 holders
    are dropped; high risk maps to label 1, medium and low to 0. Returns
    (mint, label) pairs plus per-class counts.
    """
    level = {l.mint: l.level for l in labels}
    task = []
    for row in features:
        if row.mint not in level:
            continue
        span = row.values.get("time_span")
        holders = row.values.get("holder_num")
        if span is None or holders is None:
            continue
        if span < MIN_TIME_SPAN_S or holders < MIN_HOLDERS:
            continue
        task.append((row.mint, 1 if level[row.mint] == "high" else 0))
    counts = {
        "high": sum(1 for _, y in task if y == 1),
        "normal": sum(1 for _, y in task if y == 0),
    }
    return task, counts


def write_task(paths: CorpusPaths, task: list[tuple[str, int]], counts: dict[str, int]) -> None:
    dataio._write_csv(paths.task, "launchlab.task.v1", ["mint", "label"], (list(t) for t in task))
    total = max(sum(counts.values()), 1)
    rows = [
        ["high", counts["high"], f"{100.0 * counts['high'] / total:.2f}", 1],
        ["normal", counts["normal"], f"{100.0 * counts['normal'] / total:.2f}", 0],
    ]
    dataio._write_csv(
        paths.task_counts, "launchlab.task_counts.v1",
        ["risk_level", "count", "percentage", "label"], rows,
    )


def read_task(path: Path) -> list[tuple[str, int]]:
    return [
        (f[0], int(f[1]))
        for _, f in dataio._read_csv(path, "launchlab.task.v1", ["mint", "label"])
    ]


# -- token-selection backtest ----------------------------------------------------


def _mint_rng(seed: int, mint: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{mint}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def mint_loss_pct(
    series, migration_price: float, seed: int, mint: str, samples: int = 100
) -> float:
    """Mean percentage loss over seeded random sell timestamps in (0, 60min].

    The sell second is drawn per (seed, mint), so the same mint's loss is
    identical no matter which selection strategy picked it.
    """
    rng = _mint_rng(seed, mint)
    n = len(series.price)
    total = 0.0
    for _ in range(samples):
        t = rng.randint(1, n - 1)
        total += (1.0 - series.price[t] / migration_price) * 100.0
    return total / samples


def backtest_selection(
    scores: dict[str, float],
    post_series: dict[str, "object"],
    migration_prices: dict[str, float],
    risk_levels: dict[str, str],
    k: int,
    samples: int = 100,
    seed: int = 0,
) -> SelectionResult:
    """Buy the k most-normal-scored mints at migration, sell at random times.

    Precision is the fraction of selected mints that are not high risk;
    loss is the mean percentage loss per unit of capital.
    """
    universe = [m for m in scores if m in post_series and m in migration_prices]
    if k > len(universe):
        raise ValueError(f"k={k} exceeds {len(universe)} scored mints")
    if k <= 0:
        raise ValueError("k must be positive")
    ranked = sorted(universe, key=lambda m: (-scores[m], m))
    selected = tuple(ranked[:k])
    losses = [
        mint_loss_pct(post_series[m], migration_prices[m], seed, m, samples) for m in selected
    ]
    non_high = sum(1 for m in selected if risk_levels.get(m) != "high")
    return SelectionResult(
        k=k,
        selected=selected,
        precision=non_high / k,
        loss_pct=sum(losses) / len(losses),
    )


def write_backtest(paths: CorpusPaths, results: list[SelectionResult]) -> None:
    dataio._write_csv(
        paths.backtest,
        "launchlab.backtest.v1",
        ["k", "precision", "loss_pct", "selected"],
        (
            [r.k, repr(r.precision), repr(r.loss_pct), " ".join(r.selected)]
            for r in results
        ),
    )


# -- distribution report -----------------------------------------------------------

REPORT_PANELS = (
    "time_span",
    "holder_num",
    "buy_num",
    "avg_buy_volume",
    "early_top10_hold_pct",
    "early_top20_hold_pct",
    "top10_hold_pct",
    "bundle_top10_hold_pct",
)


def report_distributions(
    features: list[FeatureRow], labels: list[RiskLabel]
) -> list[tuple[str, str, int, float | None, float | None, float | None]]:
    """Quartile summaries per risk level for the eight panel features."""
    level = {l.mint: l.level for l in labels}
    rows = []
    for panel in REPORT_PANELS:
        for risk in ("high", "medium", "low"):
            values = [
                float(row.values[panel])
                for row in features
                if level.get(row.mint) == risk and row.values.get(panel) is not None
            ]
            if not values:
                rows.append((panel, risk, 0, None, None, None))
                continue
            q1, med, q3 = (
                statistics.quantiles(values, n=4) if len(values) > 1 else (values[0],) * 3
            )
            rows.append((panel, risk, len(values), q1, med, q3))
    return rows


def write_distributions(paths: CorpusPaths, rows) -> None:
    dataio._write_csv(
        paths.distributions,
        "launchlab.distributions.v1",
        ["panel", "risk_level", "count", "q1", "median", "q3"],
        (
            [p, r, c, "" if q1 is None else repr(q1), "" if m is None else repr(m),
             "" if q3 is None else repr(q3)]
            for p, r, c, q1, m, q3 in rows
        ),
    )
