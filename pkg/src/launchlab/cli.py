"""Command-line interface: one subcommand per pipeline stage.

Every subcommand reads and writes only files under the corpus directory,
so stages can be rerun independently::

    launchlab simulate --corpus out --n 100 --mix high=0.55,medium=0.2,low=0.1,manipulated=0.15
    launchlab parse --corpus out
    launchlab cluster --corpus out
    launchlab features --corpus out
    launchlab annotate --corpus out --window-minutes 20
    launchlab task --corpus out
    launchlab backtest --corpus out --scores scores.csv --k 10
    launchlab report --corpus out
"""

from __future__ import annotations

from pathlib import Path

import click

from . import dataio, pipeline
from .bundles import DEFAULT_CEX_ADDRESSES, CexList
from .dataio import CorpusPaths
from .risk import LabelThresholds
from .sim import PROFILES, simulate_corpus


def _parse_mix(text: str) -> dict[str, float]:
    mix = {}
    for part in text.split(","):
        name, _, value = part.partition("=")
        mix[name.strip()] = float(value)
    return mix


def _parse_thresholds(text: str | None) -> LabelThresholds:
    if not text:
        return LabelThresholds()
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise click.BadParameter("expected high_ratio,high_score,low_ratio,low_score")
    return LabelThresholds(*parts)


@click.group()
def main() -> None:
    """Launchpad token-launch pipeline and simulator."""


@main.command()
@click.option("--corpus", required=True, type=click.Path(path_type=Path))
@click.option("--n", default=100, show_default=True, help="Number of launches.")
@click.option(
    "--mix",
    default="high=0.55,medium=0.20,low=0.10,manipulated=0.15",
    show_default=True,
    help="Profile mix, must sum to 1.",
)
@click.option("--seed", default=0, show_default=True)
def simulate(corpus: Path, n: int, mix: str, seed: int) -> None:
    """Generate a labeled synthetic corpus."""
    launches = simulate_corpus(n, _parse_mix(mix), seed, corpus)
    click.echo(f"wrote {len(launches)} launches to {corpus}")


@main.command()
@click.option("--corpus", required=True, type=click.Path(path_type=Path))
def parse(corpus: Path) -> None:
    """Classify raw transactions into events; write the breakdown report."""
    report = pipeline.parse_stage(CorpusPaths(corpus))
    for kind, count, pct in report.rows():
        click.echo(f"{kind:15s} {count:8d} {pct:6.2f}%")
    if report.reorder_warnings:
        click.echo(f"warning: {report.reorder_warnings} out-of-order timestamps repaired")


@main.command()
@click.option("--corpus", required=True, type=click.Path(path_type=Path))
@click.option("--cex", type=click.Path(path_type=Path), help="Extra CEX funder addresses, one per line.")
def cluster(corpus: Path, cex: Path | None) -> None:
    """Merge same-entity accounts into bundles."""
    addresses = set(DEFAULT_CEX_ADDRESSES)
    if cex is not None:
        addresses.update(line.strip() for line in cex.read_text().splitlines() if line.strip())
    pipeline.cluster_stage(CorpusPaths(corpus), CexList(frozenset(addresses)))
    click.echo("bundles written")


@main.command()
@click.option("--corpus", required=True, type=click.Path(path_type=Path))
@click.option("--sniper-window", default=5, show_default=True, help="Sniper window, seconds.")
@click.option("--bucket-seconds", default=10, show_default=True)
def features(corpus: Path, sniper_window: int, bucket_seconds: int) -> None:
    """Compute the launch feature table and per-launch time series."""
    cfg = pipeline.PipelineConfig(sniper_window_s=sniper_window, bucket_seconds=bucket_seconds)
    rows = pipeline.features_stage(CorpusPaths(corpus), cfg)
    incomplete = sum(1 for r in rows if r.incomplete)
    click.echo(f"wrote {len(rows)} feature rows ({incomplete} incomplete)")


@main.command()
@click.option("--corpus", required=True, type=click.Path(path_type=Path))
@click.option("--window-minutes", default=20, show_default=True)
@click.option("--thresholds", default=None, help="high_ratio,high_score,low_ratio,low_score")
@click.option("--scores", type=click.Path(path_type=Path), help="External pred_score file (overrides heuristic).")
def annotate(corpus: Path, window_minutes: int, thresholds: str | None, scores: Path | None) -> None:
    """Annotate risk levels from post-migration series."""
    external = None
    if scores is not None:
        external = {m: 1.0 - p for m, p in dataio.read_scores(scores).items()}
    cfg = pipeline.PipelineConfig(
        window_minutes=window_minutes,
        thresholds=_parse_thresholds(thresholds),
        external_scores=external,
    )
    report = pipeline.annotate_stage(CorpusPaths(corpus), cfg)
    counts = report.level_counts()
    total = max(len(report.labels), 1)
    for level in ("high", "medium", "low"):
        click.echo(f"{level:7s} {counts[level]:6d} {100.0 * counts[level] / total:6.2f}%")
    if report.skipped:
        click.echo(f"skipped {len(report.skipped)} mints without post series")


@main.command()
@click.option("--corpus", required=True, type=click.Path(path_type=Path))
def task(corpus: Path) -> None:
    """Filter launches into the binary detection dataset."""
    paths = CorpusPaths(corpus)
    rows = dataio.read_features(paths.features)
    labels = dataio.read_labels(paths.labels)
    dataset, counts = pipeline.filter_task(rows, labels)
    pipeline.write_task(paths, dataset, counts)
    click.echo(f"task dataset: {counts['high']} high / {counts['normal']} normal")


@main.command()
@click.option("--corpus", required=True, type=click.Path(path_type=Path))
@click.option("--scores", required=True, type=click.Path(path_type=Path), help="mint,normal_probability CSV.")
@click.option("--k", "ks", multiple=True, type=int, default=(10,), show_default=True)
@click.option("--samples", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
def backtest(corpus: Path, scores: Path, ks: tuple[int, ...], samples: int, seed: int) -> None:
    """Token-selection backtest: buy top-k by normal probability."""
    paths = CorpusPaths(corpus)
    score_map = dataio.read_scores(scores)
    labels = {l.mint: l.level for l in dataio.read_labels(paths.labels)}
    series = {}
    prices = {}
    for mint in score_map:
        post_path = paths.post(mint)
        if post_path.exists():
            post = dataio.read_post_series(post_path)
            series[mint] = post
            prices[mint] = post.price[0]
    results = []
    for k in ks:
        result = pipeline.backtest_selection(score_map, series, prices, labels, k, samples, seed)
        results.append(result)
        click.echo(f"k={k}: precision={result.precision:.4f} loss={result.loss_pct:.2f}%")
    pipeline.write_backtest(paths, results)


@main.command()
@click.option("--corpus", required=True, type=click.Path(path_type=Path))
def report(corpus: Path) -> None:
    """Per-risk-level distribution summaries for the panel features."""
    paths = CorpusPaths(corpus)
    rows = pipeline.report_distributions(
        dataio.read_features(paths.features), dataio.read_labels(paths.labels)
    )
    pipeline.write_distributions(paths, rows)
    click.echo(f"wrote {paths.distributions}")


@main.command(name="pipeline")
@click.option("--corpus", required=True, type=click.Path(path_type=Path))
@click.option("--window-minutes", default=20, show_default=True)
@click.option("--thresholds", default=None)
def pipeline_cmd(corpus: Path, window_minutes: int, thresholds: str | None) -> None:
    """Run parse, cluster, features, and annotate in sequence."""
    cfg = pipeline.PipelineConfig(
        window_minutes=window_minutes, thresholds=_parse_thresholds(thresholds)
    )
    result = pipeline.run_pipeline(corpus, cfg)
    click.echo(
        f"{len(result.features)} feature rows, {len(result.labels)} labels, "
        f"{result.breakdown.total} transactions parsed"
    )


if __name__ == "__main__":
    main()
