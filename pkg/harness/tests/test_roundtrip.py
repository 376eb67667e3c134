"""Boundary contract: score files the harness writes feed the primary
package's backtest and annotation override without schema errors."""

import sys

import numpy as np
from click.testing import CliRunner

from launchlab import dataio
from launchlab.cli import main as launchlab_cli

from detect_harness.data import build_task_dataset
from detect_harness.models import normal_probability_scores
from detect_harness.run import main as harness_main, write_scores_csv


def test_scores_file_parses_and_backtests(small_corpus, tmp_path):
    ds = build_task_dataset(small_corpus, with_series=False)
    scores, _ = normal_probability_scores("lr", ds, seed=0)
    mints = [ds.mints[i] for i in ds.test_idx]
    path = tmp_path / "scores.csv"
    write_scores_csv(path, dict(zip(mints, scores.tolist())))

    parsed = dataio.read_scores(path)
    assert set(parsed) == set(mints)

    runner = CliRunner()
    result = runner.invoke(
        launchlab_cli,
        ["backtest", "--corpus", str(small_corpus), "--scores", str(path),
         "--k", "5", "--seed", "3"],
        catch_exceptions=False,
    )
    assert result.exit_code == 0, result.output
    assert (small_corpus / "backtest.csv").exists()


def test_export_scores_cli_round_trip(small_corpus, tmp_path, monkeypatch):
    out = tmp_path / "mlp_scores.csv"
    monkeypatch.setattr(
        sys, "argv",
        ["detect-harness", "export-scores", "--corpus", str(small_corpus),
         "--model", "lr", "--out", str(out)],
    )
    harness_main()
    scores = dataio.read_scores(out)
    assert scores
    assert all(0.0 <= v <= 1.0 for v in scores.values())


def test_scores_override_annotation(small_corpus, tmp_path):
    # force every scored mint to be flagged manipulated via the override
    ds = build_task_dataset(small_corpus, with_series=False)
    path = tmp_path / "zero_normal.csv"
    write_scores_csv(path, {m: 0.0 for m in ds.mints})
    runner = CliRunner()
    result = runner.invoke(
        launchlab_cli,
        ["annotate", "--corpus", str(small_corpus), "--scores", str(path)],
        catch_exceptions=False,
    )
    assert result.exit_code == 0, result.output
    labels = {l.mint: l for l in dataio.read_labels(small_corpus / "labels.csv")}
    assert all(labels[m].level == "high" for m in ds.mints if m in labels)
    # restore the heuristic-based labels for other tests
    result = runner.invoke(
        launchlab_cli, ["annotate", "--corpus", str(small_corpus)], catch_exceptions=False
    )
    assert result.exit_code == 0
