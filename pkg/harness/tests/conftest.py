"""Shared corpora, generated through the primary package's CLI so the
harness is exercised purely against the documented file formats."""

import pytest
from click.testing import CliRunner

from launchlab.cli import main as launchlab_cli


def make_corpus(root, n, mix, seed):
    runner = CliRunner()
    steps = [
        ["simulate", "--corpus", str(root), "--n", str(n), "--mix", mix, "--seed", str(seed)],
        ["pipeline", "--corpus", str(root)],
        ["task", "--corpus", str(root)],
    ]
    for args in steps:
        result = runner.invoke(launchlab_cli, args, catch_exceptions=False)
        assert result.exit_code == 0, (args, result.output)
    return root


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """80 launches: quick dataset-level and model-level checks."""
    root = tmp_path_factory.mktemp("small_corpus")
    return make_corpus(root, 80, "high=0.45,medium=0.20,low=0.15,manipulated=0.20", 17)


@pytest.fixture(scope="session")
def task_corpus_2000(tmp_path_factory):
    """The full-scale detection benchmark corpus (slow to build)."""
    root = tmp_path_factory.mktemp("task_corpus")
    return make_corpus(root, 2000, "high=0.50,medium=0.22,low=0.13,manipulated=0.15", 404)


@pytest.fixture(scope="session")
def manipulation_corpus(tmp_path_factory):
    """Manipulation-detector corpus with a rich manipulated share."""
    root = tmp_path_factory.mktemp("manip_corpus")
    return make_corpus(root, 180, "high=0.15,medium=0.15,low=0.20,manipulated=0.50", 2024)
