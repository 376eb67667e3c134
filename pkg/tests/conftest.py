import pytest

from launchlab.pipeline import run_pipeline
from launchlab.sim import simulate_corpus

ACCEPTANCE_MIX = {"high": 0.55, "medium": 0.20, "low": 0.15, "manipulated": 0.10}
TRUTH_SHARE = {"high": 0.65, "medium": 0.20, "low": 0.15}


@pytest.fixture(scope="session")
def corpus_200(tmp_path_factory):
    """200 simulated launches plus a full pipeline run, shared read-only."""
    root = tmp_path_factory.mktemp("acceptance_corpus")
    launches = simulate_corpus(200, ACCEPTANCE_MIX, seed=20_240_101, out_dir=root)
    result = run_pipeline(root)
    return root, launches, result
