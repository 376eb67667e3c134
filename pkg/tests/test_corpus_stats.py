"""Configured-rate recovery on the shared simulated corpus, and the
profile-level guarantees that the annotation bands rely on."""

import dataclasses

from launchlab.bundles import cluster, extract_in_tx_traces
from launchlab.risk import min_price_ratio
from launchlab.sim import scenario_for_profile, simulate_launch
from launchlab.txparse import parse_corpus


def test_prebuy_rate_recovered(corpus_200):
    """create_and_buy share of mint-class transactions tracks the
    configured developer pre-buy probability (0.987)."""
    _, _, result = corpus_200
    counts = result.breakdown.counts
    mint_class = counts["create"] + counts["create_and_buy"]
    share = counts["create_and_buy"] / mint_class
    assert abs(share - 0.987) < 0.03


def test_wash_rate_recovered(corpus_200):
    _, _, result = corpus_200
    share = result.breakdown.counts["wash"] / result.breakdown.total
    assert abs(share - 0.214) < 0.03


def test_low_profile_ratio_compliance():
    """min_price_ratio >= 0.7 on at least 95 of 100 low-risk seeds."""
    compliant = 0
    for seed in range(100):
        launch = simulate_launch(scenario_for_profile("low", 40_000 + seed))
        if min_price_ratio(launch.post, launch.migration_price) >= 0.7:
            compliant += 1
    assert compliant >= 95


def test_suppressed_traces_give_refinement():
    """With funder and relay traces suppressed, in-transaction traces alone
    recover a refinement of the true partition; with all traces, the exact
    partition."""
    base = scenario_for_profile("high", 55)
    suppressed_cfg = dataclasses.replace(base, emit_funder=False, emit_jito=False)
    full = simulate_launch(base)
    partial = simulate_launch(suppressed_cfg)
    # identical stream: suppression only hides traces
    assert [t.tx_id for t in full.txs] == [t.tx_id for t in partial.txs]

    truth = [frozenset(g) for g in full.truth.partition]

    events, _ = parse_corpus(full.txs)
    bundles = cluster(list(full.traces) + extract_in_tx_traces(events))
    assert sorted(map(sorted, (b.accounts for b in bundles))) == sorted(map(sorted, truth))

    events_p, _ = parse_corpus(partial.txs)
    partial_bundles = cluster(list(partial.traces) + extract_in_tx_traces(events_p))
    assert partial_bundles  # co-purchases alone still reveal sub-bundles
    for b in partial_bundles:
        assert any(b.accounts <= group for group in truth)
