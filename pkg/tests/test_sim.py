import dataclasses

import pytest

from launchlab.market import check_migration
from launchlab.sim import (
    TX_FEE,
    AgentConfig,
    CurveConfig,
    NonMigrating,
    PROFILES,
    ScenarioConfig,
    corpus_launches,
    preset,
    profile_mix_counts,
    scenario_for_profile,
    simulate_launch,
)

MIX = {"high": 0.8, "medium": 0.15, "low": 0.05}


def test_same_seed_byte_identical():
    a = simulate_launch(scenario_for_profile("manipulated", 31))
    b = simulate_launch(scenario_for_profile("manipulated", 31))
    assert a.txs == b.txs
    assert a.post == b.post
    assert a.truth.kinds == b.truth.kinds
    assert a.record == b.record


def test_different_seeds_differ():
    a = simulate_launch(scenario_for_profile("low", 1))
    b = simulate_launch(scenario_for_profile("low", 2))
    assert a.txs != b.txs


def test_token_conservation():
    for seed in range(5):
        launch = simulate_launch(scenario_for_profile("high", seed))
        total = sum(d.token_delta for tx in launch.txs for d in tx.deltas)
        assert total == launch.truth.mint_amount


def test_base_conservation_with_fees():
    for seed in range(5):
        launch = simulate_launch(scenario_for_profile("medium", seed))
        total_sol = sum(d.sol_delta for tx in launch.txs for d in tx.deltas)
        assert total_sol + launch.truth.fees_total == 0
        assert launch.truth.fees_total == TX_FEE * len(launch.txs)


def test_migration_pool_funding():
    launch = simulate_launch(scenario_for_profile("low", 8))
    vault = next(iter(launch.txs[1].pool_accounts))
    vault_tokens = sum(
        d.token_delta for tx in launch.txs for d in tx.deltas if d.account == vault
    )
    vault_sol = sum(d.sol_delta for tx in launch.txs for d in tx.deltas if d.account == vault)
    assert launch.pool.token_reserve == vault_tokens
    assert launch.pool.base_reserve == vault_sol
    # the curve sold at least the migration threshold
    sold = launch.truth.mint_amount - launch.pool.token_reserve
    assert sold >= 0.8 * launch.truth.mint_amount


def test_non_migrating_config_rejected():
    tiny = AgentConfig(
        dev_budget=1_000,
        sniper_count=0,
        insider_groups=0,
        organic_max=3,
        organic_budget=(1_000, 2_000),
    )
    config = ScenarioConfig(seed=1, risk_profile="low", agents=tiny)
    with pytest.raises(NonMigrating):
        simulate_launch(config)


def test_post_series_shape():
    launch = simulate_launch(scenario_for_profile("manipulated", 4))
    assert len(launch.post.price) == 3600
    assert all(p > 0 for p in launch.post.price)
    assert launch.post.price[0] == pytest.approx(launch.migration_price)
    assert launch.truth.manipulator_actions  # the bot acted


def test_partition_groups_have_min_two_accounts():
    for profile in PROFILES:
        launch = simulate_launch(scenario_for_profile(profile, 13))
        for group in launch.truth.partition:
            assert len(group) >= 2


def test_traces_cover_partition():
    launch = simulate_launch(scenario_for_profile("high", 21))
    traced = {t.account for t in launch.traces if t.identifier_kind in ("funder", "jito")}
    for group in launch.truth.partition:
        assert group <= traced


class TestMixCounts:
    def test_exact_allocation(self):
        assert profile_mix_counts(100, MIX) == {"high": 80, "medium": 15, "low": 5}

    def test_rounding_by_largest_remainder(self):
        counts = profile_mix_counts(7, {"high": 0.5, "low": 0.5})
        assert sum(counts.values()) == 7

    def test_must_sum_to_one(self):
        with pytest.raises(ValueError):
            profile_mix_counts(10, {"high": 0.5})

    def test_unknown_profile_rejected(self):
        with pytest.raises(ValueError):
            profile_mix_counts(10, {"weird": 1.0})

    def test_single_launch(self):
        launches = corpus_launches(1, {"high": 1.0}, 3)
        assert len(launches) == 1
        assert launches[0].truth.profile == "high"


class TestProfileContrasts:
    """Configured orderings that the feature pipeline must recover."""

    def test_high_risk_faster_and_more_concentrated(self):
        highs = [simulate_launch(scenario_for_profile("high", s)) for s in range(6)]
        lows = [simulate_launch(scenario_for_profile("low", s)) for s in range(6)]

        def span(launch):
            return launch.record.migrate_ts - launch.record.create_ts

        def early10(launch):
            from launchlab.features import holding_features
            from launchlab.txparse import parse_corpus

            events, _ = parse_corpus(launch.txs)
            return holding_features(events, launch.record.creator)["early_top10_hold_pct"]

        assert sorted(span(h) for h in highs)[len(highs) // 2] < sorted(
            span(l) for l in lows
        )[len(lows) // 2]
        gap = sorted(early10(h) for h in highs)[3] - sorted(early10(l) for l in lows)[3]
        assert gap > 0.17  # configured early-buyer accumulation margin

    def test_unwinders_hold_enough_to_dump(self):
        launch = simulate_launch(scenario_for_profile("high", 2))
        events_holdings = {}
        for tx in launch.txs:
            for d in tx.deltas:
                if d.account not in tx.pool_accounts:
                    events_holdings[d.account] = (
                        events_holdings.get(d.account, 0) + d.token_delta
                    )
        unwind_total = sum(events_holdings.get(a, 0) for a in launch.truth.unwinders)
        assert unwind_total > 0.25 * launch.truth.mint_amount


def test_curve_config_total_supply():
    cfg = CurveConfig(tiers=20, tier_allocation=50_000_000)
    assert cfg.total_supply == 10**9
    curve = cfg.build()
    assert not check_migration(curve)


def test_preset_covers_all_profiles():
    for profile in PROFILES:
        agents, post, split = preset(profile)
        assert split >= 2
        assert agents.dev_prebuy_prob == pytest.approx(0.987)
