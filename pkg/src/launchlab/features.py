"""Launch feature computation from pre-migration events.

Five groups: launch-time context, holding concentration, market activity,
bundle-level concentration, and a bucketed price/volume time series. All
values are computed strictly from data at or before the migration timestamp;
percentages are fractions of circulating supply, defined as the tokens sold
on the curve (the migration reserve is excluded).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from datetime import datetime, timezone

from .bundles import Bundle, BundleTrace
from .txparse import (
    KIND_BUY,
    KIND_CREATE,
    KIND_CREATE_AND_BUY,
    KIND_SELL,
    KIND_TRANSFER,
    KIND_WASH,
    ParsedEvent,
)

SCHEMA_VERSION = "launchlab.features.v1"

# Column manifest: (name, group, type, unit). Order is the file contract.
FEATURE_SCHEMA: tuple[tuple[str, str, str, str], ...] = (
    ("sol_price", "group1_context", "float", "usd"),
    ("migrate_weekday", "group1_context", "int", "0=monday"),
    ("migrate_hour", "group1_context", "int", "utc_hour"),
    ("migrate_month", "group1_context", "int", "month"),
    ("dev_hold_pct", "group2_holding", "float", "fraction"),
    ("sniper_hold_pct", "group2_holding", "float", "fraction"),
    ("top10_hold_pct", "group2_holding", "float", "fraction"),
    ("top20_hold_pct", "group2_holding", "float", "fraction"),
    ("early_top10_hold_pct", "group2_holding", "float", "fraction"),
    ("early_top20_hold_pct", "group2_holding", "float", "fraction"),
    ("gini_holdings", "group2_holding", "float", "index"),
    ("sniper_num", "group2_holding", "int", "accounts"),
    ("tx_num", "group3_activity", "int", "events"),
    ("time_span", "group3_activity", "int", "seconds"),
    ("trader_num", "group3_activity", "int", "accounts"),
    ("holder_num", "group3_activity", "int", "accounts"),
    ("buy_num", "group3_activity", "int", "events"),
    ("sell_num", "group3_activity", "int", "events"),
    ("wash_num", "group3_activity", "int", "events"),
    ("transfer_num", "group3_activity", "int", "events"),
    ("avg_buy_volume", "group3_activity", "float", "tokens"),
    ("unique_funder_num", "group3_activity", "int", "accounts"),
    ("wash_ratio", "group3_activity", "float", "fraction"),
    ("tx_per_sec", "group3_activity", "float", "rate"),
    ("bundle_hold_pct", "group4_bundle", "float", "fraction"),
    ("bundle_num", "group4_bundle", "int", "bundles"),
    ("bundle_account_num", "group4_bundle", "int", "accounts"),
    ("bundle_top10_hold_pct", "group4_bundle", "float", "fraction"),
    ("bundle_early_top10_hold_pct", "group4_bundle", "float", "fraction"),
    ("bundle_holder_ratio", "group4_bundle", "float", "fraction"),
)

FEATURE_COLUMNS = tuple(name for name, _, _, _ in FEATURE_SCHEMA)
REQUIRED_COLUMNS = FEATURE_COLUMNS


@dataclass(frozen=True)
class Bucket:
    open_price: float
    end_price: float
    avg_price: float
    buy_volume: int
    sell_volume: int


@dataclass(frozen=True)
class TimeSeries:
    """Contiguous fixed-width buckets over the pre-migration window."""

    bucket_seconds: int
    start_ts: int
    buckets: tuple[Bucket, ...]


@dataclass
class FeatureRow:
    mint: str
    values: dict[str, float | int | None]
    schema_version: str = SCHEMA_VERSION

    @property
    def incomplete(self) -> bool:
        return any(self.values.get(c) is None for c in REQUIRED_COLUMNS)


def gini(amounts: list[int] | list[float]) -> float:
    """Gini index of a non-negative holdings vector (0 for equal holdings)."""
    n = len(amounts)
    if n == 0:
        return 0.0
    values = sorted(max(a, 0) for a in amounts)
    total = sum(values)
    if total <= 0:
        return 0.0
    cum = 0.0
    weighted = 0.0
    for v in values:
        cum += v
        weighted += cum
    return (n + 1 - 2 * weighted / total) / n


def replay_holdings(events: list[ParsedEvent]) -> dict[str, int]:
    """Final user token balances from replaying events in order.

    Wash trades are net-zero by definition; transfers move the amount from
    the emitting actor to the matching receiver recorded in the same
    transaction (receivers are replayed via paired transfer events).
    """
    balances: dict[str, int] = defaultdict(int)
    for e in events:
        if e.kind in (KIND_BUY, KIND_CREATE_AND_BUY):
            balances[e.actor] += e.token_amount
        elif e.kind == KIND_SELL:
            balances[e.actor] -= e.token_amount
        elif e.kind == KIND_TRANSFER:
            balances[e.actor] -= e.token_amount
            if e.counterparty:
                balances[e.counterparty] += e.token_amount
    return dict(balances)


def contextual_features(
    migrate_ts: int, sol_price_feed: list[tuple[int, float]]
) -> dict[str, float | int | None]:
    """Calendar fields in UTC plus the feed price at or before migration."""
    moment = datetime.fromtimestamp(migrate_ts, tz=timezone.utc)
    price: float | None = None
    for ts, value in sorted(sol_price_feed):
        if ts <= migrate_ts:
            price = value
        else:
            break
    return {
        "sol_price": price,
        "migrate_weekday": moment.weekday(),
        "migrate_hour": moment.hour,
        "migrate_month": moment.month,
    }


def _circulating(balances: dict[str, int]) -> int:
    return sum(v for v in balances.values() if v > 0)


def _first_buyers(events: list[ParsedEvent]) -> list[str]:
    seen: list[str] = []
    for e in events:
        if e.kind == KIND_BUY and e.actor not in seen:
            seen.append(e.actor)
    return seen


def holding_features(
    events: list[ParsedEvent], dev: str, sniper_window_s: int = 5
) -> dict[str, float | int | None]:
    """Concentration of final balances and early-trader accumulation."""
    balances = replay_holdings(events)
    circulating = _circulating(balances)
    if circulating == 0:
        return {name: 0.0 for name, grp, _, _ in FEATURE_SCHEMA if grp == "group2_holding"}

    create_ts = events[0].timestamp
    snipers = set()
    for e in events:
        if e.kind == KIND_BUY and e.actor != dev and e.timestamp <= create_ts + sniper_window_s:
            snipers.add(e.actor)

    positive = sorted((v for v in balances.values() if v > 0), reverse=True)
    first = _first_buyers(events)
    held = lambda accounts: sum(max(balances.get(a, 0), 0) for a in accounts)
    return {
        "dev_hold_pct": max(balances.get(dev, 0), 0) / circulating,
        "sniper_hold_pct": held(snipers) / circulating,
        "top10_hold_pct": sum(positive[:10]) / circulating,
        "top20_hold_pct": sum(positive[:20]) / circulating,
        "early_top10_hold_pct": held(first[:10]) / circulating,
        "early_top20_hold_pct": held(first[:20]) / circulating,
        "gini_holdings": gini(positive),
        "sniper_num": len(snipers),
    }


def activity_features(
    events: list[ParsedEvent], funder_traces: list[BundleTrace] | None = None
) -> dict[str, float | int | None]:
    """Trading-activity statistics of the launch sale."""
    if not events:
        raise ValueError("a migrated launch has at least the create event")
    counts = defaultdict(int)
    for e in events:
        counts[e.kind] += 1
    balances = replay_holdings(events)
    traders = {e.actor for e in events if e.kind in (KIND_BUY, KIND_SELL)}
    buy_tokens = [e.token_amount for e in events if e.kind == KIND_BUY]
    time_span = events[-1].timestamp - events[0].timestamp
    tx_num = (
        counts[KIND_BUY]
        + counts[KIND_SELL]
        + counts[KIND_WASH]
        + counts[KIND_TRANSFER]
        + counts[KIND_CREATE]
        + counts[KIND_CREATE_AND_BUY]
    )
    funders = set()
    if funder_traces:
        actors = {e.actor for e in events}
        funders = {
            t.identifier
            for t in funder_traces
            if t.identifier_kind == "funder" and t.account in actors
        }
    return {
        "tx_num": tx_num,
        "time_span": time_span,
        "trader_num": len(traders),
        "holder_num": sum(1 for v in balances.values() if v > 0),
        "buy_num": counts[KIND_BUY],
        "sell_num": counts[KIND_SELL],
        "wash_num": counts[KIND_WASH],
        "transfer_num": counts[KIND_TRANSFER],
        "avg_buy_volume": sum(buy_tokens) / len(buy_tokens) if buy_tokens else 0.0,
        "unique_funder_num": len(funders),
        "wash_ratio": counts[KIND_WASH] / tx_num if tx_num else 0.0,
        "tx_per_sec": tx_num / time_span if time_span > 0 else float(tx_num),
    }


def bundle_features(
    events: list[ParsedEvent], bundles: list[Bundle]
) -> dict[str, float | int | None]:
    """Group-2 style concentration with each bundle merged into one holder."""
    balances = replay_holdings(events)
    circulating = _circulating(balances)
    if circulating == 0:
        return {name: 0 for name, grp, _, _ in FEATURE_SCHEMA if grp == "group4_bundle"}

    owner: dict[str, str] = {}
    for b in bundles:
        for acct in b.accounts:
            owner[acct] = f"bundle:{b.bundle_id}"

    entity_balance: dict[str, int] = defaultdict(int)
    for acct, bal in balances.items():
        entity_balance[owner.get(acct, acct)] += bal

    positive = sorted((v for v in entity_balance.values() if v > 0), reverse=True)
    first_entities: list[str] = []
    for e in events:
        if e.kind == KIND_BUY:
            ent = owner.get(e.actor, e.actor)
            if ent not in first_entities:
                first_entities.append(ent)
    early10 = sum(max(entity_balance.get(ent, 0), 0) for ent in first_entities[:10])

    traders = {e.actor for e in events if e.kind in (KIND_BUY, KIND_SELL)}
    holders = {a for a, v in balances.items() if v > 0}
    touching = [b for b in bundles if b.accounts & traders]
    bundled_accounts = set()
    for b in touching:
        bundled_accounts |= b.accounts & traders
    bundled_balance = sum(max(balances.get(a, 0), 0) for a in bundled_accounts)
    bundled_holders = bundled_accounts & holders
    return {
        "bundle_hold_pct": bundled_balance / circulating,
        "bundle_num": len(touching),
        "bundle_account_num": len(bundled_accounts),
        "bundle_top10_hold_pct": sum(positive[:10]) / circulating,
        "bundle_early_top10_hold_pct": early10 / circulating,
        "bundle_holder_ratio": len(bundled_holders) / len(holders) if holders else 0.0,
    }


def build_timeseries(events: list[ParsedEvent], bucket_seconds: int = 10) -> TimeSeries:
    """Bucketed open/end/volume-weighted-average price with buy/sell volumes.

    Buckets are contiguous from the first event to the last; empty buckets
    carry the previous end price forward with zero volumes.
    """
    if bucket_seconds <= 0:
        raise ValueError("bucket_seconds must be positive")
    if not events:
        return TimeSeries(bucket_seconds, 0, ())

    start = events[0].timestamp
    end = events[-1].timestamp
    n_buckets = (end - start) // bucket_seconds + 1
    trades: list[list[ParsedEvent]] = [[] for _ in range(n_buckets)]
    for e in events:
        if e.kind in (KIND_BUY, KIND_SELL, KIND_CREATE_AND_BUY) and e.token_amount > 0:
            if e.base_amount > 0:
                trades[(e.timestamp - start) // bucket_seconds].append(e)

    first_price = 0.0
    for bucket in trades:
        if bucket:
            first_price = bucket[0].base_amount / bucket[0].token_amount
            break

    buckets = []
    carry = first_price
    for bucket in trades:
        if not bucket:
            buckets.append(Bucket(carry, carry, carry, 0, 0))
            continue
        prices = [e.base_amount / e.token_amount for e in bucket]
        tokens = sum(e.token_amount for e in bucket)
        base = sum(e.base_amount for e in bucket)
        buy_vol = sum(e.token_amount for e in bucket if e.kind != KIND_SELL)
        sell_vol = sum(e.token_amount for e in bucket if e.kind == KIND_SELL)
        carry = prices[-1]
        buckets.append(Bucket(prices[0], prices[-1], base / tokens, buy_vol, sell_vol))
    return TimeSeries(bucket_seconds, start, tuple(buckets))


def assemble(
    mint: str,
    group1: dict,
    group2: dict,
    group3: dict,
    group4: dict,
    ts: TimeSeries,
) -> tuple[FeatureRow, TimeSeries]:
    """Merge the groups into one schema-ordered row; nulls flag the row."""
    merged: dict[str, float | int | None] = {}
    for group in (group1, group2, group3, group4):
        merged.update(group)
    missing = [c for c in FEATURE_COLUMNS if c not in merged]
    if missing:
        raise ValueError(f"feature groups missed columns: {missing}")
    row = FeatureRow(mint, {c: merged[c] for c in FEATURE_COLUMNS})
    return row, ts


def compute_launch_features(
    mint: str,
    events: list[ParsedEvent],
    dev: str,
    migrate_ts: int,
    bundles: list[Bundle],
    traces: list[BundleTrace] | None = None,
    sol_price_feed: list[tuple[int, float]] | None = None,
    sniper_window_s: int = 5,
    bucket_seconds: int = 10,
) -> tuple[FeatureRow, TimeSeries]:
    """One feature row plus time series for one launch.

    Events strictly after ``migrate_ts`` are discarded first, so feature
    values cannot depend on post-migration data.
    """
    pre = [e for e in events if e.timestamp <= migrate_ts]
    g1 = contextual_features(migrate_ts, sol_price_feed or [])
    g2 = holding_features(pre, dev, sniper_window_s)
    g3 = activity_features(pre, traces)
    g4 = bundle_features(pre, bundles)
    ts = build_timeseries(pre, bucket_seconds)
    return assemble(mint, g1, g2, g3, g4, ts)
