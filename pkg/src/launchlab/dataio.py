"""File formats, loaders, and writers for the corpus layout.

Every CSV artifact carries a ``# schema=...`` comment line followed by a
header row; loaders verify both and report the first offending line number
on any mismatch. Transactions are newline-delimited JSON records (one per
line) because balance deltas nest. All writes go through a temp file and an
atomic rename.

Corpus layout::

    corpus/
      launches.csv        mint,name,symbol,uri,creator,create_ts,migrate_ts,amm_address
      manifest.csv        mint,profile,true_level        (simulated corpora)
      sol_feed.csv        ts,price_usd
      txs/<mint>.jsonl    raw transactions
      traces/<mint>.csv   account,identifier_kind,identifier
      post/<mint>.csv     second,price,buy_volume,sell_volume,tx_count,net_flow
      events/<mint>.csv   parsed events            (pipeline output)
      bundles/<mint>.csv  bundle_id,account        (pipeline output)
      timeseries/<mint>.csv                        (pipeline output)
      features.csv, feature_schema.csv, labels.csv, label_histogram.csv,
      breakdown.csv, task.csv, task_counts.csv, ...  (pipeline outputs)
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from .bundles import Bundle, BundleTrace
from .features import FEATURE_COLUMNS, FEATURE_SCHEMA, FeatureRow, TimeSeries, Bucket
from .risk import HISTOGRAM_BINS, POST_WINDOW_SECONDS, AnnotationReport, PostSeries, RiskLabel
from .txparse import BalanceDelta, BreakdownReport, ParsedEvent, RawTransaction, SwapLeg


class SchemaError(Exception):
    """A file does not match its documented format; carries the line number."""

    def __init__(self, path: Path | str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


@dataclass(frozen=True)
class TokenLaunchRecord:
    mint: str
    name: str
    symbol: str
    uri: str
    creator: str
    create_ts: int
    migrate_ts: int
    amm_address: str

    def __post_init__(self) -> None:
        if self.create_ts >= self.migrate_ts:
            raise ValueError("create_ts must precede migrate_ts")


@dataclass(frozen=True)
class SelectionResult:
    k: int
    selected: tuple[str, ...]
    precision: float
    loss_pct: float


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_csv(path: Path, schema: str, header: list[str], rows: Iterable[list]) -> None:
    buf = io.StringIO()
    buf.write(f"# schema={schema}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())


def _read_csv(path: Path, schema: str, header: list[str]) -> Iterator[tuple[int, list[str]]]:
    """Yield (line_no, fields); validates the schema line and header."""
    with open(path, newline="") as fh:
        first = fh.readline().rstrip("\n")
        if first != f"# schema={schema}":
            raise SchemaError(path, 1, f"expected '# schema={schema}', got {first!r}")
        reader = csv.reader(fh)
        try:
            head = next(reader)
        except StopIteration:
            raise SchemaError(path, 2, "missing header row") from None
        if head != header:
            raise SchemaError(path, 2, f"header mismatch: {head} != {header}")
        for line_no, fields in enumerate(reader, start=3):
            if not fields:
                continue
            if len(fields) != len(header):
                raise SchemaError(path, line_no, f"expected {len(header)} fields, got {len(fields)}")
            yield line_no, fields


def _int(path: Path, line_no: int, value: str, field: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise SchemaError(path, line_no, f"field {field}: {value!r} is not an integer") from None


def _float(path: Path, line_no: int, value: str, field: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise SchemaError(path, line_no, f"field {field}: {value!r} is not a number") from None


# -- launches ---------------------------------------------------------------

LAUNCH_HEADER = ["mint", "name", "symbol", "uri", "creator", "create_ts", "migrate_ts", "amm_address"]


def write_launches(path: Path, records: list[TokenLaunchRecord]) -> None:
    _write_csv(
        path,
        "launchlab.launches.v1",
        LAUNCH_HEADER,
        (
            [r.mint, r.name, r.symbol, r.uri, r.creator, r.create_ts, r.migrate_ts, r.amm_address]
            for r in records
        ),
    )


def read_launches(path: Path) -> list[TokenLaunchRecord]:
    records = []
    for line_no, f in _read_csv(path, "launchlab.launches.v1", LAUNCH_HEADER):
        records.append(
            TokenLaunchRecord(
                mint=f[0], name=f[1], symbol=f[2], uri=f[3], creator=f[4],
                create_ts=_int(path, line_no, f[5], "create_ts"),
                migrate_ts=_int(path, line_no, f[6], "migrate_ts"),
                amm_address=f[7],
            )
        )
    return records


# -- transactions (JSONL) ---------------------------------------------------


def tx_to_json(tx: RawTransaction) -> dict:
    record = {
        "tx_id": tx.tx_id,
        "slot_time": tx.slot_time,
        "signer": tx.signer,
        "involves_mint_instruction": tx.involves_mint_instruction,
        "pool_accounts": sorted(tx.pool_accounts),
        "deltas": [
            {"account": d.account, "sol_delta": d.sol_delta, "token_delta": d.token_delta}
            for d in tx.deltas
        ],
    }
    if tx.legs:
        record["legs"] = [
            {"account": l.account, "token_delta": l.token_delta, "sol_delta": l.sol_delta}
            for l in tx.legs
        ]
    return record


def write_transactions(path: Path, txs: list[RawTransaction]) -> None:
    lines = [json.dumps(tx_to_json(tx), separators=(",", ":")) for tx in txs]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_transactions(path: Path) -> list[RawTransaction]:
    txs = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(path, line_no, f"invalid JSON: {exc}") from None
            try:
                txs.append(
                    RawTransaction(
                        tx_id=obj["tx_id"],
                        slot_time=int(obj["slot_time"]),
                        signer=obj["signer"],
                        deltas=tuple(
                            BalanceDelta(d["account"], int(d["sol_delta"]), int(d["token_delta"]))
                            for d in obj["deltas"]
                        ),
                        involves_mint_instruction=bool(obj.get("involves_mint_instruction", False)),
                        pool_accounts=frozenset(obj.get("pool_accounts", ())),
                        legs=tuple(
                            SwapLeg(l["account"], int(l["token_delta"]), int(l["sol_delta"]))
                            for l in obj.get("legs", ())
                        ),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(path, line_no, f"bad transaction record: {exc}") from None
    return txs


# -- bundle traces and bundles ----------------------------------------------

TRACE_HEADER = ["account", "identifier_kind", "identifier"]


def write_traces(path: Path, traces: list[BundleTrace]) -> None:
    _write_csv(
        path,
        "launchlab.traces.v1",
        TRACE_HEADER,
        ([t.account, t.identifier_kind, t.identifier] for t in traces),
    )


def read_traces(path: Path) -> list[BundleTrace]:
    traces = []
    for line_no, f in _read_csv(path, "launchlab.traces.v1", TRACE_HEADER):
        try:
            traces.append(BundleTrace(f[0], f[1], f[2]))
        except ValueError as exc:
            raise SchemaError(path, line_no, str(exc)) from None
    return traces


def write_bundles(path: Path, bundles: list[Bundle]) -> None:
    rows = []
    for b in bundles:
        for account in sorted(b.accounts):
            rows.append([b.bundle_id, account])
    _write_csv(path, "launchlab.bundles.v1", ["bundle_id", "account"], rows)


def read_bundles(path: Path) -> list[Bundle]:
    members: dict[int, set[str]] = {}
    for line_no, f in _read_csv(path, "launchlab.bundles.v1", ["bundle_id", "account"]):
        members.setdefault(_int(path, line_no, f[0], "bundle_id"), set()).add(f[1])
    return [
        Bundle(bundle_id, frozenset(accounts), frozenset())
        for bundle_id, accounts in sorted(members.items())
    ]


# -- parsed events and breakdown --------------------------------------------

EVENT_HEADER = ["tx_id", "kind", "actor", "token_amount", "base_amount", "timestamp", "counterparty", "note"]


def write_events(path: Path, events: list[ParsedEvent]) -> None:
    _write_csv(
        path,
        "launchlab.events.v1",
        EVENT_HEADER,
        (
            [e.tx_id, e.kind, e.actor, e.token_amount, e.base_amount, e.timestamp, e.counterparty, e.note]
            for e in events
        ),
    )


def read_events(path: Path) -> list[ParsedEvent]:
    events = []
    for line_no, f in _read_csv(path, "launchlab.events.v1", EVENT_HEADER):
        events.append(
            ParsedEvent(
                tx_id=f[0], kind=f[1], actor=f[2],
                token_amount=_int(path, line_no, f[3], "token_amount"),
                base_amount=_int(path, line_no, f[4], "base_amount"),
                timestamp=_int(path, line_no, f[5], "timestamp"),
                counterparty=f[6], note=f[7],
            )
        )
    return events


def write_breakdown(path: Path, report: BreakdownReport) -> None:
    rows = [[kind, count, f"{pct:.2f}"] for kind, count, pct in report.rows()]
    _write_csv(path, "launchlab.breakdown.v1", ["kind", "count", "percentage"], rows)


# -- features and time series -----------------------------------------------

FEATURES_HEADER = ["mint", *FEATURE_COLUMNS, "schema_version", "incomplete"]


def write_feature_schema(path: Path) -> None:
    _write_csv(
        path,
        "launchlab.feature_schema.v1",
        ["name", "group", "type", "unit"],
        ([name, group, typ, unit] for name, group, typ, unit in FEATURE_SCHEMA),
    )


def write_features(path: Path, rows: list[FeatureRow]) -> None:
    def fmt(value):
        if value is None:
            return ""
        if isinstance(value, float):
            return repr(value)
        return value

    _write_csv(
        path,
        "launchlab.features.v1",
        FEATURES_HEADER,
        (
            [row.mint, *(fmt(row.values[c]) for c in FEATURE_COLUMNS), row.schema_version,
             int(row.incomplete)]
            for row in rows
        ),
    )


def read_features(path: Path) -> list[FeatureRow]:
    rows = []
    for line_no, f in _read_csv(path, "launchlab.features.v1", FEATURES_HEADER):
        values: dict[str, float | int | None] = {}
        for name, raw in zip(FEATURE_COLUMNS, f[1 : 1 + len(FEATURE_COLUMNS)]):
            values[name] = None if raw == "" else _float(path, line_no, raw, name)
        rows.append(FeatureRow(mint=f[0], values=values, schema_version=f[-2]))
    return rows


TIMESERIES_HEADER = ["bucket", "open_price", "end_price", "avg_price", "buy_volume", "sell_volume"]


def write_timeseries(path: Path, ts: TimeSeries) -> None:
    buf = io.StringIO()
    buf.write("# schema=launchlab.timeseries.v1\n")
    buf.write(f"# bucket_seconds={ts.bucket_seconds} start_ts={ts.start_ts}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TIMESERIES_HEADER)
    for i, b in enumerate(ts.buckets):
        writer.writerow([i, repr(b.open_price), repr(b.end_price), repr(b.avg_price), b.buy_volume, b.sell_volume])
    atomic_write_text(path, buf.getvalue())


def read_timeseries(path: Path) -> TimeSeries:
    with open(path) as fh:
        first = fh.readline().rstrip("\n")
        if first != "# schema=launchlab.timeseries.v1":
            raise SchemaError(path, 1, f"unexpected schema line {first!r}")
        meta = fh.readline().rstrip("\n")
        if not meta.startswith("# bucket_seconds="):
            raise SchemaError(path, 2, "missing bucket metadata line")
        parts = meta[2:].split()
        bucket_seconds = int(parts[0].split("=")[1])
        start_ts = int(parts[1].split("=")[1])
        reader = csv.reader(fh)
        head = next(reader, None)
        if head != TIMESERIES_HEADER:
            raise SchemaError(path, 3, f"header mismatch: {head}")
        buckets = []
        for line_no, f in enumerate(reader, start=4):
            if not f:
                continue
            buckets.append(
                Bucket(
                    open_price=_float(path, line_no, f[1], "open_price"),
                    end_price=_float(path, line_no, f[2], "end_price"),
                    avg_price=_float(path, line_no, f[3], "avg_price"),
                    buy_volume=_int(path, line_no, f[4], "buy_volume"),
                    sell_volume=_int(path, line_no, f[5], "sell_volume"),
                )
            )
    return TimeSeries(bucket_seconds, start_ts, tuple(buckets))


# -- post-migration series ---------------------------------------------------

POST_HEADER = ["second", "price", "buy_volume", "sell_volume", "tx_count", "net_flow"]


def write_post_series(path: Path, series: PostSeries) -> None:
    _write_csv(
        path,
        "launchlab.post.v1",
        POST_HEADER,
        (
            [s, repr(series.price[s]), repr(series.buy_volume[s]), repr(series.sell_volume[s]),
             series.tx_count[s], repr(series.net_flow[s])]
            for s in range(len(series.price))
        ),
    )


def read_post_series(path: Path) -> PostSeries:
    price, buy_vol, sell_vol, tx_count, net_flow = [], [], [], [], []
    for line_no, f in _read_csv(path, "launchlab.post.v1", POST_HEADER):
        price.append(_float(path, line_no, f[1], "price"))
        buy_vol.append(_float(path, line_no, f[2], "buy_volume"))
        sell_vol.append(_float(path, line_no, f[3], "sell_volume"))
        tx_count.append(int(_float(path, line_no, f[4], "tx_count")))
        net_flow.append(_float(path, line_no, f[5], "net_flow"))
    if len(price) != POST_WINDOW_SECONDS:
        raise SchemaError(path, 3, f"post series must have {POST_WINDOW_SECONDS} rows, got {len(price)}")
    return PostSeries(tuple(price), tuple(buy_vol), tuple(sell_vol), tuple(tx_count), tuple(net_flow))


# -- labels, histogram, manifest, scores -------------------------------------

LABEL_HEADER = ["mint", "min_price_ratio", "pred_score", "risk_level"]


def write_labels(path: Path, labels: list[RiskLabel]) -> None:
    _write_csv(
        path,
        "launchlab.labels.v1",
        LABEL_HEADER,
        ([l.mint, repr(l.min_price_ratio), repr(l.pred_score), l.level] for l in labels),
    )


def read_labels(path: Path) -> list[RiskLabel]:
    labels = []
    for line_no, f in _read_csv(path, "launchlab.labels.v1", LABEL_HEADER):
        level = f[3]
        if level not in ("high", "medium", "low"):
            raise SchemaError(path, line_no, f"unknown risk level {level!r}")
        labels.append(
            RiskLabel(
                mint=f[0],
                min_price_ratio=_float(path, line_no, f[1], "min_price_ratio"),
                pred_score=_float(path, line_no, f[2], "pred_score"),
                level=level,
            )
        )
    return labels


def write_label_histogram(path: Path, report: AnnotationReport) -> None:
    rows = []
    for (lo, hi), count in zip(HISTOGRAM_BINS, report.histogram):
        rows.append([repr(lo), repr(hi), count])
    _write_csv(path, "launchlab.label_histogram.v1", ["bin_low", "bin_high", "count"], rows)


MANIFEST_HEADER = ["mint", "profile", "true_level"]


def write_manifest(path: Path, rows: list[tuple[str, str, str]]) -> None:
    _write_csv(path, "launchlab.manifest.v1", MANIFEST_HEADER, (list(r) for r in rows))


def read_manifest(path: Path) -> list[tuple[str, str, str]]:
    return [(f[0], f[1], f[2]) for _, f in _read_csv(path, "launchlab.manifest.v1", MANIFEST_HEADER)]


SCORES_HEADER = ["mint", "normal_probability"]


def write_scores(path: Path, scores: dict[str, float]) -> None:
    _write_csv(
        path,
        "launchlab.scores.v1",
        SCORES_HEADER,
        ([mint, repr(score)] for mint, score in sorted(scores.items())),
    )


def read_scores(path: Path) -> dict[str, float]:
    scores = {}
    for line_no, f in _read_csv(path, "launchlab.scores.v1", SCORES_HEADER):
        scores[f[0]] = _float(path, line_no, f[1], "normal_probability")
    return scores


# -- SOL price feed -----------------------------------------------------------

FEED_HEADER = ["ts", "price_usd"]


def write_sol_feed(path: Path, feed: list[tuple[int, float]]) -> None:
    _write_csv(path, "launchlab.sol_feed.v1", FEED_HEADER, ([ts, repr(p)] for ts, p in feed))


def read_sol_feed(path: Path) -> list[tuple[int, float]]:
    feed = []
    for line_no, f in _read_csv(path, "launchlab.sol_feed.v1", FEED_HEADER):
        feed.append((_int(path, line_no, f[0], "ts"), _float(path, line_no, f[1], "price_usd")))
    return feed


# -- curve config (flat key=value) -------------------------------------------

CURVE_KEYS = ("p0", "ratio", "tiers", "tier_allocation", "total_supply", "migrate_fraction")


def write_curve_config(path: Path, cfg) -> None:
    """Serialize a CurveConfig as a flat key=value file."""
    lines = [
        f"p0 = {cfg.p0}",
        f"ratio = {cfg.ratio}",
        f"tiers = {cfg.tiers}",
        f"tier_allocation = {cfg.tier_allocation}",
        f"total_supply = {cfg.total_supply}",
        f"migrate_fraction = {cfg.migrate_fraction}",
    ]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_curve_config(path: Path):
    from .sim import CurveConfig

    values: dict[str, str] = {}
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SchemaError(path, line_no, "expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in CURVE_KEYS:
                raise SchemaError(path, line_no, f"unknown key {key!r}")
            values[key] = value.strip()
    try:
        cfg = CurveConfig(
            p0=int(values["p0"]),
            ratio=float(values["ratio"]),
            tiers=int(values["tiers"]),
            tier_allocation=int(values["tier_allocation"]),
            migrate_fraction=Fraction(values["migrate_fraction"]),
        )
    except (KeyError, ValueError) as exc:
        raise SchemaError(path, 0, f"bad curve config: {exc}") from None
    if "total_supply" in values and int(values["total_supply"]) != cfg.total_supply:
        raise SchemaError(path, 0, "total_supply must equal tiers * tier_allocation")
    return cfg


# -- corpus layout ------------------------------------------------------------


@dataclass(frozen=True)
class CorpusPaths:
    root: Path

    @property
    def launches(self) -> Path:
        return self.root / "launches.csv"

    @property
    def manifest(self) -> Path:
        return self.root / "manifest.csv"

    @property
    def sol_feed(self) -> Path:
        return self.root / "sol_feed.csv"

    def txs(self, mint: str) -> Path:
        return self.root / "txs" / f"{mint}.jsonl"

    def traces(self, mint: str) -> Path:
        return self.root / "traces" / f"{mint}.csv"

    def post(self, mint: str) -> Path:
        return self.root / "post" / f"{mint}.csv"

    def events(self, mint: str) -> Path:
        return self.root / "events" / f"{mint}.csv"

    def bundles(self, mint: str) -> Path:
        return self.root / "bundles" / f"{mint}.csv"

    def timeseries(self, mint: str) -> Path:
        return self.root / "timeseries" / f"{mint}.csv"

    @property
    def breakdown(self) -> Path:
        return self.root / "breakdown.csv"

    @property
    def features(self) -> Path:
        return self.root / "features.csv"

    @property
    def feature_schema(self) -> Path:
        return self.root / "feature_schema.csv"

    @property
    def labels(self) -> Path:
        return self.root / "labels.csv"

    @property
    def label_histogram(self) -> Path:
        return self.root / "label_histogram.csv"

    @property
    def task(self) -> Path:
        return self.root / "task.csv"

    @property
    def task_counts(self) -> Path:
        return self.root / "task_counts.csv"

    @property
    def distributions(self) -> Path:
        return self.root / "report_distributions.csv"

    @property
    def backtest(self) -> Path:
        return self.root / "backtest.csv"
