"""Corpus file loading and task-dataset assembly.

Reads only the documented corpus artifacts: feature_schema.csv fixes the
tabular column order and group assignment, features.csv supplies the rows,
task.csv the binary labels, timeseries/<mint>.csv the pre-migration series,
and post/<mint>.csv + manifest.csv the manipulation-detector corpus.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SEQ_LEN = 256
SEQ_CHANNELS = 5  # open, end, avg price, buy volume, sell volume
POST_LEN = 3600
POST_CHANNELS = 5  # price, buy volume, sell volume, tx count, net flow


class CorpusFormatError(Exception):
    pass


def _read_schema_csv(path: Path, expected_schema: str) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if first != f"# schema={expected_schema}":
            raise CorpusFormatError(f"{path}: expected schema {expected_schema}, got {first!r}")
        return list(csv.DictReader(fh))


@dataclass
class TaskDataset:
    mints: list[str]
    X: np.ndarray  # (n, d) float32, schema-manifest column order
    y: np.ndarray  # (n,) int, 1 = high risk
    series: np.ndarray  # (n, SEQ_LEN, SEQ_CHANNELS) float32
    feature_names: list[str]
    feature_groups: dict[str, str]  # column -> group tag
    train_idx: np.ndarray
    test_idx: np.ndarray
    folds: np.ndarray  # fold id per training position, 0..4
    class_counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        overlap = set(self.train_idx.tolist()) & set(self.test_idx.tolist())
        if overlap:
            raise ValueError("train/test splits overlap")
        self.class_counts = {
            0: int((self.y == 0).sum()),
            1: int((self.y == 1).sum()),
        }

    @property
    def normal_prevalence(self) -> float:
        return self.class_counts[0] / len(self.y)

    def columns_for_groups(self, drop_groups: set[str]) -> list[int]:
        return [
            i
            for i, name in enumerate(self.feature_names)
            if self.feature_groups[name] not in drop_groups
        ]


def load_feature_table(corpus: Path) -> tuple[list[str], dict[str, str], dict[str, np.ndarray]]:
    """Schema-ordered columns, their groups, and one vector per mint."""
    schema_rows = _read_schema_csv(corpus / "feature_schema.csv", "launchlab.feature_schema.v1")
    names = [row["name"] for row in schema_rows]
    groups = {row["name"]: row["group"] for row in schema_rows}
    rows = _read_schema_csv(corpus / "features.csv", "launchlab.features.v1")
    table = {}
    for row in rows:
        values = []
        for name in names:
            raw = row[name]
            values.append(float(raw) if raw not in ("", None) else np.nan)
        table[row["mint"]] = np.asarray(values, dtype=np.float32)
    return names, groups, table


def load_task_labels(corpus: Path) -> dict[str, int]:
    rows = _read_schema_csv(corpus / "task.csv", "launchlab.task.v1")
    return {row["mint"]: int(row["label"]) for row in rows}


def load_timeseries(corpus: Path, mint: str) -> np.ndarray:
    """Pre-migration series resampled to a fixed (SEQ_LEN, 5) tensor.

    Longer histories keep the most recent buckets; shorter ones are padded
    at the end carrying the final prices with zero volumes.
    """
    path = corpus / "timeseries" / f"{mint}.csv"
    with open(path) as fh:
        if fh.readline().strip() != "# schema=launchlab.timeseries.v1":
            raise CorpusFormatError(f"{path}: unexpected schema line")
        fh.readline()  # bucket metadata
        reader = csv.DictReader(fh)
        rows = [
            (
                float(r["open_price"]),
                float(r["end_price"]),
                float(r["avg_price"]),
                float(r["buy_volume"]),
                float(r["sell_volume"]),
            )
            for r in reader
        ]
    data = np.asarray(rows, dtype=np.float32)
    if len(data) == 0:
        return np.zeros((SEQ_LEN, SEQ_CHANNELS), dtype=np.float32)
    if len(data) >= SEQ_LEN:
        return data[-SEQ_LEN:]
    pad = np.zeros((SEQ_LEN - len(data), SEQ_CHANNELS), dtype=np.float32)
    pad[:, 0:3] = data[-1, 0:3]
    return np.concatenate([data, pad], axis=0)


def load_post_series(corpus: Path, mint: str) -> np.ndarray:
    path = corpus / "post" / f"{mint}.csv"
    rows = _read_schema_csv(path, "launchlab.post.v1")
    data = np.asarray(
        [
            (
                float(r["price"]),
                float(r["buy_volume"]),
                float(r["sell_volume"]),
                float(r["tx_count"]),
                float(r["net_flow"]),
            )
            for r in rows
        ],
        dtype=np.float32,
    )
    if data.shape != (POST_LEN, POST_CHANNELS):
        raise CorpusFormatError(f"{path}: expected {(POST_LEN, POST_CHANNELS)}, got {data.shape}")
    return data


def load_manifest(corpus: Path) -> dict[str, str]:
    rows = _read_schema_csv(corpus / "manifest.csv", "launchlab.manifest.v1")
    return {row["mint"]: row["profile"] for row in rows}


def build_task_dataset(corpus: Path, split_seed: int = 0, with_series: bool = True) -> TaskDataset:
    """Assemble the detection dataset with a seeded 7:3 split and 5 folds."""
    corpus = Path(corpus)
    names, groups, table = load_feature_table(corpus)
    labels = load_task_labels(corpus)
    mints = sorted(m for m in labels if m in table)
    if not mints:
        raise CorpusFormatError("task file and feature table share no mints")

    X = np.stack([table[m] for m in mints])
    X = np.nan_to_num(X, nan=0.0)
    y = np.asarray([labels[m] for m in mints], dtype=np.int64)
    if with_series:
        series = np.stack([load_timeseries(corpus, m) for m in mints])
    else:
        series = np.zeros((len(mints), SEQ_LEN, SEQ_CHANNELS), dtype=np.float32)

    rng = np.random.default_rng(split_seed)
    order = rng.permutation(len(mints))
    n_train = int(round(0.7 * len(mints)))
    train_idx = np.sort(order[:n_train])
    test_idx = np.sort(order[n_train:])
    folds = rng.integers(0, 5, size=n_train)
    return TaskDataset(
        mints=mints,
        X=X,
        y=y,
        series=series,
        feature_names=names,
        feature_groups=groups,
        train_idx=train_idx,
        test_idx=test_idx,
        folds=folds,
    )


def build_manipulation_dataset(corpus: Path, split_seed: int = 0):
    """(series, labels, mints, train_idx, test_idx) for the detector.

    Labels come from the simulator manifest: the manipulated profile is the
    positive class.
    """
    corpus = Path(corpus)
    profiles = load_manifest(corpus)
    mints = sorted(m for m in profiles if (corpus / "post" / f"{m}.csv").exists())
    series = np.stack([load_post_series(corpus, m) for m in mints])
    labels = np.asarray([1 if profiles[m] == "manipulated" else 0 for m in mints], dtype=np.int64)
    rng = np.random.default_rng(split_seed)
    order = rng.permutation(len(mints))
    n_train = int(round(0.7 * len(mints)))
    return series, labels, mints, np.sort(order[:n_train]), np.sort(order[n_train:])
