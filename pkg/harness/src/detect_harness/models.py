"""Benchmark models: tabular classifiers, sequence encoders, ensembles.

Hyperparameters follow the fixed benchmark settings: RF 800 trees / depth
16; gradient boosting 800 rounds / depth 6 / lr 0.05; histogram boosting
2000 iterations / lr 0.02 / 64 leaves; MLP 512-256 with batch norm and
dropout 0.2; recurrent and attention encoders 2 layers, hidden 256,
dropout 0.2. All runs are deterministic per seed. Training uses the
class-weighted objective (weights N / (2 n_c)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn
from sklearn.ensemble import (
    GradientBoostingClassifier,
    HistGradientBoostingClassifier,
    RandomForestClassifier,
)
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LogisticRegression
from sklearn.preprocessing import StandardScaler

from .data import SEQ_CHANNELS, TaskDataset
from .losses import class_weights
from .metrics import EvalReport, classification_metrics, config_hash, mean_report
from .tcn import TemporalConvNet

TABULAR_MODELS = ("lr", "rf", "gbt", "hgbt", "mlp")
SEQUENCE_MODELS = ("gru", "lstm", "tcn", "transformer")
ENSEMBLES = {"mlp+rf": ("mlp", "rf"), "mlp+hgbt": ("mlp", "hgbt"), "mlp+lstm": ("mlp", "lstm")}
ALL_MODELS = TABULAR_MODELS + SEQUENCE_MODELS + tuple(ENSEMBLES)


@dataclass
class TrainSettings:
    epochs: int = 30
    batch_size: int = 64
    lr: float = 1e-3
    seq_epochs: int = 12


def _class_weight_dict(y: np.ndarray) -> dict[int, float]:
    counts = {0: int((y == 0).sum()), 1: int((y == 1).sum())}
    w0, w1 = class_weights(counts)
    return {0: w0, 1: w1}


def _fit_sklearn(name: str, X: np.ndarray, y: np.ndarray, seed: int):
    """Returns (model, scaler_or_None, notes)."""
    notes = []
    scaler = None
    weights = _class_weight_dict(y)
    if name == "lr":
        scaler = StandardScaler().fit(X)
        model = LogisticRegression(C=1.0, penalty="l2", max_iter=2000, class_weight=weights,
                                   random_state=seed)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", ConvergenceWarning)
            model.fit(scaler.transform(X), y)
        if any(issubclass(w.category, ConvergenceWarning) for w in caught):
            notes.append(f"lr seed {seed}: did not converge")
    elif name == "rf":
        model = RandomForestClassifier(
            n_estimators=800, max_depth=16, class_weight=weights, random_state=seed, n_jobs=-1
        )
        model.fit(X, y)
    elif name == "gbt":
        sample_weight = np.where(y == 1, weights[1], weights[0])
        model = GradientBoostingClassifier(
            n_estimators=800, max_depth=6, learning_rate=0.05, random_state=seed
        )
        model.fit(X, y, sample_weight=sample_weight)
    elif name == "hgbt":
        sample_weight = np.where(y == 1, weights[1], weights[0])
        model = HistGradientBoostingClassifier(
            max_iter=2000, learning_rate=0.02, max_leaf_nodes=64, random_state=seed,
            early_stopping=False,
        )
        model.fit(X, y, sample_weight=sample_weight)
    else:
        raise ValueError(f"unknown sklearn model {name!r}")
    return model, scaler, notes


class TabularMlp(nn.Module):
    """512-256 with batch norm, ReLU, dropout 0.2, single logit."""

    def __init__(self, n_features: int):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(n_features, 512),
            nn.BatchNorm1d(512),
            nn.ReLU(),
            nn.Dropout(0.2),
            nn.Linear(512, 256),
            nn.BatchNorm1d(256),
            nn.ReLU(),
            nn.Dropout(0.2),
            nn.Linear(256, 1),
        )

    def forward(self, x):
        return self.net(x).squeeze(-1)


class RecurrentClassifier(nn.Module):
    def __init__(self, kind: str, channels: int = SEQ_CHANNELS):
        super().__init__()
        rnn_cls = nn.GRU if kind == "gru" else nn.LSTM
        self.rnn = rnn_cls(channels, 256, num_layers=2, batch_first=True, dropout=0.2)
        self.head = nn.Linear(256, 1)

    def forward(self, x):
        out, _ = self.rnn(x)
        return self.head(out[:, -1]).squeeze(-1)


class TransformerClassifier(nn.Module):
    def __init__(self, channels: int = SEQ_CHANNELS):
        super().__init__()
        self.embed = nn.Linear(channels, 256)
        layer = nn.TransformerEncoderLayer(
            d_model=256, nhead=4, dim_feedforward=512, dropout=0.2, batch_first=True
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=2)
        self.head = nn.Linear(256, 1)

    def forward(self, x):
        hidden = self.encoder(self.embed(x))
        return self.head(hidden.mean(dim=1)).squeeze(-1)


class SequenceTcn(nn.Module):
    def __init__(self, channels: int = SEQ_CHANNELS):
        super().__init__()
        self.tcn = TemporalConvNet(in_channels=channels, out_logits=1)

    def forward(self, x):
        return self.tcn(x.transpose(1, 2)).squeeze(-1)


def _weighted_logit_bce(logits, targets, w0: float, w1: float):
    weights = torch.where(targets > 0.5, torch.as_tensor(w1), torch.as_tensor(w0))
    return nn.functional.binary_cross_entropy_with_logits(
        logits, targets, weight=weights.to(logits.dtype), reduction="mean"
    )


def _train_torch(
    model: nn.Module,
    X: np.ndarray,
    y: np.ndarray,
    seed: int,
    epochs: int,
    batch_size: int,
    lr: float,
) -> nn.Module:
    torch.manual_seed(seed)
    generator = torch.Generator().manual_seed(seed)
    w0, w1 = class_weights({0: int((y == 0).sum()), 1: int((y == 1).sum())})
    inputs = torch.from_numpy(X.astype(np.float32))
    targets = torch.from_numpy(y.astype(np.float32))
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    model.train()
    n = len(inputs)
    for _ in range(epochs):
        order = torch.randperm(n, generator=generator)
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            if len(batch) < 2:  # batch norm needs more than one sample
                continue
            optimizer.zero_grad()
            logits = model(inputs[batch])
            loss = _weighted_logit_bce(logits, targets[batch], w0, w1)
            loss.backward()
            optimizer.step()
    model.eval()
    return model


@torch.no_grad()
def _torch_scores(model: nn.Module, X: np.ndarray, batch_size: int = 256) -> np.ndarray:
    model.eval()
    inputs = torch.from_numpy(X.astype(np.float32))
    out = []
    for start in range(0, len(inputs), batch_size):
        logits = model(inputs[start : start + batch_size])
        out.append(torch.sigmoid(logits).numpy())
    return np.concatenate(out)


def _normalize_series(series: np.ndarray) -> np.ndarray:
    """Per-sample scale removal: prices relative to the first bucket,
    volumes log-compressed."""
    out = series.astype(np.float32).copy()
    base = np.where(out[:, :1, 0] > 0, out[:, :1, 0], 1.0)
    out[:, :, 0:3] = out[:, :, 0:3] / base[:, :, None] - 1.0
    out[:, :, 3:5] = np.log1p(np.maximum(out[:, :, 3:5], 0.0))
    scale = out[:, :, 3:5].max(axis=(1, 2), keepdims=True)
    out[:, :, 3:5] = out[:, :, 3:5] / np.maximum(scale, 1e-9)
    return out


def normal_probability_scores(
    model_name: str,
    dataset: TaskDataset,
    seed: int,
    columns: list[int] | None = None,
    settings: TrainSettings = TrainSettings(),
) -> tuple[np.ndarray, list[str]]:
    """Train on the train split, return P(normal) on the test split."""
    train, test = dataset.train_idx, dataset.test_idx
    notes: list[str] = []
    if model_name in ("lr", "rf", "gbt", "hgbt"):
        cols = columns if columns is not None else list(range(dataset.X.shape[1]))
        X_train, X_test = dataset.X[train][:, cols], dataset.X[test][:, cols]
        model, scaler, notes = _fit_sklearn(model_name, X_train, dataset.y[train], seed)
        if scaler is not None:
            X_test = scaler.transform(X_test)
        high_prob = model.predict_proba(X_test)[:, list(model.classes_).index(1)]
        return 1.0 - high_prob, notes
    if model_name == "mlp":
        cols = columns if columns is not None else list(range(dataset.X.shape[1]))
        scaler = StandardScaler().fit(dataset.X[train][:, cols])
        X_train = scaler.transform(dataset.X[train][:, cols])
        X_test = scaler.transform(dataset.X[test][:, cols])
        torch.manual_seed(seed)
        model = TabularMlp(len(cols))
        _train_torch(model, X_train, dataset.y[train], seed,
                     settings.epochs, settings.batch_size, settings.lr)
        return 1.0 - _torch_scores(model, X_test), notes
    if model_name in SEQUENCE_MODELS:
        series = _normalize_series(dataset.series)
        torch.manual_seed(seed)
        if model_name in ("gru", "lstm"):
            model = RecurrentClassifier(model_name)
        elif model_name == "transformer":
            model = TransformerClassifier()
        else:
            model = SequenceTcn()
        _train_torch(model, series[train], dataset.y[train], seed,
                     settings.seq_epochs, 32, settings.lr)
        return 1.0 - _torch_scores(model, series[test], batch_size=64), notes
    if model_name in ENSEMBLES:
        members = ENSEMBLES[model_name]
        stacked = []
        for member in members:
            scores, member_notes = normal_probability_scores(
                member, dataset, seed, columns, settings
            )
            stacked.append(scores)
            notes.extend(member_notes)
        return np.mean(stacked, axis=0), notes
    raise ValueError(f"unknown model {model_name!r}")


def train_eval(
    model_name: str,
    dataset: TaskDataset,
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4),
    columns: list[int] | None = None,
    settings: TrainSettings = TrainSettings(),
) -> EvalReport:
    """Average test metrics over independent seeded runs."""
    per_seed = []
    notes: list[str] = []
    y_test = dataset.y[dataset.test_idx]
    for seed in seeds:
        scores, run_notes = normal_probability_scores(model_name, dataset, seed, columns, settings)
        notes.extend(run_notes)
        per_seed.append(classification_metrics(y_test, scores))
    cfg = config_hash(
        {"model": model_name, "seeds": seeds, "columns": columns,
         "epochs": settings.epochs, "seq_epochs": settings.seq_epochs}
    )
    return mean_report(model_name, per_seed, tuple(seeds), cfg, tuple(notes))


def random_baseline(
    dataset: TaskDataset,
    seeds: tuple[int, ...] = tuple(range(20)),
    split: str = "all",
) -> EvalReport:
    """Uninformative uniform scorer; its AUPRC estimates class-0 prevalence.

    ``split="all"`` scores the whole task dataset (the baseline needs no
    training data); ``split="test"`` restricts to the held-out rows for
    apples-to-apples comparison against trained models.
    """
    if split == "all":
        y_eval = dataset.y
    elif split == "test":
        y_eval = dataset.y[dataset.test_idx]
    else:
        raise ValueError("split must be 'all' or 'test'")
    per_seed = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        scores = rng.uniform(size=len(y_eval))
        per_seed.append(classification_metrics(y_eval, scores))
    return mean_report("random", per_seed, tuple(seeds),
                       config_hash({"model": "random", "split": split}))
