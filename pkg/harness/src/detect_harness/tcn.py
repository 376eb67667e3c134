"""Temporal convolutional network and the manipulation detector.

Architecture: 8 dilated residual blocks of two Conv1d layers each
(kernel 9, dilations 1..128, 32 channels, batch norm, ReLU, symmetric
non-causal padding), then AdaptiveAvgPool1d(1) -> Flatten ->
Linear(32, 32) -> ReLU -> Dropout(0.5) -> Linear(32, 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

KERNEL_SIZE = 9
DILATIONS = (1, 2, 4, 8, 16, 32, 64, 128)
HIDDEN_CHANNELS = 32


class _Block(nn.Module):
    def __init__(self, in_channels: int, dilation: int):
        super().__init__()
        pad = (KERNEL_SIZE - 1) // 2 * dilation  # symmetric, non-causal
        self.conv1 = nn.Conv1d(in_channels, HIDDEN_CHANNELS, KERNEL_SIZE,
                               padding=pad, dilation=dilation)
        self.bn1 = nn.BatchNorm1d(HIDDEN_CHANNELS)
        self.conv2 = nn.Conv1d(HIDDEN_CHANNELS, HIDDEN_CHANNELS, KERNEL_SIZE,
                               padding=pad, dilation=dilation)
        self.bn2 = nn.BatchNorm1d(HIDDEN_CHANNELS)
        self.act = nn.ReLU()
        self.skip = (
            nn.Conv1d(in_channels, HIDDEN_CHANNELS, 1)
            if in_channels != HIDDEN_CHANNELS
            else nn.Identity()
        )

    def forward(self, x):
        out = self.act(self.bn1(self.conv1(x)))
        out = self.bn2(self.conv2(out))
        return self.act(out + self.skip(x))


class TemporalConvNet(nn.Module):
    """Input (batch, channels, time); output (batch, out_logits)."""

    def __init__(self, in_channels: int = 5, out_logits: int = 2):
        super().__init__()
        blocks = []
        channels = in_channels
        for dilation in DILATIONS:
            blocks.append(_Block(channels, dilation))
            channels = HIDDEN_CHANNELS
        self.blocks = nn.Sequential(*blocks)
        self.head = nn.Sequential(
            nn.AdaptiveAvgPool1d(1),
            nn.Flatten(),
            nn.Linear(HIDDEN_CHANNELS, 32),
            nn.ReLU(),
            nn.Dropout(0.5),
            nn.Linear(32, out_logits),
        )

    def forward(self, x):
        return self.head(self.blocks(x))


@dataclass
class ManipulationReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float
    n_train: int
    n_test: int


def prepare_post_series(series: np.ndarray) -> np.ndarray:
    """(n, 3600, 5) channels -> normalized (n, 5, 3600) tensors.

    Price becomes the ratio to the first second; volume-like channels are
    log-compressed and scaled per sample.
    """
    out = series.astype(np.float32).copy()
    base = np.where(out[:, :1, 0] > 0, out[:, :1, 0], 1.0)
    out[:, :, 0] = out[:, :, 0] / base - 1.0
    out[:, :, 1:4] = np.log1p(np.maximum(out[:, :, 1:4], 0.0))
    flow = out[:, :, 4]
    out[:, :, 4] = np.sign(flow) * np.log1p(np.abs(flow))
    for channel in range(1, 5):
        scale = np.abs(out[:, :, channel]).max(axis=1, keepdims=True)
        out[:, :, channel] = out[:, :, channel] / np.maximum(scale, 1e-9)
    return np.transpose(out, (0, 2, 1))


def _rank_auc(labels: np.ndarray, scores: np.ndarray) -> float:
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    if len(pos) == 0 or len(neg) == 0:
        return 0.5
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return float(wins / (len(pos) * len(neg)))


def train_manipulation_tcn(
    series: np.ndarray,
    labels: np.ndarray,
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    seed: int = 0,
    epochs: int = 8,
    batch_size: int = 16,
    lr: float = 2e-3,
) -> tuple[TemporalConvNet, ManipulationReport, np.ndarray]:
    """Train the detector; returns (model, test report, all-sample scores).

    Scores are P(manipulated) in [0, 1] for every input row, in row order,
    directly consumable as an annotation override.
    """
    if series.ndim != 3 or series.shape[1:] != (3600, 5):
        raise ValueError(f"expected series shaped (n, 3600, 5), got {series.shape}")
    torch.manual_seed(seed)
    generator = torch.Generator().manual_seed(seed)
    inputs = torch.from_numpy(prepare_post_series(series))
    targets = torch.from_numpy(labels.astype(np.int64))

    counts = np.bincount(labels[train_idx], minlength=2)
    if counts.min() == 0:
        raise ValueError("training split needs both classes")
    weights = torch.tensor(counts.sum() / (2.0 * counts), dtype=torch.float32)

    model = TemporalConvNet(in_channels=5, out_logits=2)
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    criterion = nn.CrossEntropyLoss(weight=weights)
    train_tensor = torch.from_numpy(train_idx.astype(np.int64))

    clean_epochs = 0
    for _ in range(epochs):
        model.train()
        order = train_tensor[torch.randperm(len(train_tensor), generator=generator)]
        correct = 0
        for start in range(0, len(order), batch_size):
            batch = order[start : start + batch_size]
            if len(batch) < 2:
                continue
            optimizer.zero_grad()
            logits = model(inputs[batch])
            loss = criterion(logits, targets[batch])
            loss.backward()
            optimizer.step()
            correct += int((logits.argmax(dim=1) == targets[batch]).sum())
        clean_epochs = clean_epochs + 1 if correct == len(order) else 0
        if clean_epochs >= 2:  # fit is stable, stop early
            break

    model.eval()
    scores = np.zeros(len(labels), dtype=np.float64)
    with torch.no_grad():
        for start in range(0, len(inputs), 32):
            logits = model(inputs[start : start + 32])
            scores[start : start + 32] = torch.softmax(logits, dim=1)[:, 1].numpy()

    test_scores = scores[test_idx]
    test_labels = labels[test_idx]
    predicted = (test_scores >= 0.5).astype(int)
    tp = int(((predicted == 1) & (test_labels == 1)).sum())
    fp = int(((predicted == 1) & (test_labels == 0)).sum())
    fn = int(((predicted == 0) & (test_labels == 1)).sum())
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    report = ManipulationReport(
        accuracy=float((predicted == test_labels).mean()),
        precision=precision,
        recall=recall,
        f1=2 * precision * recall / (precision + recall) if precision + recall else 0.0,
        auc=_rank_auc(test_labels, test_scores),
        n_train=len(train_idx),
        n_test=len(test_idx),
    )
    return model, report, scores
