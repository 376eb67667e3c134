"""Evaluation metrics and the report record.

AUPRC treats the NORMAL class (label 0) as the positive class, so a
constant or uninformative scorer scores the class-0 prevalence.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.metrics import average_precision_score


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass
class EvalReport:
    model: str
    auprc: float
    normal: ClassMetrics  # label 0
    high: ClassMetrics  # label 1
    macro: ClassMetrics
    seeds: tuple[int, ...]
    config_hash: str
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def config_hash(spec: dict) -> str:
    blob = json.dumps(spec, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def auprc_normal(y_true: np.ndarray, normal_scores: np.ndarray) -> float:
    """Area under precision-recall with label 0 as the positive class."""
    positives = (np.asarray(y_true) == 0).astype(int)
    return float(average_precision_score(positives, np.asarray(normal_scores)))


def _prf(y_true: np.ndarray, y_pred: np.ndarray, label: int) -> ClassMetrics:
    tp = int(((y_pred == label) & (y_true == label)).sum())
    fp = int(((y_pred == label) & (y_true != label)).sum())
    fn = int(((y_pred != label) & (y_true == label)).sum())
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return ClassMetrics(precision, recall, f1)


def classification_metrics(
    y_true: np.ndarray, normal_scores: np.ndarray, threshold: float = 0.5
) -> tuple[float, ClassMetrics, ClassMetrics, ClassMetrics]:
    """(auprc, normal, high, macro); macro is the unweighted class mean."""
    y_true = np.asarray(y_true)
    y_pred = (np.asarray(normal_scores) < threshold).astype(int)  # low normal prob -> high risk
    normal = _prf(y_true, y_pred, 0)
    high = _prf(y_true, y_pred, 1)
    macro = ClassMetrics(
        (normal.precision + high.precision) / 2,
        (normal.recall + high.recall) / 2,
        (normal.f1 + high.f1) / 2,
    )
    return auprc_normal(y_true, normal_scores), normal, high, macro


def mean_report(model: str, per_seed: list[tuple], seeds: tuple[int, ...], cfg: str,
                notes: tuple[str, ...] = ()) -> EvalReport:
    """Average per-seed (auprc, normal, high, macro) tuples into one report."""

    def avg(getter):
        return float(np.mean([getter(r) for r in per_seed]))

    def avg_cm(idx) -> ClassMetrics:
        return ClassMetrics(
            avg(lambda r: r[idx].precision),
            avg(lambda r: r[idx].recall),
            avg(lambda r: r[idx].f1),
        )

    return EvalReport(
        model=model,
        auprc=avg(lambda r: r[0]),
        normal=avg_cm(1),
        high=avg_cm(2),
        macro=avg_cm(3),
        seeds=seeds,
        config_hash=cfg,
        notes=notes,
    )
