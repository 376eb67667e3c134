"""Feature-group ablation study over the tabular benchmark."""

from __future__ import annotations

from .data import TaskDataset
from .metrics import EvalReport
from .models import TrainSettings, train_eval

GROUPS = ("group1_context", "group2_holding", "group3_activity", "group4_bundle")

# Each entry: (report key, groups removed). The concentration pair mirrors
# the holding (2) and bundle (4) groups capturing the same construct.
DEFAULT_ABLATIONS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("full", ()),
    ("-group1", ("group1_context",)),
    ("-group2", ("group2_holding",)),
    ("-group3", ("group3_activity",)),
    ("-group4", ("group4_bundle",)),
    ("-group2&4", ("group2_holding", "group4_bundle")),
)


def ablate(
    dataset: TaskDataset,
    ablations=DEFAULT_ABLATIONS,
    model: str = "mlp",
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4),
    settings: TrainSettings = TrainSettings(),
) -> dict[str, EvalReport]:
    """Retrain the model with feature groups removed; keyed reports."""
    present = {dataset.feature_groups[name] for name in dataset.feature_names}
    reports = {}
    for key, drop in ablations:
        if set(drop) - present:
            raise ValueError(f"ablation {key!r} names groups absent from the schema")
        remaining = dataset.columns_for_groups(set(drop))
        if not remaining:
            raise ValueError(f"ablation {key!r} removes every feature group")
        columns = None if not drop else remaining
        reports[key] = train_eval(model, dataset, seeds=seeds, columns=columns,
                                  settings=settings)
    return reports
