"""Command-line entry points.

    detect-harness benchmark --corpus DIR --model mlp [--seeds 5] [--out report.json]
    detect-harness ablate --corpus DIR [--model mlp] [--out ablation.json]
    detect-harness tcn --corpus DIR [--epochs 8] [--scores-out scores.csv]
    detect-harness export-scores --corpus DIR --model mlp --out scores.csv

Exported score files follow the primary pipeline's scores.csv contract
(mint, normal_probability) so they feed straight into its backtest and
annotation override.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from .ablation import ablate
from .data import build_manipulation_dataset, build_task_dataset
from .metrics import EvalReport
from .models import ALL_MODELS, TrainSettings, normal_probability_scores, random_baseline, train_eval
from .tcn import train_manipulation_tcn


def write_scores_csv(path: Path, scores: dict[str, float]) -> None:
    lines = ["# schema=launchlab.scores.v1", "mint,normal_probability"]
    lines += [f"{mint},{value!r}" for mint, value in sorted(scores.items())]
    path.write_text("\n".join(lines) + "\n")


def _emit(report: EvalReport, out: Path | None) -> None:
    print(report.to_json())
    if out is not None:
        out.write_text(report.to_json() + "\n")


def cmd_benchmark(args) -> None:
    dataset = build_task_dataset(args.corpus, split_seed=args.split_seed,
                                 with_series=args.model in ("gru", "lstm", "tcn", "transformer",
                                                            "mlp+lstm"))
    seeds = tuple(range(args.seeds))
    if args.model == "random":
        report = random_baseline(dataset)
    else:
        report = train_eval(args.model, dataset, seeds=seeds)
    _emit(report, args.out)


def cmd_ablate(args) -> None:
    dataset = build_task_dataset(args.corpus, split_seed=args.split_seed, with_series=False)
    reports = ablate(dataset, model=args.model, seeds=tuple(range(args.seeds)))
    payload = {key: json.loads(r.to_json()) for key, r in reports.items()}
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out is not None:
        args.out.write_text(text + "\n")


def cmd_tcn(args) -> None:
    series, labels, mints, train_idx, test_idx = build_manipulation_dataset(
        args.corpus, split_seed=args.split_seed
    )
    _, report, scores = train_manipulation_tcn(
        series, labels, train_idx, test_idx, seed=args.seed, epochs=args.epochs
    )
    print(json.dumps(report.__dict__, indent=2, sort_keys=True))
    if args.scores_out is not None:
        # the annotation override wants P(manipulated); the backtest wants
        # P(normal) -- export the manipulation score per the detector role
        write_scores_csv(args.scores_out, {m: 1.0 - s for m, s in zip(mints, scores)})


def cmd_export_scores(args) -> None:
    dataset = build_task_dataset(args.corpus, split_seed=args.split_seed,
                                 with_series=args.model in ("gru", "lstm", "tcn", "transformer",
                                                            "mlp+lstm"))
    scores, _ = normal_probability_scores(args.model, dataset, seed=args.seed)
    mints = [dataset.mints[i] for i in dataset.test_idx]
    write_scores_csv(args.out, dict(zip(mints, scores.tolist())))
    print(f"wrote {len(mints)} scores to {args.out}")


def main() -> None:
    parser = argparse.ArgumentParser(prog="detect-harness")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("benchmark", help="train and evaluate one model")
    bench.add_argument("--corpus", type=Path, required=True)
    bench.add_argument("--model", choices=ALL_MODELS + ("random",), required=True)
    bench.add_argument("--seeds", type=int, default=5)
    bench.add_argument("--split-seed", type=int, default=0)
    bench.add_argument("--out", type=Path)
    bench.set_defaults(func=cmd_benchmark)

    abl = sub.add_parser("ablate", help="feature-group ablation study")
    abl.add_argument("--corpus", type=Path, required=True)
    abl.add_argument("--model", default="mlp")
    abl.add_argument("--seeds", type=int, default=5)
    abl.add_argument("--split-seed", type=int, default=0)
    abl.add_argument("--out", type=Path)
    abl.set_defaults(func=cmd_ablate)

    tcn = sub.add_parser("tcn", help="train the manipulation detector")
    tcn.add_argument("--corpus", type=Path, required=True)
    tcn.add_argument("--epochs", type=int, default=8)
    tcn.add_argument("--seed", type=int, default=0)
    tcn.add_argument("--split-seed", type=int, default=0)
    tcn.add_argument("--scores-out", type=Path)
    tcn.set_defaults(func=cmd_tcn)

    export = sub.add_parser("export-scores", help="score the test split for the backtest")
    export.add_argument("--corpus", type=Path, required=True)
    export.add_argument("--model", choices=ALL_MODELS, default="mlp")
    export.add_argument("--seed", type=int, default=0)
    export.add_argument("--split-seed", type=int, default=0)
    export.add_argument("--out", type=Path, required=True)
    export.set_defaults(func=cmd_export_scores)

    args = parser.parse_args()
    args.func(args)


if __name__ == "__main__":
    main()
