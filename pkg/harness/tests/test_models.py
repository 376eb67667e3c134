import numpy as np
import pytest

from detect_harness.ablation import ablate
from detect_harness.data import SEQ_CHANNELS, SEQ_LEN, TaskDataset
from detect_harness.models import (
    TrainSettings,
    normal_probability_scores,
    random_baseline,
    train_eval,
)

FAST = TrainSettings(epochs=10, seq_epochs=2)


def synthetic_dataset(n=400, seed=0, signal_group="group2_holding", n_signal=4, n_noise=5):
    """Controlled dataset: only the signal group's columns carry the label."""
    rng = np.random.default_rng(seed)
    y = (rng.uniform(size=n) < 0.65).astype(np.int64)
    names, groups, columns = [], {}, []
    for i in range(n_signal):
        name = f"sig{i}"
        names.append(name)
        groups[name] = signal_group
        columns.append(y * 1.5 + rng.normal(0, 1.0, n))
    for i in range(n_noise):
        name = f"noise{i}"
        names.append(name)
        groups[name] = "group1_context"
        columns.append(rng.normal(size=n))
    X = np.stack(columns, axis=1).astype(np.float32)
    order = rng.permutation(n)
    n_train = int(round(0.7 * n))
    series = np.zeros((n, SEQ_LEN, SEQ_CHANNELS), dtype=np.float32)
    return TaskDataset(
        mints=[f"m{i}" for i in range(n)],
        X=X,
        y=y,
        series=series,
        feature_names=names,
        feature_groups=groups,
        train_idx=np.sort(order[:n_train]),
        test_idx=np.sort(order[n_train:]),
        folds=rng.integers(0, 5, size=n_train),
    )


def sequence_dataset(n=80, seed=1):
    """Easy sequence signal: positive class has a rising price channel."""
    rng = np.random.default_rng(seed)
    y = (rng.uniform(size=n) < 0.5).astype(np.int64)
    series = np.zeros((n, SEQ_LEN, SEQ_CHANNELS), dtype=np.float32)
    t = np.linspace(0, 1, SEQ_LEN, dtype=np.float32)
    for i in range(n):
        base = 1.0 + (0.8 * t if y[i] else -0.4 * t)
        noise = rng.normal(0, 0.02, SEQ_LEN).astype(np.float32)
        series[i, :, 0] = base + noise
        series[i, :, 1] = base
        series[i, :, 2] = base
        series[i, :, 3:] = rng.uniform(0, 2, (SEQ_LEN, 2))
    X = rng.normal(size=(n, 3)).astype(np.float32)
    order = rng.permutation(n)
    n_train = int(round(0.7 * n))
    return TaskDataset(
        mints=[f"m{i}" for i in range(n)],
        X=X,
        y=y,
        series=series,
        feature_names=["a", "b", "c"],
        feature_groups={"a": "group1_context", "b": "group1_context", "c": "group1_context"},
        train_idx=np.sort(order[:n_train]),
        test_idx=np.sort(order[n_train:]),
        folds=rng.integers(0, 5, size=n_train),
    )


class TestDeterminism:
    def test_sklearn_scores_reproducible(self):
        ds = synthetic_dataset()
        a, _ = normal_probability_scores("lr", ds, seed=3)
        b, _ = normal_probability_scores("lr", ds, seed=3)
        assert np.array_equal(a, b)

    def test_mlp_reproducible_per_seed(self):
        ds = synthetic_dataset(n=200)
        a, _ = normal_probability_scores("mlp", ds, seed=5, settings=FAST)
        b, _ = normal_probability_scores("mlp", ds, seed=5, settings=FAST)
        c, _ = normal_probability_scores("mlp", ds, seed=6, settings=FAST)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_report_identical_for_same_seed_config(self):
        ds = synthetic_dataset(n=200)
        r1 = train_eval("lr", ds, seeds=(0, 1))
        r2 = train_eval("lr", ds, seeds=(0, 1))
        assert r1 == r2


class TestTabularModels:
    @pytest.mark.parametrize("model", ["lr", "rf", "gbt", "hgbt", "mlp"])
    def test_learns_synthetic_signal(self, model):
        ds = synthetic_dataset()
        report = train_eval(model, ds, seeds=(0,), settings=FAST)
        baseline = random_baseline(ds, seeds=(0, 1, 2), split="test")
        assert report.auprc > baseline.auprc + 0.15, report.model
        assert report.macro.f1 > 0.6

    def test_scores_are_probabilities(self):
        ds = synthetic_dataset(n=150)
        for model in ("lr", "mlp"):
            scores, _ = normal_probability_scores(model, ds, seed=0, settings=FAST)
            assert scores.min() >= 0.0 and scores.max() <= 1.0


class TestSequenceModels:
    @pytest.mark.parametrize("model", ["gru", "lstm"])
    def test_recurrent_learns_trend(self, model):
        ds = sequence_dataset()
        report = train_eval(model, ds, seeds=(0,), settings=TrainSettings(seq_epochs=4))
        assert report.auprc > 0.6

    @pytest.mark.parametrize("model", ["tcn", "transformer"])
    def test_runs_and_scores(self, model):
        ds = sequence_dataset(n=40)
        scores, _ = normal_probability_scores(
            model, ds, seed=0, settings=TrainSettings(seq_epochs=1)
        )
        assert scores.shape == (len(ds.test_idx),)
        assert scores.min() >= 0.0 and scores.max() <= 1.0


class TestEnsembles:
    def test_mean_of_calibrated_member_scores(self):
        ds = synthetic_dataset(n=200)
        mlp, _ = normal_probability_scores("mlp", ds, seed=2, settings=FAST)
        rf, _ = normal_probability_scores("rf", ds, seed=2, settings=FAST)
        both, _ = normal_probability_scores("mlp+rf", ds, seed=2, settings=FAST)
        assert np.allclose(both, (mlp + rf) / 2)


class TestRandomBaseline:
    def test_estimates_prevalence(self):
        # label seed far from the scorer seeds: identical streams would
        # correlate scores with labels
        ds = synthetic_dataset(n=1000, seed=777)
        report = random_baseline(ds, seeds=tuple(range(10)), split="all")
        assert report.auprc == pytest.approx(ds.normal_prevalence, abs=0.02)

    def test_split_validation(self):
        ds = synthetic_dataset(n=100)
        with pytest.raises(ValueError):
            random_baseline(ds, split="validation")


class TestAblation:
    def test_signal_group_ablation_reduces_auprc(self):
        ds = synthetic_dataset(n=500, seed=4)
        reports = ablate(
            ds,
            ablations=(
                ("full", ()),
                ("-signal", ("group2_holding",)),
                ("-noise", ("group1_context",)),
            ),
            model="lr",
            seeds=(0,),
        )
        assert reports["-signal"].auprc < reports["full"].auprc - 0.05
        # dropping a known-useless group stays within run variance
        assert abs(reports["-noise"].auprc - reports["full"].auprc) < 0.03

    def test_no_drop_equals_full_feature_report(self):
        ds = synthetic_dataset(n=200)
        reports = ablate(ds, ablations=(("full", ()),), model="lr", seeds=(0,))
        direct = train_eval("lr", ds, seeds=(0,))
        assert reports["full"].auprc == pytest.approx(direct.auprc)

    def test_dropping_every_group_rejected(self):
        ds = synthetic_dataset(n=100)
        with pytest.raises(ValueError):
            ablate(
                ds,
                ablations=(("-all", ("group1_context", "group2_holding")),),
                model="lr",
                seeds=(0,),
            )

    def test_unknown_group_rejected(self):
        ds = synthetic_dataset(n=100)
        with pytest.raises(ValueError):
            ablate(ds, ablations=(("-ghost", ("group9_ghost",)),), model="lr", seeds=(0,))
