import numpy as np
import pytest

from detect_harness.data import (
    SEQ_CHANNELS,
    SEQ_LEN,
    CorpusFormatError,
    build_manipulation_dataset,
    build_task_dataset,
    load_manifest,
    load_post_series,
)


def test_dataset_assembly(small_corpus):
    ds = build_task_dataset(small_corpus)
    assert len(ds.mints) == len(ds.y) == len(ds.X)
    assert ds.X.shape[1] == len(ds.feature_names)
    assert ds.series.shape == (len(ds.mints), SEQ_LEN, SEQ_CHANNELS)
    assert set(np.unique(ds.y)) <= {0, 1}
    assert ds.class_counts[0] + ds.class_counts[1] == len(ds.y)


def test_split_is_disjoint_seventy_thirty(small_corpus):
    ds = build_task_dataset(small_corpus, with_series=False)
    train, test = set(ds.train_idx.tolist()), set(ds.test_idx.tolist())
    assert not train & test
    assert len(train) + len(test) == len(ds.mints)
    assert len(train) == round(0.7 * len(ds.mints))
    assert set(ds.folds.tolist()) <= {0, 1, 2, 3, 4}
    assert len(ds.folds) == len(ds.train_idx)


def test_split_seed_determinism(small_corpus):
    a = build_task_dataset(small_corpus, split_seed=3, with_series=False)
    b = build_task_dataset(small_corpus, split_seed=3, with_series=False)
    c = build_task_dataset(small_corpus, split_seed=4, with_series=False)
    assert np.array_equal(a.train_idx, b.train_idx)
    assert not np.array_equal(a.train_idx, c.train_idx)


def test_feature_columns_follow_schema_manifest(small_corpus):
    ds = build_task_dataset(small_corpus, with_series=False)
    assert ds.feature_names[0] == "sol_price"
    assert ds.feature_groups["top10_hold_pct"] == "group2_holding"
    assert ds.feature_groups["bundle_num"] == "group4_bundle"
    kept = ds.columns_for_groups({"group1_context"})
    assert all(ds.feature_groups[ds.feature_names[i]] != "group1_context" for i in kept)


def test_series_normalized_tail_kept(small_corpus):
    ds = build_task_dataset(small_corpus)
    # prices are positive where the launch traded; padding carries prices
    assert np.isfinite(ds.series).all()


def test_manipulation_dataset(manipulation_corpus):
    series, labels, mints, train_idx, test_idx = build_manipulation_dataset(manipulation_corpus)
    assert series.shape == (len(mints), 3600, 5)
    assert labels.sum() > 0 and (labels == 0).sum() > 0
    assert not set(train_idx.tolist()) & set(test_idx.tolist())
    profiles = load_manifest(manipulation_corpus)
    for mint, label in zip(mints, labels):
        assert label == (1 if profiles[mint] == "manipulated" else 0)


def test_missing_corpus_rejected(tmp_path):
    with pytest.raises((CorpusFormatError, FileNotFoundError)):
        build_task_dataset(tmp_path)


def test_post_series_schema_enforced(tmp_path, small_corpus):
    (tmp_path / "post").mkdir()
    (tmp_path / "post" / "m.csv").write_text("# schema=launchlab.post.v1\nwrong,header\n")
    with pytest.raises((CorpusFormatError, KeyError, TypeError)):
        load_post_series(tmp_path, "m")
