import numpy as np
import pytest
import torch

from detect_harness.tcn import (
    DILATIONS,
    TemporalConvNet,
    prepare_post_series,
    train_manipulation_tcn,
)


def test_architecture_output_shape():
    model = TemporalConvNet(in_channels=5, out_logits=2)
    out = model(torch.randn(3, 5, 3600))
    assert out.shape == (3, 2)


def test_receptive_field_covers_the_hour():
    # kernel 9 with dilations doubling to 128, two convs per block
    receptive = 1 + sum(2 * (9 - 1) * d for d in DILATIONS)
    assert receptive >= 3600


def test_length_preserved_by_symmetric_padding():
    model = TemporalConvNet()
    x = torch.randn(2, 5, 3600)
    hidden = model.blocks(x)
    assert hidden.shape == (2, 32, 3600)


def test_wrong_input_shape_rejected():
    series = np.zeros((4, 100, 5), dtype=np.float32)
    labels = np.array([0, 1, 0, 1])
    with pytest.raises(ValueError):
        train_manipulation_tcn(series, labels, np.array([0, 1]), np.array([2, 3]))


def test_single_class_training_split_rejected():
    series = np.zeros((4, 3600, 5), dtype=np.float32)
    labels = np.array([1, 1, 0, 0])
    with pytest.raises(ValueError):
        train_manipulation_tcn(series, labels, np.array([0, 1]), np.array([2, 3]))


def test_constant_zero_series_give_chance_accuracy():
    n = 24
    series = np.zeros((n, 3600, 5), dtype=np.float32)
    labels = np.tile([0, 1], n // 2)
    train_idx = np.arange(0, 16)
    test_idx = np.arange(16, 24)  # balanced: 4 of each
    _, report, scores = train_manipulation_tcn(
        series, labels, train_idx, test_idx, seed=0, epochs=1, batch_size=8
    )
    assert report.accuracy == pytest.approx(0.5)
    assert scores.min() >= 0.0 and scores.max() <= 1.0


def test_scores_are_probabilities_for_any_input():
    rng = np.random.default_rng(0)
    series = np.abs(rng.normal(1.0, 0.5, size=(12, 3600, 5))).astype(np.float32)
    labels = np.tile([0, 1], 6)
    _, _, scores = train_manipulation_tcn(
        series, labels, np.arange(8), np.arange(8, 12), seed=1, epochs=1, batch_size=4
    )
    assert np.all((scores >= 0.0) & (scores <= 1.0))


def test_prepare_normalizes_price_to_first_second():
    series = np.ones((2, 3600, 5), dtype=np.float32)
    series[0, :, 0] = 200.0
    series[1, :, 0] = 7.0
    out = prepare_post_series(series)
    assert out.shape == (2, 5, 3600)
    assert np.allclose(out[:, 0, :], 0.0)  # flat price -> zero everywhere
