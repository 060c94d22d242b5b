import numpy as np
import pytest

from core import metrics, synth_data
from utils.errors import DegenerateDataError, DomainError


def test_mse_examples():
    truth = np.array([1.0, 0.0, 0.5])
    assert metrics.mse([truth, truth], truth) == 0.0
    estimates = [truth + np.array([1.0, 0.0, 0.0]), truth + np.array([0.0, 3.0, 0.0])]
    assert metrics.mse(estimates, truth) == pytest.approx(5.0)
    assert metrics.mse(truth + 2.0, truth) == pytest.approx(12.0)


def test_mse_rejects_dimension_mismatch():
    with pytest.raises(DegenerateDataError):
        metrics.mse(np.zeros((2, 3)), np.zeros(4))


def test_network_mse_examples(rng):
    assert metrics.network_mse([[1.0, 2.0], [1.0, 2.0]]) == 0.0
    assert metrics.network_mse([[0.0], [2.0]]) == pytest.approx(1.0)
    W = rng.normal(size=(5, 4))
    assert metrics.network_mse(W + 3.0) == pytest.approx(metrics.network_mse(W))


def test_bias_variance_decomposition(rng):
    for _ in range(20):
        W = rng.normal(size=(6, 5))
        truth = rng.normal(size=5)
        bias = np.sum((W.mean(axis=0) - truth) ** 2)
        assert metrics.mse(W, truth) == pytest.approx(metrics.network_mse(W) + bias, abs=1e-10)


def test_recognition_accuracy_examples():
    P = 18
    support = [0, 5, 9]
    exact = np.zeros((3, P + 1))
    exact[:, support] = 1.0
    exact[:, P] = 0.3
    assert metrics.recognition_accuracy(exact, support, P) == 1.0

    zeros = np.zeros((3, P + 1))
    assert metrics.recognition_accuracy(zeros, support, P) == pytest.approx(15 / 18)

    noisy = np.full((3, P + 1), 1e-3)
    assert metrics.recognition_accuracy(noisy, support, P, activity_eps=0.0) == pytest.approx(3 / 18)
    assert metrics.recognition_accuracy(noisy, support, P, activity_eps=np.inf) == pytest.approx(15 / 18)


def test_quantile_coverage_gap_at_truth():
    for tau in (0.75, 0.5):
        truth = synth_data.sparse_truth(3, 2, 1.0, 0.2, seed=3, tau=tau)
        data = synth_data.generate_network_data(1, 15_000, 0.5, truth, design_seed=1, noise_seed=2)
        w = synth_data.true_augmented_w(truth, tau)
        assert metrics.quantile_coverage_gap(data, w, tau) <= 0.02


def test_quantile_coverage_gap_with_huge_intercept():
    truth = synth_data.sparse_truth(2, 1, 1.0, 0.2, seed=3)
    data = synth_data.generate_network_data(2, 50, 0.5, truth, design_seed=1, noise_seed=2)
    w = np.array([0.0, 0.0, 1e6])
    assert metrics.quantile_coverage_gap(data, w, 0.75) == pytest.approx(0.25)


def test_quantile_coverage_gap_rejects_empty_data():
    with pytest.raises(DomainError):
        metrics.quantile_coverage_gap([], np.zeros(3), 0.5)


def test_metric_report_uses_consensus_for_coverage():
    truth = synth_data.sparse_truth(2, 1, 1.0, 0.2, seed=3, tau=0.5)
    data = synth_data.generate_network_data(2, 40, 0.5, truth, design_seed=1, noise_seed=2)
    w = synth_data.true_augmented_w(truth, 0.5)
    report = metrics.metric_report(np.stack([w, w]), w, truth.active_set, data, 0.5)
    assert report.mse == 0.0
    assert report.network_mse == 0.0
    assert report.recognition_accuracy == 1.0
    assert report.quantile_coverage_gap == pytest.approx(metrics.quantile_coverage_gap(data, w, 0.5))
