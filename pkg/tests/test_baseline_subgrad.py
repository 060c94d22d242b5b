import numpy as np
import pytest

from conftest import make_network
from core import topology
from core.synth_data import NodeData
from core.topology import Graph
from schemas import BaselineConfig
from solvers import baseline_subgrad
from utils.errors import DegenerateDataError


def test_metropolis_weights_path_graph():
    W = baseline_subgrad.metropolis_weights(topology.path_graph(3))
    np.testing.assert_allclose(W, [[2 / 3, 1 / 3, 0.0], [1 / 3, 1 / 3, 1 / 3], [0.0, 1 / 3, 2 / 3]])


def test_metropolis_weights_are_symmetric_and_stochastic():
    g = topology.random_geometric_graph(9, 1.5, 0.8, 1, 8, seed=2)
    W = baseline_subgrad.metropolis_weights(g)
    np.testing.assert_allclose(W, W.T)
    np.testing.assert_allclose(W.sum(axis=1), 1.0)
    assert (W >= 0).all()


def test_combine_step_does_not_expand(rng):
    g = topology.random_geometric_graph(9, 1.5, 0.8, 1, 8, seed=2)
    W = baseline_subgrad.metropolis_weights(g)
    for _ in range(20):
        w = rng.normal(size=(9, 4))
        assert np.abs(W @ w).max() <= np.abs(w).max() + 1e-15


def test_zero_step_freezes_iterates():
    data, _ = make_network(3, 10, 2, seed=1)
    cfg = BaselineConfig(tau=0.5, lam=0.1, step_c0=0.0, max_iterations=5)
    trajectory, records = baseline_subgrad.run_baseline(cfg, data, topology.path_graph(3))
    assert trajectory.shape == (6, 3, 3)
    assert not trajectory.any()
    assert len(records) == 5


def test_intercept_only_approaches_median():
    rng = np.random.default_rng(3)
    y = rng.normal(loc=1.5, size=51)
    node = NodeData(design=np.ones((51, 1)), response=y)
    cfg = BaselineConfig(tau=0.5, lam=0.0, step_c0=1.0, max_iterations=10_000, log_every=5000)
    trajectory, _ = baseline_subgrad.run_baseline(cfg, [node], Graph.from_edges(1, []))
    assert trajectory[-1, 0, 0] == pytest.approx(np.median(y), abs=0.05)


def test_records_leave_primal_and_stationarity_empty():
    data, _ = make_network(3, 10, 2, seed=1)
    cfg = BaselineConfig(tau=0.75, lam=0.05, max_iterations=3, step_decay="inv_k")
    _, records = baseline_subgrad.run_baseline(cfg, data, topology.complete_graph(3))
    assert [r.k for r in records] == [1, 2, 3]
    for r in records:
        assert r.stationarity_residual is None
        assert r.aug_lagrangian is None
        assert r.primal_residual is None
        assert np.isfinite(r.objective)


def test_step_size_decays():
    sqrt_cfg = BaselineConfig(tau=0.5, lam=0.0, step_c0=2.0)
    k_cfg = BaselineConfig(tau=0.5, lam=0.0, step_c0=2.0, step_decay="inv_k")
    assert baseline_subgrad.step_size(3, sqrt_cfg) == pytest.approx(1.0)
    assert baseline_subgrad.step_size(3, k_cfg) == pytest.approx(0.5)


def test_subgradient_at_kink_uses_midpoint():
    out = baseline_subgrad._check_loss_subgradient(np.array([1.0, -1.0, 0.0]), 0.75)
    np.testing.assert_allclose(out, [0.75, -0.25, 0.25])


def test_baseline_coefficients_are_not_exactly_zero():
    data, truth = make_network(4, 40, 10, seed=3, num_active=3)
    cfg = BaselineConfig(tau=0.5, lam=0.055, max_iterations=200)
    trajectory, _ = baseline_subgrad.run_baseline(cfg, data, topology.complete_graph(4))
    off_support = [p for p in range(10) if p not in truth.active_set]
    final = trajectory[-1][:, off_support]
    assert np.mean(final == 0.0) < 0.01


def test_run_baseline_rejects_empty_network():
    cfg = BaselineConfig(tau=0.5, lam=0.1, max_iterations=2)
    with pytest.raises(DegenerateDataError):
        baseline_subgrad.run_baseline(cfg, [], Graph.from_edges(1, []))
