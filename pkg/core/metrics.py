"""
Métricas de avaliação: MSE contra a verdade, MSE de rede (desacordo entre nós),
acurácia de reconhecimento do suporte e a lacuna de cobertura do quantil.
"""

from typing import Iterable, Sequence

import numpy as np

from core.synth_data import NodeData
from schemas import MetricReport
from utils.errors import DegenerateDataError, DomainError


def _stack(estimates) -> np.ndarray:
    arr = np.asarray(estimates, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise DegenerateDataError(f"estimativas devem formar uma matriz L×(P+1), recebido {arr.shape}")
    return arr


def mse(estimates, truth) -> float:
    """Σ_l ‖ŵ_l − w‖² / L."""
    W = _stack(estimates)
    w = np.asarray(truth, dtype=float)
    if W.shape[1] != w.shape[0]:
        raise DegenerateDataError(f"dimensão {W.shape[1]} das estimativas difere da verdade ({w.shape[0]})")
    return float(np.mean(np.sum((W - w) ** 2, axis=1)))


def network_mse(estimates) -> float:
    """Σ_l ‖ŵ_l − w̄‖² / L, com w̄ a média entre nós."""
    W = _stack(estimates)
    return float(np.mean(np.sum((W - W.mean(axis=0)) ** 2, axis=1)))


def recognition_accuracy(estimates, true_support: Iterable[int], P: int, activity_eps: float = 0.0) -> float:
    """Fração de coeficientes (sem o intercepto) classificados corretamente como ativos/inativos."""
    W = _stack(estimates)[:, :P]
    truth_active = np.zeros(P, dtype=bool)
    truth_active[list(true_support)] = True
    declared = np.abs(W) > activity_eps
    return float(np.mean(declared == truth_active[None, :]))


def quantile_coverage_gap(data: Sequence[NodeData], w, tau: float) -> float:
    """|#{i : y_i ≤ x̄_iᵀw}/n − τ| sobre todas as amostras da rede."""
    w = np.asarray(w, dtype=float)
    below = sum(int(np.count_nonzero(d.response <= d.design @ w)) for d in data)
    n = sum(d.num_samples for d in data)
    if n == 0:
        raise DomainError("cobertura do quantil indefinida sem amostras")
    return abs(below / n - tau)


def metric_report(estimates, truth, true_support, data: Sequence[NodeData], tau: float, activity_eps: float = 0.0) -> MetricReport:
    W = _stack(estimates)
    P = W.shape[1] - 1
    return MetricReport(
        mse=mse(W, truth),
        network_mse=network_mse(W),
        recognition_accuracy=recognition_accuracy(W, true_support, P, activity_eps),
        quantile_coverage_gap=quantile_coverage_gap(data, W.mean(axis=0), tau),
    )
