"""
Baseline simplificado: difusão com pesos de Metropolis seguida de um passo de
subgradiente em (1/M_l)Σρ_τ(y − x̄ᵀw) + λ‖w_{1:P}‖₁.

Serve só de referência nas comparações; nenhuma garantia de convergência.
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from core import prox_math
from core.synth_data import NodeData
from core.topology import Graph
from schemas import BaselineConfig, IterationRecord
from utils.errors import DegenerateDataError, DivergenceError

logger = logging.getLogger(__name__)


def metropolis_weights(graph: Graph) -> np.ndarray:
    """W_lj = 1/(1 + max(d_l, d_j)) nas arestas; a diagonal completa cada linha até 1."""
    L = graph.num_nodes
    W = np.zeros((L, L))
    degrees = [graph.degree(l) for l in range(L)]
    for l, j in graph.edge_list:
        W[l, j] = W[j, l] = 1.0 / (1.0 + max(degrees[l], degrees[j]))
    W[np.diag_indices(L)] = 1.0 - W.sum(axis=1)
    return W


def _check_loss_subgradient(u: np.ndarray, tau: float) -> np.ndarray:
    # ∂ρ_τ(0) resolvido no ponto médio τ − ½
    return np.where(u > 0, tau, np.where(u < 0, tau - 1.0, tau - 0.5))


def _local_subgradient(w: np.ndarray, node: NodeData, tau: float, lam: float) -> np.ndarray:
    u = node.response - node.design @ w
    grad = -(node.design.T @ _check_loss_subgradient(u, tau)) / node.num_samples
    grad[:-1] += lam * np.sign(w[:-1])
    return grad


def step_size(k: int, cfg: BaselineConfig) -> float:
    if cfg.step_decay == "inv_k":
        return cfg.step_c0 / (k + 1)
    return cfg.step_c0 / math.sqrt(k + 1)


def _objective(w: np.ndarray, data: Sequence[NodeData], tau: float, lam: float) -> float:
    total = 0.0
    for l, node in enumerate(data):
        total += float(np.sum(prox_math.check_loss(node.response - node.design @ w[l], tau)))
        total += node.num_samples * lam * float(np.abs(w[l, :-1]).sum())
    return total


def run_baseline(cfg: BaselineConfig, data: Sequence[NodeData], graph: Graph,
                 label: str = "simplified baseline") -> Tuple[np.ndarray, List[IterationRecord]]:
    """
    Devolve as trajetórias (K+1, L, P+1), começando do zero, e um
    IterationRecord por iteração (resíduo primal e estacionariedade não se
    aplicam: ficam None).
    """
    if not data:
        raise DegenerateDataError("nenhum nó com dados")
    if graph.num_nodes != len(data):
        raise DegenerateDataError(f"grafo com {graph.num_nodes} nós mas {len(data)} conjuntos de dados")
    width = data[0].design.shape[1]
    W = metropolis_weights(graph)
    ls = [l for l, _ in graph.edge_list]
    js = [j for _, j in graph.edge_list]

    w = np.zeros((len(data), width))
    trajectory = [w.copy()]
    records: List[IterationRecord] = []
    logger.info(f"🚀 [Baseline] {label}: L={graph.num_nodes}, passo {cfg.step_c0} ({cfg.step_decay})")

    for k in range(cfg.max_iterations):
        combined = W @ w
        alpha = step_size(k, cfg)
        new = np.stack([
            combined[l] - alpha * _local_subgradient(combined[l], node, cfg.tau, cfg.lam)
            for l, node in enumerate(data)
        ])
        if not np.all(np.isfinite(new)):
            exc = DivergenceError(k + 1, "baseline iterate", records[-1] if records else None)
            logger.error(f"💥 [Baseline] {exc}")
            raise exc

        record = IterationRecord(
            k=k + 1,
            objective=_objective(new, data, cfg.tau, cfg.lam),
            consensus_residual=float(np.abs(new[ls] - new[js]).max()) if ls else 0.0,
            w_step=float(np.linalg.norm(new - w, axis=1).max()),
        )
        w = new
        trajectory.append(w.copy())
        records.append(record)
        if record.k % cfg.log_every == 0:
            logger.info(f"🔁 [Baseline] k={record.k} obj={record.objective:.6g} consenso={record.consensus_residual:.3e}")

    logger.info(f"✅ [Baseline] {label}: {cfg.max_iterations} iterações")
    return np.stack(trajectory), records
