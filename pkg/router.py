"""
Roteamento de um nome de algoritmo para o executor correspondente.

Todos os executores devolvem um `AlgorithmRun`; o observador recebe
(k, estimativas L×(P+1), registro) depois de cada iteração, o que permite ao
harness anexar métricas sem conhecer o algoritmo.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from core.synth_data import NodeData
from core.topology import Graph
from schemas import (
    BaselineConfig,
    ExperimentConfig,
    IterationRecord,
    PenaltyKind,
    PenaltySpec,
    Schedule,
    SolverConfig,
)
from solvers import baseline_subgrad, dsad_solver
from utils.errors import DomainError

logger = logging.getLogger(__name__)

ALGORITHM_MAPPING: Dict[str, str] = {
    "dsad_mcp": "DSAD-MCP",
    "dsad_scad": "DSAD-SCAD",
    "baseline": "simplified baseline",
}

Observer = Callable[[int, np.ndarray, IterationRecord], None]


@dataclass
class AlgorithmRun:
    algorithm: str
    label: str
    estimates: np.ndarray
    records: List[IterationRecord]
    termination: str
    omega: Optional[float] = None
    state: Optional[dsad_solver.SolverState] = field(default=None, repr=False)


def normalize_algorithm(name: str) -> str:
    """Aceita maiúsculas e hífens ('DSAD-MCP' → 'dsad_mcp')."""
    key = name.strip().lower().replace("-", "_")
    if key not in ALGORITHM_MAPPING:
        raise DomainError(f"algoritmo desconhecido: {name!r} (opções: {', '.join(ALGORITHM_MAPPING)})")
    return key


def label_for(name: str) -> str:
    return ALGORITHM_MAPPING[normalize_algorithm(name)]


def penalty_for(exp: ExperimentConfig, algorithm: str) -> PenaltySpec:
    if normalize_algorithm(algorithm) == "dsad_scad":
        return PenaltySpec(kind=PenaltyKind.SCAD, lam=exp.lam, gamma=exp.gamma_scad)
    return PenaltySpec(kind=PenaltyKind.MCP, lam=exp.lam, gamma=exp.gamma_mcp)


def solver_config_for(exp: ExperimentConfig, algorithm: str, data: Sequence[NodeData]) -> SolverConfig:
    """
    Monta o SolverConfig do experimento, resolvendo 'auto':
    ω por compute_omega, c = √(3/2)/β, d = √20·ω/β.
    """
    if exp.omega == "auto":
        M = max(d.num_samples for d in data)
        omega = dsad_solver.compute_omega(data, exp.tau, exp.lam, M)
    else:
        omega = float(exp.omega)
    c = math.sqrt(1.5) / exp.beta if exp.c == "auto" else float(exp.c)
    d = math.sqrt(20.0) * omega / exp.beta if exp.d == "auto" else float(exp.d)
    return SolverConfig(
        tau=exp.tau,
        penalty=penalty_for(exp, algorithm),
        schedule=Schedule(c=c, d=d, beta=exp.beta, mu_min=exp.mu_min),
        omega=omega,
        max_iterations=exp.max_iterations,
        consensus_tol=exp.consensus_tol,
        stationarity_tol=exp.stationarity_tol,
        log_every=exp.log_every,
        edge_coupling=exp.edge_coupling,
        zero_tol=exp.zero_tol,
    )


def baseline_config_for(exp: ExperimentConfig) -> BaselineConfig:
    return BaselineConfig(
        tau=exp.tau,
        lam=exp.lam,
        step_c0=exp.baseline_step_c0,
        step_decay=exp.baseline_step_decay,
        max_iterations=exp.baseline_max_iterations if exp.baseline_max_iterations is not None else exp.max_iterations,
        log_every=exp.log_every,
    )


def _run_dsad(algorithm: str, exp: ExperimentConfig, data, graph, observer: Optional[Observer]) -> AlgorithmRun:
    cfg = solver_config_for(exp, algorithm, data)
    label = ALGORITHM_MAPPING[algorithm]
    callback = None
    if observer is not None:
        callback = lambda state, record: observer(record.k, state.w, record)  # noqa: E731
    state, records, reason = dsad_solver.run(
        cfg, data, graph, callback=callback, node_workers=exp.node_workers, label=label
    )
    return AlgorithmRun(
        algorithm=algorithm,
        label=label,
        estimates=state.w.copy(),
        records=records,
        termination=reason,
        omega=float(cfg.omega),
        state=state,
    )


def _run_baseline(exp: ExperimentConfig, data, graph, observer: Optional[Observer]) -> AlgorithmRun:
    cfg = baseline_config_for(exp)
    label = ALGORITHM_MAPPING["baseline"]
    trajectory, records = baseline_subgrad.run_baseline(cfg, data, graph, label=label)
    if observer is not None:
        for record in records:
            observer(record.k, trajectory[record.k], record)
    return AlgorithmRun(
        algorithm="baseline",
        label=label,
        estimates=trajectory[-1].copy(),
        records=records,
        termination="budget",
    )


def run_algorithm(
    name: str,
    exp: ExperimentConfig,
    data: Sequence[NodeData],
    graph: Graph,
    observer: Optional[Observer] = None,
) -> AlgorithmRun:
    """Despacha para DSAD (MCP/SCAD) ou para o baseline."""
    algorithm = normalize_algorithm(name)
    logger.info(f"🧭 [Harness] Roteando para {ALGORITHM_MAPPING[algorithm]}")
    if algorithm == "baseline":
        return _run_baseline(exp, data, graph, observer)
    return _run_dsad(algorithm, exp, data, graph, observer)
