"""
DSAD: ADMM descentralizado com suavização para regressão quantílica com
penalidade MCP/SCAD e acoplamento por variação total nas arestas.

Uma iteração é bulk-síncrona: todos os blocos de nó (coordenadas de w em
Gauss-Seidel, depois z, depois Ψ) leem apenas valores da iteração anterior;
depois de uma barreira, todos os blocos de aresta (g, depois ξ) leem o w novo
e o ξ anterior. Por isso o resultado é idêntico com ou sem executor.

Convenção das arestas: para a aresta e = (l, j) com l < j, `g[e, 0]` é a cópia
de l (g_lj, restrita a igualar w_l) e `g[e, 1]` a cópia de j (g_jl); o mesmo
vale para `xi`.
"""

import logging
import math
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from core import prox_math
from core.synth_data import NodeData
from core.topology import Graph
from schemas import (
    EdgeCoupling,
    InequalityCheck,
    IterationRecord,
    KKTResiduals,
    PenaltySpec,
    SolverConfig,
    ValidationReport,
)
from utils.errors import ConfigValidationError, DegenerateDataError, DivergenceError, DomainError

logger = logging.getLogger(__name__)

REL_TOL = 1e-12

Observer = Callable[["SolverState", IterationRecord], None]


@dataclass
class SolverState:
    w: np.ndarray                 # (L, P+1)
    z: List[np.ndarray]           # L vetores de tamanho M_l
    psi: List[np.ndarray]
    g: np.ndarray                 # (E, 2, P+1)
    xi: np.ndarray                # (E, 2, P+1)
    k: int = 0
    edge_list: Tuple[Tuple[int, int], ...] = field(default=())

    @property
    def num_nodes(self) -> int:
        return self.w.shape[0]

    def copy(self) -> "SolverState":
        return SolverState(
            w=self.w.copy(),
            z=[z.copy() for z in self.z],
            psi=[p.copy() for p in self.psi],
            g=self.g.copy(),
            xi=self.xi.copy(),
            k=self.k,
            edge_list=self.edge_list,
        )


# ---------------------------------------------------------------------------
# Parâmetros e validação
# ---------------------------------------------------------------------------

def _check_data(data: Sequence[NodeData], graph: Optional[Graph] = None) -> int:
    if not data:
        raise DegenerateDataError("nenhum nó com dados")
    width = data[0].design.shape[1]
    if any(d.design.shape[1] != width for d in data):
        raise DegenerateDataError("todos os nós devem ter o mesmo número de colunas")
    if graph is not None and graph.num_nodes != len(data):
        raise DegenerateDataError(f"grafo com {graph.num_nodes} nós mas {len(data)} conjuntos de dados")
    return width


def compute_omega(data: Sequence[NodeData], tau: float, lam: float, M: int) -> float:
    """max{τ,1−τ}·max_l ‖(X⁽ˡ⁾)ᵀ‖∞ + M·λ + 1, com ‖Aᵀ‖∞ a maior soma absoluta de coluna."""
    _check_data(data)
    col_sum = max(float(np.abs(d.design).sum(axis=0).max()) for d in data)
    return max(tau, 1.0 - tau) * col_sum + M * lam + 1.0


def omega_lower_bound(data: Sequence[NodeData], tau: float, lam: float, M: int) -> float:
    return compute_omega(data, tau, lam, M) - 1.0


def resolve_config(cfg: SolverConfig, data: Sequence[NodeData]) -> SolverConfig:
    """Resolve omega='auto' para o valor numérico."""
    if cfg.omega != "auto":
        return cfg
    M = max(d.num_samples for d in data)
    return cfg.model_copy(update={"omega": compute_omega(data, cfg.tau, cfg.penalty.lam, M)})


def _omega(cfg: SolverConfig) -> float:
    if cfg.omega == "auto":
        raise DomainError("omega ainda é 'auto'; resolva com resolve_config antes de iterar")
    return float(cfg.omega)


def warmup_iteration(d: float, threshold: float) -> int:
    """Menor k ≥ 0 com d·√(k+1) > threshold."""
    if threshold < 0:
        return 0
    K = max(int(math.floor((threshold / d) ** 2)), 0)
    while d * math.sqrt(K + 1) <= threshold:
        K += 1
    while K > 0 and d * math.sqrt(K) > threshold:
        K -= 1
    return K


def _inequality(name: str, lhs: float, rhs: float, strict: bool = False) -> InequalityCheck:
    if strict:
        passed = lhs > rhs
    else:
        passed = lhs >= rhs - REL_TOL * max(abs(rhs), 1.0)
    return InequalityCheck(name=name, lhs=lhs, rhs=rhs, strict=strict, passed=passed)


def validate_config(cfg: SolverConfig, data: Sequence[NodeData], graph: Graph) -> ValidationReport:
    """
    Confere βc ≥ √(3/2), βd ≥ √20·ω e ω > max{τ,1−τ}‖Xᵀ‖∞ + Mλ, e calcula a
    iteração de aquecimento K. Coluna nula levanta DegenerateDataError.
    """
    _check_data(data, graph)
    sizes = [d.num_samples for d in data]
    M = max(sizes)
    min_col = min(float(d.column_sq_norms.min()) for d in data)
    if min_col <= 0.0:
        raise DegenerateDataError("coluna de design identicamente nula")

    resolved = resolve_config(cfg, data)
    omega = _omega(resolved)
    s = cfg.schedule
    checks = [
        _inequality("beta*c >= sqrt(3/2)", s.beta * s.c, math.sqrt(1.5)),
        _inequality("beta*d >= sqrt(20)*omega", s.beta * s.d, math.sqrt(20.0) * omega),
        _inequality(
            "omega > max(tau,1-tau)*||X^T||_inf + M*lambda",
            omega,
            omega_lower_bound(data, cfg.tau, cfg.penalty.lam, M),
            strict=True,
        ),
    ]
    violations = [f"{c.name} violated ({c.lhs:.6g} vs {c.rhs:.6g})" for c in checks if not c.passed]

    threshold = M * prox_math.weak_convexity_modulus(cfg.penalty) / min_col
    notes = []
    unequal = len(set(sizes)) > 1
    if unequal:
        notes.append(f"unequal sample sizes; M = max_l M_l = {M} used in the conditions")

    report = ValidationReport(
        passed=not violations,
        violations=violations,
        checks=checks,
        omega=omega,
        warmup_iteration=warmup_iteration(s.d, threshold),
        warmup_threshold=threshold,
        max_samples=M,
        unequal_sample_sizes=unequal,
        notes=notes,
    )
    if violations:
        logger.error(f"❌ [DSAD] Configuração rejeitada: {'; '.join(violations)}")
    return report


# ---------------------------------------------------------------------------
# Estado e atualizações de bloco
# ---------------------------------------------------------------------------

def init_state(graph: Graph, data: Sequence[NodeData]) -> SolverState:
    width = _check_data(data, graph)
    E = graph.num_edges
    return SolverState(
        w=np.zeros((graph.num_nodes, width)),
        z=[np.zeros(d.num_samples) for d in data],
        psi=[np.zeros(d.num_samples) for d in data],
        g=np.zeros((E, 2, width)),
        xi=np.zeros((E, 2, width)),
        k=0,
        edge_list=tuple(graph.edge_list),
    )


def _own_edge_terms(l: int, state: SolverState, graph: Graph, sigma_xi: float) -> np.ndarray:
    total = np.zeros(state.w.shape[1])
    for e, side in graph.incidence[l]:
        total += sigma_xi * state.g[e, side] - state.xi[e, side]
    return total


def update_w_node(l: int, state: SolverState, data: Sequence[NodeData], graph: Graph, cfg: SolverConfig) -> np.ndarray:
    """
    Varredura Gauss-Seidel das P+1 coordenadas de w_l. Cada coordenada de
    inclinação é o prox da penalidade com passo M_l/Υ_p; o intercepto é o
    minimizador da parte quadrática.
    """
    sigma_psi, sigma_xi, _ = prox_math.schedule_at(state.k, cfg.schedule)
    node = data[l]
    X, y = node.design, node.response
    col_sq = node.column_sq_norms
    P = node.num_features
    degree = graph.degree(l)

    w = state.w[l].copy()
    v = y - state.z[l] - state.psi[l] / sigma_psi - X @ w
    edge_terms = _own_edge_terms(l, state, graph, sigma_xi)

    for p in range(P + 1):
        upsilon = sigma_psi * col_sq[p] + sigma_xi * degree
        if not upsilon > 0:
            raise DegenerateDataError(f"coluna {p} nula no nó {l} sem vizinhos")
        x_p = X[:, p]
        a = sigma_psi * (x_p @ v + col_sq[p] * w[p]) + edge_terms[p]
        if p < P:
            new = prox_math.prox_penalty(a / upsilon, node.num_samples / upsilon, cfg.penalty, cfg.zero_tol)
        else:
            new = a / upsilon
        if new != w[p]:
            v -= x_p * (new - w[p])
            w[p] = new

    if not np.all(np.isfinite(w)):
        raise DivergenceError(state.k, f"w at node {l}")
    return w


def update_z_node(l: int, state: SolverState, data: Sequence[NodeData], cfg: SolverConfig,
                  w_l: Optional[np.ndarray] = None) -> np.ndarray:
    """z_l = prox_smooth_abs(α, 1/(2σΨ), μ) com α = (y − Xw) − (Ψ + τ − ½)/σΨ."""
    sigma_psi, _, mu = prox_math.schedule_at(state.k, cfg.schedule)
    node = data[l]
    w = state.w[l] if w_l is None else w_l
    alpha = (node.response - node.design @ w) - (state.psi[l] + cfg.tau - 0.5) / sigma_psi
    z = prox_math.prox_smooth_abs(alpha, 1.0 / (2.0 * sigma_psi), mu)
    if not np.all(np.isfinite(z)):
        raise DivergenceError(state.k, f"z at node {l}")
    return z


def update_edge(l: int, j: int, state: SolverState, cfg: SolverConfig,
                e_idx: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Minimiza ω·Σ f(g_lj − g_jl, μ) + os termos aumentados das duas cópias.
    Com r = w_l + ξ_lj/σξ e s = w_j + ξ_jl/σξ: ponto médio m = (r+s)/2 e
    diferença e = prox(r − s, 2ω/σξ, μ); g_lj = m + e/2, g_jl = m − e/2.

    No acoplamento exato o termo é ω‖g_lj − g_jl‖₁ e o prox vira soft-threshold.
    `e_idx` é a posição de (l, j) em edge_list; sem ele a aresta é procurada.
    """
    if not l < j:
        raise DomainError(f"aresta deve ter l < j, recebido ({l}, {j})")
    if e_idx is None:
        e_idx = state.edge_list.index((l, j))
    elif state.edge_list[e_idx] != (l, j):
        raise DomainError(f"aresta {e_idx} é {state.edge_list[e_idx]}, não ({l}, {j})")
    _, sigma_xi, mu = prox_math.schedule_at(state.k, cfg.schedule)
    r = state.w[l] + state.xi[e_idx, 0] / sigma_xi
    s = state.w[j] + state.xi[e_idx, 1] / sigma_xi
    m = 0.5 * (r + s)
    thresh = 2.0 * _omega(cfg) / sigma_xi
    if cfg.edge_coupling is EdgeCoupling.EXACT:
        e = prox_math.soft_threshold(r - s, thresh)
    else:
        e = prox_math.prox_smooth_abs(r - s, thresh, mu)
    return m + 0.5 * e, m - 0.5 * e


def _psi_step(psi: np.ndarray, z: np.ndarray, w: np.ndarray, node: NodeData, sigma_psi: float) -> np.ndarray:
    return psi + sigma_psi * (z + node.design @ w - node.response)


def _xi_step(xi_e: np.ndarray, w_l: np.ndarray, w_j: np.ndarray, g_e: np.ndarray, sigma_xi: float) -> np.ndarray:
    out = np.empty_like(xi_e)
    out[0] = xi_e[0] + sigma_xi * (w_l - g_e[0])
    out[1] = xi_e[1] + sigma_xi * (w_j - g_e[1])
    return out


def update_duals(state: SolverState, data: Sequence[NodeData], graph: Graph, cfg: SolverConfig) -> SolverState:
    """Ascensão dual de Ψ e ξ com os primais atuais e o cronograma da iteração em curso."""
    sigma_psi, sigma_xi, _ = prox_math.schedule_at(state.k, cfg.schedule)
    out = state.copy()
    out.psi = [_psi_step(state.psi[l], state.z[l], state.w[l], data[l], sigma_psi) for l in range(state.num_nodes)]
    for e, (l, j) in enumerate(graph.edge_list):
        out.xi[e] = _xi_step(state.xi[e], state.w[l], state.w[j], state.g[e], sigma_xi)
    return out


def _node_block(l: int, state: SolverState, data: Sequence[NodeData], graph: Graph,
                cfg: SolverConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    sigma_psi, _, _ = prox_math.schedule_at(state.k, cfg.schedule)
    w = update_w_node(l, state, data, graph, cfg)
    z = update_z_node(l, state, data, cfg, w_l=w)
    psi = _psi_step(state.psi[l], z, w, data[l], sigma_psi)
    if not np.all(np.isfinite(psi)):
        raise DivergenceError(state.k, f"psi at node {l}")
    return w, z, psi


def _edge_block(e: int, state: SolverState, cfg: SolverConfig) -> Tuple[np.ndarray, np.ndarray]:
    l, j = state.edge_list[e]
    _, sigma_xi, _ = prox_math.schedule_at(state.k, cfg.schedule)
    g_own, g_nb = update_edge(l, j, state, cfg, e_idx=e)
    g_e = np.stack([g_own, g_nb])
    xi_e = _xi_step(state.xi[e], state.w[l], state.w[j], g_e, sigma_xi)
    if not (np.all(np.isfinite(g_e)) and np.all(np.isfinite(xi_e))):
        raise DivergenceError(state.k, f"edge ({l}, {j})")
    return g_e, xi_e


# ---------------------------------------------------------------------------
# Diagnósticos
# ---------------------------------------------------------------------------

def _current_schedule(state: SolverState, cfg: SolverConfig) -> Tuple[float, float, float]:
    return prox_math.schedule_at(max(state.k - 1, 0), cfg.schedule)


def _primal_residual(state: SolverState, data: Sequence[NodeData]) -> float:
    return max(
        float(np.linalg.norm(state.z[l] + data[l].design @ state.w[l] - data[l].response))
        for l in range(state.num_nodes)
    )


def _consensus_residual(state: SolverState) -> float:
    if not state.edge_list:
        return 0.0
    ls = [l for l, _ in state.edge_list]
    js = [j for _, j in state.edge_list]
    return float(np.abs(state.w[ls] - state.w[js]).max())


def _check_loss_stationarity(z: np.ndarray, psi: np.ndarray, tau: float, mu: float) -> np.ndarray:
    target = -psi
    at_kink = np.abs(z) <= mu
    kink_dist = np.maximum(np.maximum((tau - 1.0) - target, target - tau), 0.0)
    smooth_dist = np.abs(target - np.where(z > 0, tau, tau - 1.0))
    return np.where(at_kink, kink_dist, smooth_dist)


def _penalty_stationarity(vec: np.ndarray, w: np.ndarray, M: int, penalty: PenaltySpec) -> np.ndarray:
    P = w.shape[0] - 1
    slopes, vs = w[:P], vec[:P]
    at_zero = np.maximum(np.abs(vs) - M * penalty.lam, 0.0)
    away = np.abs(vs + M * prox_math.penalty_derivative(slopes, penalty))
    out = np.where(slopes == 0.0, at_zero, away)
    return np.append(out, abs(vec[P]))


def kkt_residuals(state: SolverState, data: Sequence[NodeData], graph: Graph, cfg: SolverConfig) -> KKTResiduals:
    """
    primal = max_l ‖z_l + X w_l − y‖₂; consensus = max_e ‖w_l − w_j‖∞;
    stationarity = max_l dist(−(XᵀΨ_l + Σξ_own), M_l·∂P(w_l)) + max_{l,i} dist(−Ψ_{l,i}, ∂ρ_τ(z_{l,i})).
    Componentes com |z| ≤ μ contam como no bico, intervalo [τ−1, τ].
    """
    _, _, mu = _current_schedule(state, cfg)
    w_part, z_part = 0.0, 0.0
    for l in range(state.num_nodes):
        node = data[l]
        vec = node.design.T @ state.psi[l]
        for e, side in graph.incidence[l]:
            vec = vec + state.xi[e, side]
        w_part = max(w_part, float(_penalty_stationarity(vec, state.w[l], node.num_samples, cfg.penalty).max()))
        if node.num_samples:
            z_part = max(z_part, float(_check_loss_stationarity(state.z[l], state.psi[l], cfg.tau, mu).max()))
    return KKTResiduals(
        primal=_primal_residual(state, data),
        consensus=_consensus_residual(state),
        stationarity=w_part + z_part,
    )


def objective(state: SolverState, data: Sequence[NodeData], cfg: SolverConfig) -> float:
    """Σ ρ_τ(z) + Σ_l M_l·P(w_l) + ω·Σ_e ‖g_lj − g_jl‖₁, sem suavização."""
    P = state.w.shape[1] - 1
    total = 0.0
    for l in range(state.num_nodes):
        total += float(np.sum(prox_math.check_loss(state.z[l], cfg.tau)))
        total += data[l].num_samples * float(np.sum(prox_math.penalty_value(state.w[l, :P], cfg.penalty)))
    if state.g.shape[0]:
        total += _omega(cfg) * float(np.abs(state.g[:, 0] - state.g[:, 1]).sum())
    return total


def augmented_lagrangian(state: SolverState, data: Sequence[NodeData], graph: Graph, cfg: SolverConfig) -> float:
    """Lagrangiano aumentado aproximado no estado e no cronograma correntes."""
    sigma_psi, sigma_xi, mu = _current_schedule(state, cfg)
    P = state.w.shape[1] - 1
    total = 0.0
    for l in range(state.num_nodes):
        node = data[l]
        z = state.z[l]
        smoothed = 0.5 * (prox_math.smooth_abs(z, mu) + (2.0 * cfg.tau - 1.0) * z)
        total += float(np.sum(smoothed))
        total += node.num_samples * float(np.sum(prox_math.penalty_value(state.w[l, :P], cfg.penalty)))
        r = z + node.design @ state.w[l] - node.response
        total += float(state.psi[l] @ r) + 0.5 * sigma_psi * float(r @ r)
    omega = _omega(cfg) if state.g.shape[0] else 0.0
    exact = cfg.edge_coupling is EdgeCoupling.EXACT
    for e, (l, j) in enumerate(graph.edge_list):
        diff = state.g[e, 0] - state.g[e, 1]
        total += omega * float(np.sum(np.abs(diff) if exact else prox_math.smooth_abs(diff, mu)))
        for side, node_idx in ((0, l), (1, j)):
            gap = state.w[node_idx] - state.g[e, side]
            total += float(state.xi[e, side] @ gap) + 0.5 * sigma_xi * float(gap @ gap)
    return total


def penalized_objective(w: np.ndarray, data: Sequence[NodeData], tau: float, penalty: PenaltySpec) -> float:
    """Objetivo centralizado Σ_l Σ_i ρ_τ(y − x̄ᵀw) + n·P(w), com n o total de amostras."""
    w = np.asarray(w, dtype=float)
    P = w.shape[0] - 1
    n = sum(d.num_samples for d in data)
    loss = sum(float(np.sum(prox_math.check_loss(d.response - d.design @ w, tau))) for d in data)
    return loss + n * float(np.sum(prox_math.penalty_value(w[:P], penalty)))


def consensus_estimate(state: SolverState) -> np.ndarray:
    return state.w.mean(axis=0)


def _record(prev: SolverState, state: SolverState, data: Sequence[NodeData], graph: Graph,
            cfg: SolverConfig) -> IterationRecord:
    kkt = kkt_residuals(state, data, graph, cfg)
    return IterationRecord(
        k=state.k,
        objective=objective(state, data, cfg),
        aug_lagrangian=augmented_lagrangian(state, data, graph, cfg),
        primal_residual=kkt.primal,
        consensus_residual=kkt.consensus,
        stationarity_residual=kkt.stationarity,
        w_step=float(np.linalg.norm(state.w - prev.w, axis=1).max()),
    )


# ---------------------------------------------------------------------------
# Iteração e laço externo
# ---------------------------------------------------------------------------

def iterate(state: SolverState, data: Sequence[NodeData], graph: Graph, cfg: SolverConfig,
            executor: Optional[Executor] = None) -> Tuple[SolverState, IterationRecord]:
    """Uma varredura completa: blocos de nó, barreira, blocos de aresta; k → k+1."""
    cfg = resolve_config(cfg, data)
    mapper = executor.map if executor is not None else map

    node_results = list(mapper(lambda l: _node_block(l, state, data, graph, cfg), range(state.num_nodes)))
    mid = SolverState(
        w=np.stack([r[0] for r in node_results]),
        z=[r[1] for r in node_results],
        psi=[r[2] for r in node_results],
        g=state.g.copy(),
        xi=state.xi.copy(),
        k=state.k,
        edge_list=state.edge_list,
    )

    edge_results = list(mapper(lambda e: _edge_block(e, mid, cfg), range(len(mid.edge_list))))
    for e, (g_e, xi_e) in enumerate(edge_results):
        mid.g[e] = g_e
        mid.xi[e] = xi_e
    mid.k = state.k + 1

    record = _record(state, mid, data, graph, cfg)
    values = record.model_dump(exclude_none=True)
    if not all(math.isfinite(v) for v in values.values()):
        raise DivergenceError(mid.k, "diagnostics")
    return mid, record


def _tolerance_met(record: IterationRecord, cfg: SolverConfig) -> bool:
    if cfg.consensus_tol == 0 and cfg.stationarity_tol == 0:
        return False
    return (
        record.consensus_residual <= cfg.consensus_tol
        and record.stationarity_residual <= cfg.stationarity_tol
        and record.primal_residual <= cfg.stationarity_tol
    )


def run(
    cfg: SolverConfig,
    data: Sequence[NodeData],
    graph: Graph,
    callback: Optional[Observer] = None,
    node_workers: int = 1,
    enforce_conditions: bool = True,
    label: str = "DSAD",
) -> Tuple[SolverState, List[IterationRecord], str]:
    """
    Itera até max_iterations ("budget") ou até consenso, estacionariedade e
    resíduo primal ficarem abaixo das tolerâncias ("tolerance").
    """
    report = validate_config(cfg, data, graph)
    if enforce_conditions and not report.passed:
        raise ConfigValidationError(report.violations, report)
    cfg = resolve_config(cfg, data)

    state = init_state(graph, data)
    records: List[IterationRecord] = []
    reason = "budget"
    logger.info(
        f"🚀 [DSAD] {label}: L={graph.num_nodes}, arestas={graph.num_edges}, "
        f"omega={_omega(cfg):.4g}, K_aquecimento={report.warmup_iteration}, "
        f"arestas {cfg.edge_coupling.value}, mu_min={cfg.schedule.mu_min:g}"
    )

    executor = ThreadPoolExecutor(max_workers=node_workers) if node_workers > 1 else None
    try:
        while state.k < cfg.max_iterations:
            try:
                state, record = iterate(state, data, graph, cfg, executor=executor)
            except DivergenceError as exc:
                exc.last_record = records[-1] if records else None
                logger.error(f"💥 [DSAD] {label}: {exc}", exc_info=True)
                raise
            records.append(record)
            if callback is not None:
                callback(state, record)
            if record.k % cfg.log_every == 0:
                logger.info(
                    f"🔁 [DSAD] {label} k={record.k} obj={record.objective:.6g} "
                    f"consenso={record.consensus_residual:.3e} estac={record.stationarity_residual:.3e}"
                )
            else:
                logger.debug(f"[DSAD] {label} k={record.k} passo={record.w_step:.3e}")
            if _tolerance_met(record, cfg):
                reason = "tolerance"
                break
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    logger.info(f"✅ [DSAD] {label}: término por {reason} após {state.k} iterações")
    return state, records, reason
