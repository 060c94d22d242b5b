"""
Dados sintéticos do protocolo de simulação: desenho AR(1) gaussiano,
coeficientes esparsos, ruído gaussiano e o vetor verdadeiro aumentado
[β; q_τ] usado nas métricas.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Tuple

import numpy as np
from scipy.stats import norm

from utils.errors import DegenerateDataError, DomainError

logger = logging.getLogger(__name__)


@dataclass
class NodeData:
    """X⁽ˡ⁾ com a coluna de intercepto (última, toda 1) e y⁽ˡ⁾."""
    design: np.ndarray
    response: np.ndarray

    def __post_init__(self):
        self.design = np.asarray(self.design, dtype=float)
        self.response = np.asarray(self.response, dtype=float)
        if self.design.ndim != 2 or self.design.shape[0] < 1:
            raise DegenerateDataError("design deve ser uma matriz com pelo menos uma linha")
        if self.response.shape != (self.design.shape[0],):
            raise DegenerateDataError(
                f"response com forma {self.response.shape} não casa com design {self.design.shape}"
            )
        if not np.all(self.design[:, -1] == 1.0):
            raise DegenerateDataError("última coluna do design deve ser o intercepto (toda 1)")
        if not (np.all(np.isfinite(self.design)) and np.all(np.isfinite(self.response))):
            raise DegenerateDataError("dados com valores não finitos")

    @property
    def num_samples(self) -> int:
        return self.design.shape[0]

    @property
    def num_features(self) -> int:
        return self.design.shape[1] - 1

    @cached_property
    def column_sq_norms(self) -> np.ndarray:
        return np.einsum("ij,ij->j", self.design, self.design)


@dataclass(frozen=True)
class GroundTruth:
    coefficients: np.ndarray
    active_set: Tuple[int, ...]
    noise_std: float
    tau_quantile_offset: float = 0.0


def normal_quantile(u: float) -> float:
    """Φ⁻¹(u)."""
    if not 0.0 < u < 1.0:
        raise DomainError(f"quantil deve estar em (0,1), recebido {u}")
    return float(norm.ppf(u))


def gen_design(M: int, P: int, corr: float, seed: int) -> np.ndarray:
    """
    Linhas i.i.d. N(0, Σ) com Σ_pq = corr^|p−q|, pela recursão AR(1)
    x_1 = e_1, x_p = corr·x_{p−1} + √(1−corr²)·e_p (exata para essa covariância).
    """
    if M < 1 or P < 1:
        raise DomainError(f"M e P devem ser positivos (M={M}, P={P})")
    if not 0.0 <= corr < 1.0:
        raise DomainError(f"corr deve estar em [0,1), recebido {corr}")
    rng = np.random.default_rng(seed)
    e = rng.standard_normal((M, P))
    x = np.empty_like(e)
    x[:, 0] = e[:, 0]
    scale = np.sqrt(1.0 - corr * corr)
    for p in range(1, P):
        x[:, p] = corr * x[:, p - 1] + scale * e[:, p]
    return x


def gen_node_data(design: np.ndarray, truth: GroundTruth, seed: int) -> NodeData:
    """y = Xβ + ε, ε ~ N(0, noise_std²); acrescenta a coluna de intercepto."""
    design = np.asarray(design, dtype=float)
    if design.ndim != 2 or design.shape[1] != truth.coefficients.shape[0]:
        raise DegenerateDataError(
            f"design com {design.shape[-1]} colunas, esperado {truth.coefficients.shape[0]}"
        )
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, truth.noise_std, size=design.shape[0])
    response = design @ truth.coefficients + noise
    augmented = np.column_stack([design, np.ones(design.shape[0])])
    return NodeData(design=augmented, response=response)


def true_augmented_w(truth: GroundTruth, tau: float) -> np.ndarray:
    """[β; noise_std·Φ⁻¹(τ)]."""
    if not 0.0 < tau < 1.0:
        raise DomainError(f"tau deve estar em (0,1), recebido {tau}")
    return np.append(truth.coefficients, truth.noise_std * normal_quantile(tau))


def sparse_truth(
    P: int,
    num_active: int,
    value: float,
    noise_std: float,
    seed: int,
    tau: float = 0.5,
) -> GroundTruth:
    if not 0 <= num_active <= P:
        raise DomainError(f"num_active deve estar em [0, {P}], recebido {num_active}")
    rng = np.random.default_rng(seed)
    support = tuple(sorted(int(p) for p in rng.choice(P, size=num_active, replace=False)))
    coefficients = np.zeros(P)
    coefficients[list(support)] = value
    if value == 0:
        support = ()
    return GroundTruth(
        coefficients=coefficients,
        active_set=support,
        noise_std=noise_std,
        tau_quantile_offset=noise_std * normal_quantile(tau),
    )


def generate_network_data(
    L: int,
    M: int,
    corr: float,
    truth: GroundTruth,
    design_seed: int,
    noise_seed: int,
) -> List[NodeData]:
    """Um NodeData por nó; o nó l usa design_seed + l e noise_seed + l."""
    P = truth.coefficients.shape[0]
    data = [
        gen_node_data(gen_design(M, P, corr, design_seed + l), truth, noise_seed + l)
        for l in range(L)
    ]
    logger.info(f"🧪 [Data] {L} nós x {M} amostras, P={P}, suporte={list(truth.active_set)}")
    return data
