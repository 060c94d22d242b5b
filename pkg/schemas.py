from enum import Enum
from typing import Optional, List, Dict, Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class PenaltyKind(str, Enum):
    MCP = "mcp"
    SCAD = "scad"


class PenaltySpec(BaseModel):
    """Penalidade fracamente convexa g_{λ,γ} aplicada coordenada a coordenada."""
    model_config = ConfigDict(frozen=True)

    kind: PenaltyKind
    lam: float = Field(ge=0, description="Nível λ da penalidade")
    gamma: float = Field(description="Parâmetro de concavidade γ (adimensional)")

    @model_validator(mode="after")
    def _check_gamma(self):
        if self.kind is PenaltyKind.MCP and not self.gamma > 1:
            raise ValueError(f"MCP exige gamma > 1 (recebido {self.gamma})")
        if self.kind is PenaltyKind.SCAD and not self.gamma > 2:
            raise ValueError(f"SCAD exige gamma > 2 (recebido {self.gamma})")
        return self


class Schedule(BaseModel):
    """
    Constantes dos cronogramas σΨ = c√(k+1), σξ = d√(k+1), μ = β/√(k+1).
    Com mu_min > 0 a suavização para de encolher em μ = mu_min.
    """
    model_config = ConfigDict(frozen=True)

    c: float = Field(gt=0)
    d: float = Field(gt=0)
    beta: float = Field(gt=0)
    mu_min: float = Field(default=0.0, ge=0)


class EdgeCoupling(str, Enum):
    """Termo ω‖g_lj − g_jl‖₁ das arestas: suavizado por f(·, μ) ou exato (soft-threshold)."""
    SMOOTH = "smooth"
    EXACT = "exact"


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    tau: float = Field(gt=0, lt=1)
    penalty: PenaltySpec
    schedule: Schedule
    omega: Union[float, Literal["auto"]] = "auto"
    max_iterations: int = Field(default=3000, ge=0)
    consensus_tol: float = Field(default=1e-4, ge=0)
    stationarity_tol: float = Field(default=1e-4, ge=0)
    log_every: int = Field(default=500, ge=1)
    edge_coupling: EdgeCoupling = EdgeCoupling.SMOOTH
    zero_tol: float = Field(default=0.0, ge=0, lt=1, description="Folga relativa no limiar tλ do prox da penalidade")

    @model_validator(mode="after")
    def _check_omega(self):
        if self.omega != "auto" and not self.omega > 0:
            raise ValueError(f"omega deve ser positivo ou 'auto' (recebido {self.omega})")
        return self


class BaselineConfig(BaseModel):
    """Baseline simplificado: difusão com pesos de Metropolis + passo de subgradiente."""
    model_config = ConfigDict(frozen=True)

    tau: float = Field(gt=0, lt=1)
    lam: float = Field(ge=0)
    step_c0: float = Field(default=1.0, ge=0)
    step_decay: Literal["inv_sqrt", "inv_k"] = "inv_sqrt"
    combine: Literal["metropolis"] = "metropolis"
    max_iterations: int = Field(default=3000, ge=0)
    log_every: int = Field(default=500, ge=1)


class IterationRecord(BaseModel):
    """Diagnóstico de uma iteração. Campos de métrica são anexados pelo harness."""
    k: int
    objective: float
    aug_lagrangian: Optional[float] = None
    primal_residual: Optional[float] = None
    consensus_residual: float
    stationarity_residual: Optional[float] = None
    w_step: float
    mse: Optional[float] = None
    network_mse: Optional[float] = None
    recognition_accuracy: Optional[float] = None


class KKTResiduals(BaseModel):
    primal: float
    consensus: float
    stationarity: float


class MetricReport(BaseModel):
    mse: float = Field(ge=0)
    network_mse: float = Field(ge=0)
    recognition_accuracy: float = Field(ge=0, le=1)
    quantile_coverage_gap: float


class InequalityCheck(BaseModel):
    name: str
    lhs: float
    rhs: float
    strict: bool = False
    passed: bool


class ValidationReport(BaseModel):
    passed: bool
    violations: List[str] = []
    checks: List[InequalityCheck] = []
    omega: float
    warmup_iteration: Optional[int] = None
    warmup_threshold: Optional[float] = None
    max_samples: int
    unequal_sample_sizes: bool = False
    notes: List[str] = []


class TopologyReport(BaseModel):
    passed: bool
    violation: Optional[str] = None


class Manifest(BaseModel):
    """Manifesto de um conjunto de dados gerado (um por trial)."""
    trial: int
    num_features: int
    num_nodes: int
    samples_per_node: List[int]
    truth: List[float]
    active_set: List[int]
    noise_std: float
    tau: float
    tau_offset: float
    seeds: Dict[str, int]


class TrialSummary(BaseModel):
    trial: int
    algorithm: str
    label: str
    mse: float
    network_mse: float
    recognition_accuracy: float
    quantile_coverage_gap: float
    iterations: int
    termination: str
    omega: Optional[float] = None


class ExperimentConfig(BaseModel):
    """Arquivo de configuração plano (chave=valor). Chaves desconhecidas são erro."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    # topologia
    num_nodes: int = Field(ge=2)
    side: float = Field(gt=0)
    radius: float = Field(gt=0)
    degree_min: int = Field(ge=1)
    degree_max: int = Field(ge=1)
    # dados
    samples_per_node: int = Field(ge=1)
    num_features: int = Field(ge=1)
    corr: float = Field(default=0.5, ge=0, lt=1)
    num_active: int = Field(ge=0)
    coef_value: float = 1.0
    noise_std: float = Field(default=0.2, gt=0)
    # solver
    tau: float = Field(gt=0, lt=1)
    lam: float = Field(alias="lambda", ge=0)
    gamma_mcp: float = Field(default=2.4, gt=1)
    gamma_scad: float = Field(default=3.7, gt=2)
    c: Union[float, Literal["auto"]] = "auto"
    d: Union[float, Literal["auto"]] = "auto"
    beta: float = Field(default=1.0, gt=0)
    mu_min: float = Field(default=0.0, ge=0)
    omega: Union[float, Literal["auto"]] = "auto"
    edge_coupling: EdgeCoupling = EdgeCoupling.SMOOTH
    zero_tol: float = Field(default=0.0, ge=0, lt=1)
    max_iterations: int = Field(ge=0)
    consensus_tol: float = Field(default=1e-4, ge=0)
    stationarity_tol: float = Field(default=1e-4, ge=0)
    activity_eps: float = Field(default=0.0, ge=0)
    # baseline
    baseline_step_c0: float = Field(default=1.0, ge=0)
    baseline_step_decay: Literal["inv_sqrt", "inv_k"] = "inv_sqrt"
    baseline_max_iterations: Optional[int] = Field(default=None, ge=0)
    # protocolo
    trials: int = Field(ge=1)
    base_seed: int = Field(ge=0)
    output_dir: str = "output"
    log_every: int = Field(default=500, ge=1)
    node_workers: int = Field(default=1, ge=1)
    trial_workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_ranges(self):
        if self.degree_min > self.degree_max:
            raise ValueError("degree_min deve ser <= degree_max")
        if self.degree_max >= self.num_nodes:
            raise ValueError("degree_max deve ser < num_nodes")
        if self.num_active > self.num_features:
            raise ValueError("num_active deve ser <= num_features")
        for key in ("c", "d", "omega"):
            value = getattr(self, key)
            if value != "auto" and not value > 0:
                raise ValueError(f"{key} deve ser positivo ou 'auto'")
        return self


class CommandResult(BaseModel):
    """Resposta padronizada dos comandos do harness."""
    status: str
    command: str
    message: Optional[str] = None
    outputs: List[str] = []
    details: Dict[str, Any] = {}
