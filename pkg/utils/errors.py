"""Exceções do projeto. Todas carregam contexto suficiente para o CLI reportar."""

from typing import Any, List, Optional


class DomainError(ValueError):
    """Argumento escalar fora do domínio (τ ∉ (0,1), passo ≤ 0, μ ≤ 0...)."""


class DegenerateDataError(ValueError):
    """Dados que tornam o problema mal posto (coluna nula, dimensões inconsistentes, vazio)."""


class InfeasibleTopologyError(RuntimeError):
    """Orçamento de reamostragem esgotado sem satisfazer a restrição indicada."""

    def __init__(self, constraint: str, attempts: int):
        self.constraint = constraint
        self.attempts = attempts
        super().__init__(f"Topologia inviável após {attempts} tentativas: {constraint}")


class ConfigValidationError(ValueError):
    """Configuração rejeitada. `violations` lista as desigualdades violadas."""

    def __init__(self, violations: List[str], report: Optional[Any] = None):
        self.violations = list(violations)
        self.report = report
        super().__init__("; ".join(self.violations) or "configuração inválida")


class DivergenceError(RuntimeError):
    """Valor não finito durante a iteração k."""

    def __init__(self, k: int, where: str, last_record: Optional[Any] = None):
        self.k = k
        self.where = where
        self.last_record = last_record
        super().__init__(f"Divergência na iteração {k} ({where}): valor não finito")
