"""
Leitura dos arquivos de experimento (chave=valor) e dos ajustes de processo
vindos do ambiente.
"""

import os
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import dotenv_values, load_dotenv
from pydantic import ValidationError

from schemas import ExperimentConfig
from utils.errors import ConfigValidationError

load_dotenv()

logger = logging.getLogger(__name__)

ENV_WORKER_KEYS = {
    "DSAD_NODE_WORKERS": "node_workers",
    "DSAD_TRIAL_WORKERS": "trial_workers",
}


def _describe(exc: ValidationError) -> list:
    out = []
    for err in exc.errors():
        key = ".".join(str(part) for part in err["loc"]) or "config"
        out.append(f"{key}: {err['msg']}")
    return out


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Lê o arquivo plano; linhas sem '=' ou com valor vazio são erro."""
    path = Path(path)
    if not path.is_file():
        raise ConfigValidationError([f"arquivo de configuração não encontrado: {path}"])
    raw = dotenv_values(path, interpolate=False)
    empty = [key for key, value in raw.items() if value is None or value.strip() == ""]
    if empty:
        raise ConfigValidationError([f"{key}: valor ausente" for key in empty])
    return {key: value.strip() for key, value in raw.items()}


def env_overrides() -> Dict[str, int]:
    out = {}
    for env_key, field_name in ENV_WORKER_KEYS.items():
        value = os.getenv(env_key)
        if value:
            try:
                out[field_name] = int(value)
            except ValueError:
                raise ConfigValidationError([f"{env_key}: inteiro esperado, recebido {value!r}"])
    return out


def build_experiment_config(values: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    merged = dict(values)
    merged.update(env_overrides())
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as exc:
        violations = _describe(exc)
        logger.error(f"❌ [Config] Configuração inválida: {'; '.join(violations)}")
        raise ConfigValidationError(violations) from exc


def load_experiment_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Carrega e valida um arquivo de experimento. `overrides` (flags do CLI)
    e as variáveis DSAD_*_WORKERS têm precedência sobre o arquivo.
    """
    cfg = build_experiment_config(read_config_file(path), overrides)
    logger.info(f"⚙️ [Config] {path}: L={cfg.num_nodes}, P={cfg.num_features}, trials={cfg.trials}, seed={cfg.base_seed}")
    return cfg
