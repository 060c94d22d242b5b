import math
from pathlib import Path

import numpy as np
import pytest

from core import synth_data, topology
from schemas import PenaltyKind, PenaltySpec, Schedule, SolverConfig

TINY_CONFIG = {
    "num_nodes": "4",
    "side": "1.0",
    "radius": "0.9",
    "degree_min": "1",
    "degree_max": "3",
    "samples_per_node": "30",
    "num_features": "4",
    "corr": "0.5",
    "num_active": "2",
    "coef_value": "1.0",
    "noise_std": "0.2",
    "tau": "0.75",
    "lambda": "0.055",
    "gamma_mcp": "2.4",
    "gamma_scad": "3.7",
    "beta": "1.0",
    "c": "auto",
    "d": "auto",
    "omega": "auto",
    "max_iterations": "25",
    "consensus_tol": "1e-4",
    "stationarity_tol": "1e-4",
    "trials": "2",
    "base_seed": "11",
    "log_every": "10",
}


@pytest.fixture
def mcp():
    return PenaltySpec(kind=PenaltyKind.MCP, lam=0.055, gamma=2.4)


@pytest.fixture
def scad():
    return PenaltySpec(kind=PenaltyKind.SCAD, lam=0.055, gamma=3.7)


@pytest.fixture
def path3():
    return topology.path_graph(3)


@pytest.fixture
def complete3():
    return topology.complete_graph(3)


def make_network(L: int, M: int, P: int, seed: int = 0, num_active: int = 2, noise_std: float = 0.2, tau: float = 0.5):
    truth = synth_data.sparse_truth(P, num_active, 1.0, noise_std, seed, tau=tau)
    data = synth_data.generate_network_data(L, M, 0.5, truth, design_seed=seed + 100, noise_seed=seed + 200)
    return data, truth


@pytest.fixture
def small_network():
    """L=3, P=3, M=20."""
    data, truth = make_network(3, 20, 3, seed=5)
    return data, truth


def make_solver_config(data, penalty, tau=0.5, max_iterations=50, **kwargs) -> SolverConfig:
    from solvers.dsad_solver import compute_omega

    M = max(d.num_samples for d in data)
    omega = kwargs.pop("omega", None) or compute_omega(data, tau, penalty.lam, M)
    beta = kwargs.pop("beta", 1.0)
    mu_min = kwargs.pop("mu_min", 0.0)
    schedule = Schedule(c=math.sqrt(1.5) / beta, d=math.sqrt(20.0) * omega / beta, beta=beta, mu_min=mu_min)
    return SolverConfig(
        tau=tau,
        penalty=penalty,
        schedule=schedule,
        omega=omega,
        max_iterations=max_iterations,
        **kwargs,
    )


def write_config(directory: Path, name: str = "tiny.cfg", **overrides) -> Path:
    values = dict(TINY_CONFIG)
    values["output_dir"] = str(directory / "out")
    for key, value in overrides.items():
        if value is None:
            values.pop(key, None)
        else:
            values[key] = str(value)
    path = directory / name
    path.write_text("\n".join(f"{k}={v}" for k, v in values.items()) + "\n")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
