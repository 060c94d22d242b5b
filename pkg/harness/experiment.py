"""
Orquestração dos experimentos: geração dos datasets por trial, execução de um
algoritmo sobre todos os trials, comparação pareada dos três algoritmos e
validação das condições de convergência.

Layout de saída (sob `output_dir`):
    data/trial_XXX/       grafo, nós, manifesto e topology.svg
    <algoritmo>/          trial_XXX_log.csv, trial_XXX_state.npz, summary.csv
    compare/              curves.csv, mse.svg, recog.svg, net_mse.svg, summary_<alg>.csv
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import router
from core import metrics, synth_data, topology
from core.synth_data import GroundTruth, NodeData
from core.topology import Graph
from harness import chart, storage
from schemas import CommandResult, ExperimentConfig, IterationRecord, Manifest, TrialSummary
from solvers import dsad_solver
from utils.errors import ConfigValidationError

logger = logging.getLogger(__name__)

ROLE_TAGS = {"topology": 1, "design": 2, "noise": 3, "support": 4}
CURVE_METRICS = ("mse", "recog", "net_mse")
DSAD_ALGORITHMS = ("dsad_mcp", "dsad_scad")


@dataclass
class TrialData:
    trial: int
    graph: Graph
    data: List[NodeData]
    truth: GroundTruth
    manifest: Manifest

    @property
    def true_w(self) -> np.ndarray:
        return np.append(self.truth.coefficients, self.truth.tau_quantile_offset)


def trial_seeds(base_seed: int, trial: int) -> Dict[str, int]:
    """Sementes independentes por papel, derivadas de (base_seed, trial, tag)."""
    return {
        role: int(np.random.SeedSequence([base_seed, trial, tag]).generate_state(1)[0])
        for role, tag in ROLE_TAGS.items()
    }


def data_root(exp: ExperimentConfig) -> Path:
    return Path(exp.output_dir) / "data"


def build_trial(exp: ExperimentConfig, trial: int) -> TrialData:
    seeds = trial_seeds(exp.base_seed, trial)
    graph = topology.random_geometric_graph(
        exp.num_nodes, exp.side, exp.radius, exp.degree_min, exp.degree_max, seeds["topology"]
    )
    truth = synth_data.sparse_truth(
        exp.num_features, exp.num_active, exp.coef_value, exp.noise_std, seeds["support"], tau=exp.tau
    )
    data = synth_data.generate_network_data(
        exp.num_nodes, exp.samples_per_node, exp.corr, truth, seeds["design"], seeds["noise"]
    )
    manifest = Manifest(
        trial=trial,
        num_features=exp.num_features,
        num_nodes=exp.num_nodes,
        samples_per_node=[d.num_samples for d in data],
        truth=truth.coefficients.tolist(),
        active_set=list(truth.active_set),
        noise_std=exp.noise_std,
        tau=exp.tau,
        tau_offset=truth.tau_quantile_offset,
        seeds=seeds,
    )
    return TrialData(trial=trial, graph=graph, data=data, truth=truth, manifest=manifest)


def load_or_build_trial(exp: ExperimentConfig, trial: int) -> TrialData:
    """Reaproveita o dataset gravado por `generate` quando existir; senão gera em memória."""
    directory = storage.trial_dir(data_root(exp), trial)
    if not storage.has_dataset(directory):
        return build_trial(exp, trial)
    graph, data, manifest = storage.read_dataset(directory)
    truth = GroundTruth(
        coefficients=np.asarray(manifest.truth, dtype=float),
        active_set=tuple(manifest.active_set),
        noise_std=manifest.noise_std,
        tau_quantile_offset=manifest.tau_offset,
    )
    return TrialData(trial=trial, graph=graph, data=data, truth=truth, manifest=manifest)


# ---------------------------------------------------------------------------
# Execução de um trial
# ---------------------------------------------------------------------------

def _metric_observer(td: TrialData, activity_eps: float):
    true_w = td.true_w
    P = td.manifest.num_features
    support = td.truth.active_set

    def observe(k: int, estimates: np.ndarray, record: IterationRecord) -> None:
        record.mse = metrics.mse(estimates, true_w)
        record.network_mse = metrics.network_mse(estimates)
        record.recognition_accuracy = metrics.recognition_accuracy(estimates, support, P, activity_eps)

    return observe


def run_trial(exp: ExperimentConfig, algorithm: str, trial: int) -> Tuple[TrialSummary, List[IterationRecord], Optional[dsad_solver.SolverState]]:
    td = load_or_build_trial(exp, trial)
    result = router.run_algorithm(algorithm, exp, td.data, td.graph, observer=_metric_observer(td, exp.activity_eps))
    report = metrics.metric_report(
        result.estimates, td.true_w, td.truth.active_set, td.data, exp.tau, exp.activity_eps
    )
    summary = TrialSummary(
        trial=trial,
        algorithm=result.algorithm,
        label=result.label,
        mse=report.mse,
        network_mse=report.network_mse,
        recognition_accuracy=report.recognition_accuracy,
        quantile_coverage_gap=report.quantile_coverage_gap,
        iterations=len(result.records),
        termination=result.termination,
        omega=result.omega,
    )
    logger.info(
        f"🏁 [Harness] trial {trial} {result.label}: mse={report.mse:.4g} "
        f"recog={report.recognition_accuracy:.3f} ({result.termination})"
    )
    return summary, result.records, result.state


def _trial_worker(args):
    exp, algorithm, trial = args
    return run_trial(exp, algorithm, trial)


def run_trials(exp: ExperimentConfig, algorithm: str) -> List[Tuple[TrialSummary, List[IterationRecord], Optional[dsad_solver.SolverState]]]:
    jobs = [(exp, algorithm, t) for t in range(exp.trials)]
    if exp.trial_workers > 1 and exp.trials > 1:
        with ProcessPoolExecutor(max_workers=exp.trial_workers) as pool:
            return list(pool.map(_trial_worker, jobs))
    return [_trial_worker(job) for job in jobs]


def validate_trials(exp: ExperimentConfig, algorithms: Sequence[str]) -> Dict[str, object]:
    """Valida as condições de convergência em todos os trials; levanta na primeira rejeição."""
    details: Dict[str, object] = {}
    violations: List[str] = []
    for trial in range(exp.trials):
        td = load_or_build_trial(exp, trial)
        for algorithm in algorithms:
            cfg = router.solver_config_for(exp, algorithm, td.data)
            report = dsad_solver.validate_config(cfg, td.data, td.graph)
            details[f"trial_{trial:03d}/{algorithm}"] = report.model_dump()
            violations.extend(f"trial {trial} {algorithm}: {v}" for v in report.violations)
    if violations:
        raise ConfigValidationError(violations, details)
    return details


# ---------------------------------------------------------------------------
# Comandos
# ---------------------------------------------------------------------------

def cmd_generate(exp: ExperimentConfig) -> CommandResult:
    outputs: List[str] = []
    for trial in range(exp.trials):
        td = build_trial(exp, trial)
        directory = storage.trial_dir(data_root(exp), trial)
        outputs += [str(p) for p in storage.write_dataset(directory, td.graph, td.data, td.manifest)]
        outputs.append(str(chart.plot_topology(td.graph, directory / "topology.svg")))
    logger.info(f"💾 [Harness] {exp.trials} dataset(s) gravado(s) em {data_root(exp)}")
    return CommandResult(status="ok", command="generate", message=f"{exp.trials} trial(s) gerado(s)", outputs=outputs)


def cmd_run(exp: ExperimentConfig, algorithm: str) -> CommandResult:
    algorithm = router.normalize_algorithm(algorithm)
    if algorithm in DSAD_ALGORITHMS:
        validate_trials(exp, [algorithm])

    results = run_trials(exp, algorithm)
    out_dir = Path(exp.output_dir) / algorithm
    outputs: List[str] = []
    for summary, records, state in results:
        outputs.append(str(storage.write_iteration_log(out_dir / f"trial_{summary.trial:03d}_log.csv", records)))
        if state is not None:
            outputs.append(str(storage.save_checkpoint(state, out_dir / f"trial_{summary.trial:03d}_state.npz")))
    summaries = [s for s, _, _ in results]
    outputs.append(str(storage.write_summary(out_dir / "summary.csv", summaries)))

    mean_recog = float(np.mean([s.recognition_accuracy for s in summaries]))
    mean_mse = float(np.mean([s.mse for s in summaries]))
    return CommandResult(
        status="ok",
        command="run",
        message=f"{router.label_for(algorithm)}: mse médio {mean_mse:.4g}, acurácia média {mean_recog:.3f}",
        outputs=outputs,
        details={"algorithm": algorithm, "mean_mse": mean_mse, "mean_recognition_accuracy": mean_recog},
    )


def mean_curves(label: str, per_trial: Sequence[Sequence[IterationRecord]]) -> pd.DataFrame:
    """Média sobre trials por iteração; um trial que parou antes repete o último valor."""
    horizon = max((len(r) for r in per_trial), default=0)
    stacks = {m: [] for m in CURVE_METRICS}
    for records in per_trial:
        if not records:
            continue
        values = {
            "mse": [r.mse for r in records],
            "recog": [r.recognition_accuracy for r in records],
            "net_mse": [r.network_mse for r in records],
        }
        for m, series in values.items():
            stacks[m].append(series + [series[-1]] * (horizon - len(series)))
    frame = pd.DataFrame({"k": np.arange(1, horizon + 1), "alg": label})
    for m in CURVE_METRICS:
        frame[m] = np.mean(stacks[m], axis=0) if stacks[m] else np.nan
    return frame


def cmd_compare(exp: ExperimentConfig) -> CommandResult:
    """DSAD-MCP, DSAD-SCAD e o baseline sobre as mesmas sementes (comparação pareada)."""
    validate_trials(exp, DSAD_ALGORITHMS)
    out_dir = Path(exp.output_dir) / "compare"
    frames = []
    outputs: List[str] = []
    details: Dict[str, object] = {}
    for algorithm in router.ALGORITHM_MAPPING:
        results = run_trials(exp, algorithm)
        label = router.label_for(algorithm)
        frames.append(mean_curves(label, [records for _, records, _ in results]))
        summaries = [s for s, _, _ in results]
        outputs.append(str(storage.write_summary(out_dir / f"summary_{algorithm}.csv", summaries)))
        details[algorithm] = {
            "mse": float(np.mean([s.mse for s in summaries])),
            "recognition_accuracy": float(np.mean([s.recognition_accuracy for s in summaries])),
            "network_mse": float(np.mean([s.network_mse for s in summaries])),
        }

    curves = pd.concat(frames, ignore_index=True)[["k", "alg", *CURVE_METRICS]]
    out_dir.mkdir(parents=True, exist_ok=True)
    curves_path = out_dir / "curves.csv"
    curves.to_csv(curves_path, index=False, float_format=storage.FLOAT_FORMAT)
    outputs.append(str(curves_path))
    for metric in CURVE_METRICS:
        outputs.append(str(chart.plot_metric_curves(curves, metric, out_dir / f"{metric}.svg")))
    return CommandResult(status="ok", command="compare", message="comparação concluída", outputs=outputs, details=details)


def cmd_validate(exp: ExperimentConfig) -> CommandResult:
    details = validate_trials(exp, DSAD_ALGORITHMS)
    first = details[f"trial_000/{DSAD_ALGORITHMS[0]}"]
    message = f"condições satisfeitas: omega={first['omega']:.6g}, K={first['warmup_iteration']}"
    logger.info(f"✅ [Harness] {message}")
    return CommandResult(status="ok", command="validate", message=message, details=details)
