"""
Formatos de arquivo do harness: diretório de dataset por trial (grafo, um
CSV por nó, manifesto), logs de iteração, resumos e checkpoints de estado.
"""

import json
import logging
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from core.synth_data import NodeData
from core.topology import Graph, read_edge_list, write_edge_list
from schemas import IterationRecord, Manifest, TrialSummary
from solvers.dsad_solver import SolverState
from utils.errors import DegenerateDataError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
GRAPH_FILE = "graph.txt"
MANIFEST_FILE = "manifest.json"

PathLike = Union[str, Path]


def trial_dir(root: PathLike, trial: int) -> Path:
    return Path(root) / f"trial_{trial:03d}"


def node_file(directory: PathLike, l: int) -> Path:
    return Path(directory) / f"node_{l + 1:03d}.csv"


def write_dataset(directory: PathLike, graph: Graph, data: Sequence[NodeData], manifest: Manifest) -> List[Path]:
    """Grava grafo, nós (`x_1,…,x_P,y` sem cabeçalho e sem intercepto) e manifesto."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = [directory / GRAPH_FILE]
    write_edge_list(graph, written[0])
    for l, node in enumerate(data):
        rows = np.column_stack([node.design[:, :-1], node.response])
        path = node_file(directory, l)
        pd.DataFrame(rows).to_csv(path, header=False, index=False, float_format=FLOAT_FORMAT)
        written.append(path)
    manifest_path = directory / MANIFEST_FILE
    manifest_path.write_text(manifest.model_dump_json(indent=2) + "\n")
    written.append(manifest_path)
    return written


def has_dataset(directory: PathLike) -> bool:
    directory = Path(directory)
    return (directory / GRAPH_FILE).is_file() and (directory / MANIFEST_FILE).is_file()


def read_dataset(directory: PathLike) -> Tuple[Graph, List[NodeData], Manifest]:
    directory = Path(directory)
    manifest = Manifest.model_validate_json((directory / MANIFEST_FILE).read_text())
    graph = read_edge_list(directory / GRAPH_FILE)
    data = []
    for l in range(manifest.num_nodes):
        rows = pd.read_csv(node_file(directory, l), header=None, float_precision="round_trip").to_numpy(dtype=float)
        if rows.shape[1] != manifest.num_features + 1:
            raise DegenerateDataError(f"{node_file(directory, l)}: {rows.shape[1]} colunas, esperado {manifest.num_features + 1}")
        design = np.column_stack([rows[:, :-1], np.ones(rows.shape[0])])
        data.append(NodeData(design=design, response=rows[:, -1]))
    logger.info(f"📂 [Harness] Dataset lido de {directory}")
    return graph, data, manifest


def records_frame(records: Sequence[IterationRecord]) -> pd.DataFrame:
    columns = list(IterationRecord.model_fields)
    return pd.DataFrame([r.model_dump() for r in records], columns=columns)


def write_iteration_log(path: PathLike, records: Sequence[IterationRecord]) -> Path:
    """Uma linha por iteração com os campos do IterationRecord; campos não aplicáveis ficam vazios."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records_frame(records).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_iteration_log(path: PathLike) -> List[IterationRecord]:
    frame = pd.read_csv(path, float_precision="round_trip")
    out = []
    for row in frame.to_dict(orient="records"):
        clean = {key: (None if pd.isna(value) else getattr(value, "item", lambda: value)()) for key, value in row.items()}
        out.append(IterationRecord.model_validate(clean))
    return out


def write_summary(path: PathLike, summaries: Sequence[TrialSummary]) -> Path:
    """Uma linha por trial e uma linha final `mean` com as médias das colunas numéricas."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([s.model_dump() for s in summaries], columns=list(TrialSummary.model_fields))
    numeric = ["mse", "network_mse", "recognition_accuracy", "quantile_coverage_gap", "iterations", "omega"]
    mean_row = {col: frame[col].astype(float).mean() for col in numeric}
    mean_row.update({
        "trial": "mean",
        "algorithm": frame["algorithm"].iloc[0] if len(frame) else "",
        "label": frame["label"].iloc[0] if len(frame) else "",
        "termination": "",
    })
    frame = pd.concat([frame.astype(object), pd.DataFrame([mean_row])], ignore_index=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def save_checkpoint(state: SolverState, path: PathLike) -> Path:
    """Arquivo .npz único; z e Ψ (por nó, tamanhos distintos) achatados com offsets."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sizes = np.array([z.shape[0] for z in state.z], dtype=np.int64)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    edges = np.array(state.edge_list, dtype=np.int64).reshape(-1, 2)
    with path.open("wb") as fh:
        np.savez(
            fh,
            w=state.w,
            z=np.concatenate(state.z) if state.z else np.zeros(0),
            psi=np.concatenate(state.psi) if state.psi else np.zeros(0),
            offsets=offsets,
            g=state.g,
            xi=state.xi,
            k=np.array(state.k, dtype=np.int64),
            edge_list=edges,
        )
    return path


def load_checkpoint(path: PathLike) -> SolverState:
    with np.load(Path(path)) as archive:
        offsets = archive["offsets"]
        z_flat, psi_flat = archive["z"], archive["psi"]
        bounds = list(zip(offsets[:-1], offsets[1:]))
        return SolverState(
            w=archive["w"].copy(),
            z=[z_flat[a:b].copy() for a, b in bounds],
            psi=[psi_flat[a:b].copy() for a, b in bounds],
            g=archive["g"].copy(),
            xi=archive["xi"].copy(),
            k=int(archive["k"]),
            edge_list=tuple((int(l), int(j)) for l, j in archive["edge_list"]),
        )


def write_json(path: PathLike, payload) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    return path
