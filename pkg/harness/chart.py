"""Gráficos SVG das curvas de comparação e do layout da rede."""

import logging
from pathlib import Path
from typing import Optional, Union

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import networkx as nx
import pandas as pd
import seaborn as sns

from core.topology import Graph

logger = logging.getLogger(__name__)

# SVG reprodutível: ids com sal fixo e sem data no metadado
matplotlib.rcParams["svg.hashsalt"] = "dsad-quantile"
SVG_METADATA = {"Date": None}

METRIC_TITLES = {
    "mse": "MSE",
    "recog": "Recognition accuracy",
    "net_mse": "Network MSE",
}


def _save_svg(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight", metadata=SVG_METADATA)
    plt.close(fig)
    return path


def plot_metric_curves(curves: pd.DataFrame, metric: str, path: Union[str, Path],
                       log_scale: Optional[bool] = None) -> Path:
    """Uma linha por algoritmo (coluna `alg`) da métrica em função de k."""
    sns.set_theme(style="whitegrid")
    sns.set_palette(sns.color_palette("tab10"))
    fig, ax = plt.subplots(figsize=(8, 5))
    sns.lineplot(data=curves, x="k", y=metric, hue="alg", ax=ax)
    if log_scale is None:
        log_scale = metric != "recog"
    if log_scale and (curves[metric] > 0).all():
        ax.set_yscale("log")
    ax.set_title(METRIC_TITLES.get(metric, metric))
    ax.set_xlabel("iteration")
    plt.tight_layout()
    out = _save_svg(fig, path)
    logger.info(f"📊 [Chart] {METRIC_TITLES.get(metric, metric)} salvo em {out}")
    return out


def plot_topology(graph: Graph, path: Union[str, Path]) -> Path:
    """Posições dos nós (quando conhecidas) e arestas."""
    sns.set_theme(style="white")
    fig, ax = plt.subplots(figsize=(6, 6))
    g = graph.to_networkx()
    if graph.coordinates is not None:
        pos = {l: tuple(graph.coordinates[l]) for l in range(graph.num_nodes)}
    else:
        pos = nx.circular_layout(g)
    nx.draw_networkx(g, pos=pos, ax=ax, node_size=120, font_size=7, labels={l: l + 1 for l in g.nodes})
    ax.set_aspect("equal")
    ax.set_title(f"L={graph.num_nodes}, |E|={graph.num_edges}")
    out = _save_svg(fig, path)
    logger.info(f"📊 [Chart] Topologia salva em {out}")
    return out
