"""
Grafo não direcionado dos agentes: construção geométrica aleatória,
topologias determinísticas, validação e arquivo de lista de arestas.

Índices de nó são 0-based em memória; o arquivo usa 1-based.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import networkx as nx
import numpy as np
from scipy.spatial.distance import pdist, squareform

from schemas import TopologyReport
from utils.errors import DomainError, InfeasibleTopologyError

logger = logging.getLogger(__name__)

MAX_RESAMPLE_ATTEMPTS = 10_000

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """
    Grafo imutável. `adjacency[l]` é a lista ordenada de vizinhos de l e
    `edge_list` traz cada aresta uma vez como (l, j) com l < j, em ordem
    lexicográfica. O construtor não valida; use `from_edges` ou `validate`.
    """
    num_nodes: int
    adjacency: Tuple[Tuple[int, ...], ...]
    edge_list: Tuple[Edge, ...]
    coordinates: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @classmethod
    def from_edges(cls, num_nodes: int, edges, coordinates: Optional[np.ndarray] = None) -> "Graph":
        canonical = sorted({(min(l, j), max(l, j)) for l, j in edges if l != j})
        neighbors: List[List[int]] = [[] for _ in range(num_nodes)]
        for l, j in canonical:
            neighbors[l].append(j)
            neighbors[j].append(l)
        return cls(
            num_nodes=num_nodes,
            adjacency=tuple(tuple(sorted(n)) for n in neighbors),
            edge_list=tuple(canonical),
            coordinates=coordinates,
        )

    @property
    def num_edges(self) -> int:
        return len(self.edge_list)

    def degree(self, l: int) -> int:
        return len(self.adjacency[l])

    @cached_property
    def edge_position(self) -> Dict[Edge, int]:
        return {edge: e for e, edge in enumerate(self.edge_list)}

    @cached_property
    def incidence(self) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
        """Para cada nó, pares (índice da aresta, lado): lado 0 se o nó é o menor índice."""
        out: List[List[Tuple[int, int]]] = [[] for _ in range(self.num_nodes)]
        for e, (l, j) in enumerate(self.edge_list):
            out[l].append((e, 0))
            out[j].append((e, 1))
        return tuple(tuple(items) for items in out)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.num_nodes))
        for l, neighbors in enumerate(self.adjacency):
            g.add_edges_from((l, j) for j in neighbors)
        return g


def _geometric_edges(positions: np.ndarray, radius: float) -> List[Edge]:
    dist = squareform(pdist(positions))
    rows, cols = np.nonzero(np.triu(dist <= radius, k=1))
    return list(zip(rows.tolist(), cols.tolist()))


def random_geometric_graph(
    L: int,
    side: float,
    radius: float,
    degree_min: int,
    degree_max: int,
    seed: int,
) -> Graph:
    """
    Nós uniformes em [0, side]², aresta sse distância ≤ radius. Reamostra o
    posicionamento inteiro até o grafo ser conexo e todos os graus estarem em
    [degree_min, degree_max]; arestas nunca são podadas.
    """
    if L < 2:
        raise DomainError(f"L deve ser >= 2, recebido {L}")
    if not radius > 0 or not side > 0:
        raise DomainError("side e radius devem ser positivos")
    if not 1 <= degree_min <= degree_max < L:
        raise DomainError(f"limites de grau inválidos: 1 <= {degree_min} <= {degree_max} < {L}")

    rng = np.random.default_rng(seed)
    failures: Counter = Counter()
    for attempt in range(1, MAX_RESAMPLE_ATTEMPTS + 1):
        positions = rng.uniform(0.0, side, size=(L, 2))
        graph = Graph.from_edges(L, _geometric_edges(positions, radius), coordinates=positions)
        degrees = [graph.degree(l) for l in range(L)]
        if not nx.is_connected(graph.to_networkx()):
            failures["connectivity"] += 1
            continue
        if min(degrees) < degree_min or max(degrees) > degree_max:
            failures[f"degree in [{degree_min}, {degree_max}]"] += 1
            continue
        logger.info(f"🕸️ [Topology] Grafo geométrico com {L} nós e {graph.num_edges} arestas após {attempt} tentativa(s)")
        return graph

    constraint = failures.most_common(1)[0][0]
    logger.error(f"❌ [Topology] Nenhum posicionamento válido: {dict(failures)}")
    raise InfeasibleTopologyError(constraint, MAX_RESAMPLE_ATTEMPTS)


def complete_graph(L: int) -> Graph:
    if L < 2:
        raise DomainError(f"L deve ser >= 2, recebido {L}")
    return Graph.from_edges(L, nx.complete_graph(L).edges())


def path_graph(L: int) -> Graph:
    if L < 2:
        raise DomainError(f"L deve ser >= 2, recebido {L}")
    return Graph.from_edges(L, nx.path_graph(L).edges())


def validate(g: Graph) -> TopologyReport:
    """Verifica laços, simetria, duplicatas, lista de arestas e conectividade (BFS)."""
    L = g.num_nodes
    if len(g.adjacency) != L:
        return TopologyReport(passed=False, violation="adjacency size differs from num_nodes")
    for l, neighbors in enumerate(g.adjacency):
        if l in neighbors:
            return TopologyReport(passed=False, violation=f"self-loop at node {l}")
        if len(set(neighbors)) != len(neighbors):
            return TopologyReport(passed=False, violation=f"duplicate edge at node {l}")
        for j in neighbors:
            if not 0 <= j < L:
                return TopologyReport(passed=False, violation=f"neighbor {j} of node {l} out of range")
            if l not in g.adjacency[j]:
                return TopologyReport(passed=False, violation=f"asymmetry: {j} in N_{l} but {l} not in N_{j}")

    expected = tuple((l, j) for l in range(L) for j in sorted(g.adjacency[l]) if j > l)
    if tuple(g.edge_list) != expected:
        return TopologyReport(passed=False, violation="edge_list inconsistent with adjacency")

    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for l in frontier:
            for j in g.adjacency[l]:
                if j not in seen:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
    if len(seen) != L:
        return TopologyReport(passed=False, violation=f"disconnected: {L - len(seen)} node(s) unreachable from node 0")
    return TopologyReport(passed=True)


def write_edge_list(g: Graph, path: Union[str, Path]) -> None:
    """Primeira linha L, depois um par `l j` (1-based) por aresta, ordenado."""
    lines = [str(g.num_nodes)] + [f"{l + 1} {j + 1}" for l, j in g.edge_list]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path: Union[str, Path]) -> Graph:
    rows = [line.split() for line in Path(path).read_text().splitlines() if line.strip()]
    if not rows:
        raise DomainError(f"arquivo de grafo vazio: {path}")
    L = int(rows[0][0])
    edges = [(int(l) - 1, int(j) - 1) for l, j in rows[1:]]
    return Graph.from_edges(L, edges)
