import networkx as nx
import pytest

from core import topology
from core.topology import Graph
from utils.errors import DomainError, InfeasibleTopologyError


def test_complete_and_path_graphs():
    g = topology.complete_graph(4)
    assert g.num_edges == 6
    assert all(g.degree(l) == 3 for l in range(4))
    assert topology.validate(g).passed

    p = topology.path_graph(3)
    assert p.edge_list == ((0, 1), (1, 2))
    assert p.adjacency == ((1,), (0, 2), (1,))


def test_incidence_marks_own_copy_side():
    p = topology.path_graph(3)
    assert p.incidence[0] == ((0, 0),)
    assert p.incidence[1] == ((0, 1), (1, 0))
    assert p.incidence[2] == ((1, 1),)


def test_random_geometric_graph_respects_constraints():
    g = topology.random_geometric_graph(8, 1.3, 0.8, 2, 7, seed=3)
    assert topology.validate(g).passed
    assert nx.is_connected(g.to_networkx())
    assert all(2 <= g.degree(l) <= 7 for l in range(8))
    assert g.coordinates.shape == (8, 2)


def test_random_geometric_graph_is_deterministic():
    a = topology.random_geometric_graph(10, 2.0, 0.9, 1, 9, seed=42)
    b = topology.random_geometric_graph(10, 2.0, 0.9, 1, 9, seed=42)
    assert a.edge_list == b.edge_list


def test_random_geometric_graph_edges_follow_radius():
    g = topology.random_geometric_graph(12, 2.0, 0.8, 1, 11, seed=8)
    pos = g.coordinates
    for l in range(12):
        for j in range(l + 1, 12):
            close = ((pos[l] - pos[j]) ** 2).sum() ** 0.5 <= 0.8
            assert close == ((l, j) in g.edge_position)


def test_random_geometric_graph_infeasible():
    with pytest.raises(InfeasibleTopologyError) as info:
        topology.random_geometric_graph(10, 10.0, 0.01, 1, 9, seed=0)
    assert "connectivity" in str(info.value)


@pytest.mark.parametrize("args", [(1, 1.0, 0.5, 1, 1), (5, 1.0, 0.5, 1, 5), (5, 1.0, 0.5, 3, 2), (5, 1.0, 0.0, 1, 4)])
def test_random_geometric_graph_rejects_arguments(args):
    with pytest.raises(DomainError):
        topology.random_geometric_graph(*args, seed=0)


def test_validate_reports_violations():
    self_loop = Graph(num_nodes=2, adjacency=((0, 1), (0,)), edge_list=((0, 1),))
    assert "self-loop" in topology.validate(self_loop).violation

    asymmetric = Graph(num_nodes=2, adjacency=((1,), ()), edge_list=((0, 1),))
    assert "asymmetry" in topology.validate(asymmetric).violation

    duplicate = Graph(num_nodes=2, adjacency=((1, 1), (0, 0)), edge_list=((0, 1),))
    assert "duplicate" in topology.validate(duplicate).violation

    disconnected = Graph.from_edges(4, [(0, 1), (2, 3)])
    report = topology.validate(disconnected)
    assert not report.passed
    assert report.violation.startswith("disconnected")


def test_edge_list_file_round_trip(tmp_path):
    g = topology.path_graph(3)
    path = tmp_path / "graph.txt"
    topology.write_edge_list(g, path)
    assert path.read_text().splitlines() == ["3", "1 2", "2 3"]
    assert topology.read_edge_list(path) == g
