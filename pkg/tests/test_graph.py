from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import networkx as nx
import pytest

import folnerspec as fsp
from folnerspec.graph import (
    DecoratedLattice,
    LatticeGraph,
    PendantChain,
    SubstitutionChain,
    check_levels,
    fibonacci_letter,
    outer_boundary,
    window_edges,
)
from folnerspec.utils import LimitExceededError, UnsupportedGeneratorError, patch_limits


if TYPE_CHECKING:
    from folnerspec.graph import InfiniteGraph


def to_networkx(g: InfiniteGraph, n: int) -> nx.Graph:
    """Induced subgraph of g on its level-n box."""
    window = fsp.folner_window(g, n)
    graph = nx.Graph()
    graph.add_nodes_from(window.vertices)
    graph.add_edges_from(window_edges(g, window))
    return graph


def test_neighbors_symmetric_and_sorted(any_graph: InfiniteGraph) -> None:
    for vertex in fsp.folner_window(any_graph, 3):
        nbrs = any_graph.neighbors(vertex)
        assert list(nbrs) == sorted(nbrs)
        assert len(nbrs) <= any_graph.max_degree
        assert vertex not in nbrs
        for nbr in nbrs:
            assert vertex in any_graph.neighbors(nbr)


def test_descriptor_round_trip(any_graph: InfiniteGraph) -> None:
    rebuilt = fsp.graph_from_descriptor(any_graph.descriptor)
    assert rebuilt == any_graph
    assert hash(rebuilt) == hash(any_graph)
    window = fsp.folner_window(any_graph, 2)
    vertex = window.vertices[len(window) // 2]
    assert rebuilt.neighbors(vertex) == any_graph.neighbors(vertex)


@pytest.mark.parametrize(
    ("descriptor", "match"),
    [
        ({"generator": "penrose"}, "Unknown generator name='penrose'"),
        ({"generator": "lattice", "params": {}}, "Invalid params"),
        ({"generator": "lattice", "params": {"dim": 4}}, "Invalid self.dim=4"),
        ({"generator": "pendant_chain", "params": {"k": "two"}}, "Invalid params"),
    ],
)
def test_graph_from_descriptor_raises(descriptor: dict, match: str) -> None:
    with pytest.raises(UnsupportedGeneratorError, match=match):
        fsp.graph_from_descriptor(descriptor)


def test_lattice_graph() -> None:
    z2 = fsp.lattice_graph(2)
    assert z2.neighbors((0, 0)) == ((-1, 0), (0, -1), (0, 1), (1, 0))
    assert z2.max_degree == 4
    assert z2.descriptor == {"generator": "lattice", "params": {"dim": 2}, "seed": None}
    with pytest.raises(ValueError, match="expected 2 coordinates"):
        fsp.ball(z2, (0,), 1)
    with pytest.raises(ValueError, match="must be a tuple of ints"):
        fsp.ball(z2, [0, 0], 1)


def test_decorated_lattice() -> None:
    g = fsp.decorated_lattice("1/2", seed=42)
    assert isinstance(g, DecoratedLattice)
    assert g.p == Fraction(1, 2)
    assert g.params == {"p": "1/2"}
    # the diagonal of cell (a, b) is seen consistently from both endpoints
    for cell_a in range(-3, 3):
        for cell_b in range(-3, 3):
            has_diag = g.has_diagonal(cell_a, cell_b)
            nbrs = g.neighbors((cell_a, cell_b))
            assert ((cell_a + 1, cell_b + 1) in nbrs) == has_diag
    # same seed, same graph regardless of query order
    other = fsp.decorated_lattice(Fraction(1, 2), seed=42)
    assert [other.has_diagonal(a, 0) for a in range(10, -10, -1)] == [
        g.has_diagonal(a, 0) for a in range(10, -10, -1)
    ]
    assert not fsp.decorated_lattice(0, seed=1).has_diagonal(0, 0)
    assert fsp.decorated_lattice(1, seed=1).degree((5, -5)) == 6

    with pytest.raises(ValueError, match="Invalid p=3/2"):
        fsp.decorated_lattice("3/2", seed=0)


def test_decorated_lattice_density() -> None:
    g = fsp.decorated_lattice("1/3", seed=7)
    n_diag = sum(g.has_diagonal(a, b) for a in range(-30, 30) for b in range(-30, 30))
    assert n_diag / 3600 == pytest.approx(1 / 3, abs=0.03)


def test_pendant_chain() -> None:
    g = fsp.pendant_chain(3)
    assert isinstance(g, PendantChain)
    assert g.neighbors((0, 0)) == ((-1, 0), (0, 1), (0, 2), (0, 3), (1, 0))
    assert g.neighbors((4, 2)) == ((4, 0),)
    assert g.max_degree == 5
    assert len(fsp.folner_window(g, 2)) == 5 * 4
    with pytest.raises(ValueError, match="Invalid k=1"):
        fsp.pendant_chain(1)
    with pytest.raises(ValueError, match="slot <= 3"):
        g.check_vertex((0, 4))


def test_substitution_chain() -> None:
    g = fsp.substitution_chain()
    assert isinstance(g, SubstitutionChain)
    word = "".join(g.label((x,)) for x in range(13))
    assert word == "abaababaabaab"
    assert fibonacci_letter(-1) in "ab"
    # letter frequency of b is 1/phi^2
    n_b = sum(fibonacci_letter(x) == "b" for x in range(-500, 500))
    assert n_b / 1000 == pytest.approx(0.381966, abs=0.002)
    assert "bb" not in "".join(fibonacci_letter(x) for x in range(-200, 200))


@pytest.mark.parametrize(
    ("levels", "valid"),
    [([1, 2, 4], True), ([], False), ([2, 2], False), ([3, 1], False), ([0, 1], False)],
)
def test_check_levels(levels: list[int], valid: bool) -> None:
    if valid:
        assert check_levels(levels) == levels
    else:
        with pytest.raises(ValueError, match="strictly increasing"):
            check_levels(levels)


def test_folner_window(z2: LatticeGraph) -> None:
    window = fsp.folner_window(z2, 2)
    assert len(window) == 25
    assert window.level == 2
    assert window.vertices == tuple(sorted(window.vertices))
    assert window.index[(-2, -2)] == 0
    assert (0, 0) in window
    assert (3, 0) not in window
    with pytest.raises(ValueError, match="Invalid level n=0"):
        fsp.folner_window(z2, 0)
    with pytest.raises(ValueError, match="lexicographic"):
        fsp.Window(((1,), (0,)), level=1)


def test_ball_matches_networkx(any_graph: InfiniteGraph) -> None:
    big = to_networkx(any_graph, 8)
    for vertex in fsp.folner_window(any_graph, 2).vertices[::3]:
        rooted = fsp.ball(any_graph, vertex, 2)
        expected = nx.single_source_shortest_path_length(big, vertex, cutoff=2)
        assert rooted.distances == expected
        assert rooted.root == vertex
        sub = big.subgraph(expected)
        assert len(rooted.edges) == sub.number_of_edges()
        assert all(sub.has_edge(u, w) for u, w in rooted.edges)


def test_ball_limits(z1: LatticeGraph) -> None:
    assert len(fsp.ball(z1, (0,), 0)) == 1
    with pytest.raises(ValueError, match="Invalid radius r=-1"):
        fsp.ball(z1, (0,), -1)
    with patch_limits(max_ball_radius=3), pytest.raises(LimitExceededError):
        fsp.ball(z1, (0,), 4)


def test_graph_distance(decorated: DecoratedLattice) -> None:
    big = to_networkx(decorated, 9)
    lengths = dict(nx.all_pairs_shortest_path_length(big, cutoff=4))
    window = fsp.folner_window(decorated, 3)
    for x in window.vertices[::5]:
        for y in window.vertices[::4]:
            expected = lengths[x].get(y)
            assert fsp.graph_distance(decorated, x, y, 4) == expected
            assert expected is None or decorated.distance_lower_bound(x, y) <= expected


@pytest.mark.parametrize(("n", "a", "expected"), [(5, 1, 2), (5, 3, 6), (2, 9, 5)])
def test_inner_boundary_z1(z1: LatticeGraph, n: int, a: int, expected: int) -> None:
    window = fsp.folner_window(z1, n)
    assert len(fsp.inner_boundary(z1, window, a)) == expected


def test_inner_boundary_z2(z2: LatticeGraph) -> None:
    window = fsp.folner_window(z2, 4)
    assert outer_boundary(z2, window) == {
        vertex
        for vertex in fsp.folner_window(z2, 5)
        if max(map(abs, vertex)) == 5 and min(map(abs, vertex)) < 5
    }
    assert len(fsp.inner_boundary(z2, window, 1)) == 8 * 4
    assert len(fsp.inner_boundary(z2, window, 2)) == 8 * 4 + 8 * 3
    assert fsp.boundary_ratio(z2, window, 1) == Fraction(32, 81)
    with pytest.raises(ValueError, match="Invalid a=0"):
        fsp.inner_boundary(z2, window, 0)


def test_inner_boundary_matches_distances(pendant: PendantChain) -> None:
    window = fsp.folner_window(pendant, 4)
    outside = [vtx for vtx in fsp.folner_window(pendant, 8) if vtx not in window]
    for a in (1, 2, 3):
        expected = {
            x
            for x in window
            if any(fsp.graph_distance(pendant, x, y, a) is not None for y in outside)
        }
        assert fsp.inner_boundary(pendant, window, a) == expected


def test_folner_property(any_graph: InfiniteGraph) -> None:
    ratios = [
        fsp.boundary_ratio(any_graph, fsp.folner_window(any_graph, n), 2)
        for n in (2, 4, 8)
    ]
    assert ratios == sorted(ratios, reverse=True)
    assert ratios[-1] < ratios[0]


@pytest.mark.parametrize(
    ("r", "d", "expected"), [(0, 4, 1), (1, 4, 5), (2, 2, 5), (2, 4, 17), (3, 6, 187)]
)
def test_max_ball_size(r: int, d: int, expected: int) -> None:
    assert fsp.max_ball_size(r, d) == expected


def test_max_ball_size_bounds_balls(any_graph: InfiniteGraph) -> None:
    bound = fsp.max_ball_size(2, any_graph.max_degree)
    for vertex in fsp.folner_window(any_graph, 2):
        assert len(fsp.ball(any_graph, vertex, 2)) <= bound


def test_lattice_graph_class() -> None:
    assert fsp.lattice_graph(3) == LatticeGraph(3)
    assert fsp.lattice_graph(3).degree((0, 0, 0)) == 6
