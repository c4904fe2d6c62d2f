from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
import pytest
import scipy.sparse as sps

import folnerspec as fsp
from folnerspec.operators import (
    OrbitTable,
    Product,
    Star,
    random_orbit_operator,
)
from folnerspec.pattern import canonical_positions
from folnerspec.utils import ConfigError, LimitExceededError, patch_limits


if TYPE_CHECKING:
    from folnerspec.graph import (
        DecoratedLattice,
        InfiniteGraph,
        LatticeGraph,
        PendantChain,
    )


def test_adjacency_and_identity(z2: LatticeGraph) -> None:
    adj = fsp.adjacency_operator(z2)
    assert adj.radius == adj.pattern_radius == 1
    assert adj.sup_entry == 1
    assert fsp.entry(adj, (0, 0), (0, 1)) == 1
    assert fsp.entry(adj, (0, 0), (1, 1)) == 0
    assert fsp.entry(adj, (0, 0), (40, 40)) == 0
    eye = fsp.identity_operator(z2)
    assert eye.radius == 0
    assert eye.row((3, 3)) == {(3, 3): 1}


def test_laplacian_rows(z1: LatticeGraph) -> None:
    lap = fsp.laplacian_operator(z1)
    assert lap.row((0,)) == {(-1,): -1, (0,): 2, (1,): -1}
    assert lap.radius == 1
    assert fsp.sup_entry(lap) == 3
    assert fsp.norm_bound(lap) == 12


def test_operator_algebra(pendant: PendantChain) -> None:
    adj = fsp.adjacency_operator(pendant)
    eye = fsp.identity_operator(pendant)
    sq = adj @ adj
    assert isinstance(sq, Product)
    assert sq.radius == 2
    # (A^2)(x, x) = deg(x)
    assert sq.row((0, 0))[(0, 0)] == 4
    assert sq.row((0, 1))[(0, 1)] == 1
    # the two leaves of a cell are joined by a 2-walk through their backbone vertex
    assert sq.entry((0, 1), (0, 2)) == 1

    shifted = adj - Fraction(1, 2) * eye
    assert shifted.entry((0, 0), (0, 0)) == Fraction(-1, 2)
    assert shifted.entry((0, 0), (1, 0)) == 1
    assert (-adj).entry((0, 0), (1, 0)) == -1
    assert fsp.add(adj, eye).sup_entry == 2
    assert fsp.scale("3/2", adj).sup_entry == Fraction(3, 2)
    assert fsp.mul(adj, adj).sup_entry == fsp.max_ball_size(1, 4)

    with pytest.raises(ValueError, match="different graphs"):
        fsp.add(adj, fsp.adjacency_operator(fsp.pendant_chain(3)))


def test_star(decorated: DecoratedLattice) -> None:
    op_c = random_orbit_operator(decorated, 1, 3, seed=3)
    op_c_star = fsp.star(op_c)
    assert isinstance(op_c_star, Star)
    assert op_c_star.pattern_radius == 2
    for x in fsp.folner_window(decorated, 2):
        for y in fsp.ball(decorated, x, 1).vertices:
            assert op_c_star.entry(x, y) == op_c.entry(y, x)
    assert op_c.star().to_dict() == {"op": "star", "operand": op_c.to_dict()}


def test_degree_and_letter_potentials() -> None:
    g = fsp.substitution_chain()
    letters = fsp.letter_potential(g, {"a": 1, "b": "-1/2"})
    assert letters.radius == 0
    assert letters.sup_entry == 1
    assert letters.row((1,)) == {(1,): Fraction(-1, 2)}
    assert letters.row((0,)) == {(0,): 1}
    assert fsp.degree_potential(g).row((5,)) == {(5,): 2}
    # zero entries are not stored
    assert fsp.letter_potential(g, {"a": 1}).row((1,)) == {}


def test_pattern_potential(pendant: PendantChain) -> None:
    counts = fsp.pattern_census(pendant, fsp.folner_window(pendant, 2), 1)
    backbone = next(code for code in counts if code.root_degree == 4)
    pot = fsp.pattern_potential(pendant, 1, {backbone: "5/2"})
    assert pot.row((7, 0)) == {(7, 0): Fraction(5, 2)}
    assert pot.row((7, 1)) == {}
    assert pot.to_dict() == {
        "op": "potential",
        "radius": 1,
        "table": {backbone.hex(): "5/2"},
    }
    with pytest.raises(ValueError, match="Mixed-radius table"):
        fsp.pattern_potential(pendant, 2, {backbone: 1})


def test_orbit_table_operator(z2: LatticeGraph) -> None:
    code = fsp.canonical_code(fsp.ball(z2, (0, 0), 1))
    op_a = fsp.orbit_table_operator(z2, 1, {(code, 0): 4, (code, 1): -1})
    assert op_a.row((2, 2)) == {
        (2, 2): 4,
        (1, 2): -1,
        (3, 2): -1,
        (2, 1): -1,
        (2, 3): -1,
    }
    with pytest.raises(ValueError, match="Invalid orbit index 2, valid are \\[0, 1\\]"):
        fsp.orbit_table_operator(z2, 1, {(code, 2): 1})
    with pytest.raises(ValueError, match="radius must be 2"):
        fsp.orbit_table_operator(z2, 2, {(code, 0): 1})


def test_random_gram_is_positive(decorated: DecoratedLattice) -> None:
    gram = fsp.random_gram_operator(decorated, 1, 3, seed=0)
    section = fsp.finite_section(gram, fsp.folner_window(decorated, 3))
    assert section.is_symmetric()
    assert section.integer_scale() == 1
    eigs = np.linalg.eigvalsh(section.to_dense())
    assert eigs.min() >= -1e-9


def test_validate_invariance(any_graph: InfiniteGraph) -> None:
    ops = [
        fsp.adjacency_operator(any_graph),
        fsp.laplacian_operator(any_graph),
        fsp.random_gram_operator(any_graph, 1, 2, seed=1),
    ]
    window = fsp.folner_window(any_graph, 3)
    for op_a in ops:
        report = fsp.validate_invariance(op_a, window, samples=3, seed=0)
        assert report.passed, report.violations[:3]
        assert report.n_codes >= 1
        assert report.n_pairs == 3 * report.n_codes
        assert report.n_isomorphisms >= report.n_pairs
        assert report.n_checks > 0


def test_validate_invariance_negative_control(z2: LatticeGraph) -> None:
    rooted = fsp.ball(z2, (0, 0), 1)
    code = fsp.canonical_code(rooted)
    # distinct values on the 4 symmetric neighbors break pattern invariance
    table = {(code, pos): Fraction(pos) for pos in range(5)}
    broken = OrbitTable(z2, 1, table)
    report = fsp.validate_invariance(broken, fsp.folner_window(z2, 2), samples=2)
    assert not report.passed
    vio = report.violations[0]
    assert vio.value != vio.image_value
    assert set(canonical_positions(rooted).values()) == set(range(5))


def test_window_trace(z1: LatticeGraph) -> None:
    lap = fsp.laplacian_operator(z1)
    window = fsp.folner_window(z1, 4)
    assert fsp.window_trace(lap, window) == 2
    assert fsp.window_trace(fsp.adjacency_operator(z1), window) == 0


def test_finite_section(z1: LatticeGraph) -> None:
    lap = fsp.laplacian_operator(z1)
    section = fsp.finite_section(lap, fsp.folner_window(z1, 2))
    assert len(section) == 5
    assert section.nnz == 13
    assert section.entry(0, 0) == 2
    assert section.entry(0, 1) == -1
    assert section.entry(0, 4) == 0
    assert section.is_symmetric()
    dense = section.to_dense()
    expected = 2 * np.eye(5) - np.eye(5, k=1) - np.eye(5, k=-1)
    np.testing.assert_array_equal(dense, expected)
    sparse = section.to_sparse()
    assert sps.issparse(sparse)
    np.testing.assert_array_equal(sparse.toarray(), expected)
    assert section.source == {
        "op": "add",
        "terms": [
            {"op": "degree"},
            {"op": "scale", "coeff": "-1", "operand": {"op": "adjacency"}},
        ],
    }
    assert list(section.iter_entries())[:2] == [(0, 0, 2), (0, 1, -1)]


def test_finite_section_rational(pendant: PendantChain) -> None:
    op_a = fsp.scale("1/3", fsp.adjacency_operator(pendant)) + fsp.scale(
        "1/2", fsp.identity_operator(pendant)
    )
    section = fsp.finite_section(op_a, fsp.folner_window(pendant, 1))
    assert section.integer_scale() == 6
    scale, rows = section.scaled_int_rows()
    assert scale == 6
    assert rows[0] == {0: 3, 1: 2, 2: 2, 3: 2}
    mat = section.to_rational_matrix()
    assert mat[0, 1] == Fraction(1, 3)


def test_power_trace_matches_float(decorated: DecoratedLattice) -> None:
    degree = fsp.degree_potential(decorated)
    op_a = fsp.adjacency_operator(decorated) + fsp.scale("1/2", degree)
    section = fsp.finite_section(op_a, fsp.folner_window(decorated, 2))
    dense = section.to_dense()
    for k in (1, 2, 3, 4):
        exact = section.power_trace(k)
        assert float(exact) == pytest.approx(np.trace(np.linalg.matrix_power(dense, k)))
    with pytest.raises(ValueError, match="Invalid k=0"):
        section.power_trace(0)


def test_quadratic_form(z1: LatticeGraph) -> None:
    section = fsp.finite_section(fsp.laplacian_operator(z1), fsp.folner_window(z1, 1))
    vec = [Fraction(1), Fraction(1, 2), Fraction(-1)]
    # (1 - 1/2)^2 + (1/2 + 1)^2 + 1^2 + 1^2 with Dirichlet ends
    assert section.quadratic_form(vec) == Fraction(1, 4) + Fraction(9, 4) + 1 + 1
    with pytest.raises(ValueError, match="Vector length 2"):
        section.quadratic_form(vec[:2])


def test_section_limits(z1: LatticeGraph) -> None:
    section = fsp.finite_section(fsp.adjacency_operator(z1), fsp.folner_window(z1, 5))
    with patch_limits(exact_limit=10), pytest.raises(LimitExceededError):
        section.to_rational_matrix()
    with patch_limits(dense_limit=10), pytest.raises(LimitExceededError):
        section.to_dense()


def test_norm_bound_dominates(any_graph: InfiniteGraph) -> None:
    op_a = fsp.laplacian_operator(any_graph) @ fsp.adjacency_operator(any_graph)
    section = fsp.finite_section(op_a, fsp.folner_window(any_graph, 3))
    radius = np.abs(np.linalg.eigvals(section.to_dense())).max()
    assert radius <= float(fsp.norm_bound(op_a))
    assert all(
        abs(val) <= op_a.sup_entry for _, _, val in section.iter_entries()
    )


@pytest.mark.parametrize(
    "tree",
    [
        {"op": "adjacency"},
        {"op": "laplacian"},
        {"op": "scale", "coeff": "-2/3", "operand": {"op": "degree"}},
        {"op": "mul", "factors": [{"op": "adjacency"}, {"op": "identity"}]},
        {"op": "star", "operand": {"op": "adjacency"}},
    ],
)
def test_operator_from_dict(z2: LatticeGraph, tree: dict) -> None:
    op_a = fsp.operator_from_dict(tree, z2)
    rebuilt = fsp.operator_from_dict(op_a.to_dict(), z2)
    for x in fsp.folner_window(z2, 1):
        assert rebuilt.row(x) == op_a.row(x)


def test_operator_from_dict_tables() -> None:
    g = fsp.substitution_chain()
    tree = {
        "op": "add",
        "terms": [
            {"op": "adjacency"},
            {"op": "letters", "table": {"a": "1", "b": "-1"}},
            {"op": "identity"},
        ],
    }
    op_a = fsp.operator_from_dict(tree, g)
    assert op_a.row((0,)) == {(-1,): 1, (0,): 2, (1,): 1}
    assert op_a.row((1,)) == {(0,): 1, (2,): 1}
    assert op_a.to_dict() == tree

    gram = fsp.operator_from_dict(
        {"op": "random_gram", "radius": 1, "level": 4, "seed": 9}, g
    )
    same = fsp.random_gram_operator(g, 1, 4, seed=9)
    assert gram.row((3,)) == same.row((3,))


def test_operator_from_dict_orbits(z2: LatticeGraph) -> None:
    code = fsp.canonical_code(fsp.ball(z2, (0, 0), 1))
    tree = {"op": "orbit_table", "radius": 1, "orbits": {f"{code.hex()}:1": "1/4"}}
    op_a = fsp.operator_from_dict(tree, z2)
    assert op_a.row((0, 0)) == dict.fromkeys(z2.neighbors((0, 0)), Fraction(1, 4))
    rebuilt = fsp.operator_from_dict(op_a.to_dict(), z2)
    assert rebuilt.row((1, 1)) == op_a.row((1, 1))


@pytest.mark.parametrize(
    ("tree", "location"),
    [
        ([], "operator"),
        ({"op": "hamiltonian"}, "operator.op"),
        ({"op": "mul", "factors": []}, "operator.factors"),
        (
            {"op": "add", "terms": [{"op": "adjacency"}, {"op": "nope"}]},
            "operator.terms[1].op",
        ),
        ({"op": "letters", "table": {"a": 0.5}}, "operator.table.a"),
        ({"op": "potential", "radius": "1", "table": {}}, "operator.radius"),
        ({"op": "orbit_table", "radius": 1, "orbits": {"abc": 1}}, "operator.orbits"),
        ({"op": "scale", "operand": {"op": "identity"}}, "operator"),
    ],
)
def test_operator_from_dict_errors(
    z2: LatticeGraph, tree: object, location: str
) -> None:
    with pytest.raises(ConfigError) as exc_info:
        fsp.operator_from_dict(tree, z2)
    assert exc_info.value.location == location
