"""Pattern-invariant operators on infinite graphs: rule trees with exact rational
coefficients, entry evaluation, the *-algebra operations, finite sections, invariance
validation and norm bounds.

Every operator answers row(x) = {y: A(x, y)} (nonzero entries only) from the ball of
radius pattern_radius around x in the infinite graph, so entries never depend on a
window. Rows are cached per operator instance.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np
import scipy.sparse as sps

from folnerspec.enums import RuleOp
from folnerspec.graph import (
    InfiniteGraph,
    ball,
    folner_window,
    graph_distance,
    max_ball_size,
)
from folnerspec.pattern import (
    PatternCode,
    canonical_code,
    canonical_positions,
    isomorphisms,
    orbit_index,
    pattern_census,
)
from folnerspec.utils import LIMITS, ConfigError, LimitExceededError
from folnerspec.utils.data import fraction_str, lcm_denominator, to_fraction


if TYPE_CHECKING:
    from collections.abc import Iterator, Mapping, Sequence

    from folnerspec.exactla import RationalMatrix
    from folnerspec.graph import Window
    from folnerspec.typing import Rational, SparseRow, VertexId

ZERO = Fraction(0)


@dataclass(frozen=True, eq=False)
class PatternOperator(ABC):
    """Pattern-invariant matrix A on the vertices of an infinite graph.

    A(x, y) = 0 whenever d_G(x, y) > radius and row x only depends on the ball of
    radius pattern_radius around x (equal to radius except for adjoints).
    """

    graph: InfiniteGraph
    _rows: dict[VertexId, SparseRow] = field(
        default_factory=dict, init=False, repr=False
    )

    @property
    @abstractmethod
    def radius(self) -> int:
        """Propagation radius r_A."""

    @property
    def pattern_radius(self) -> int:
        """Radius of the ball around x that determines row x."""
        return self.radius

    @property
    @abstractmethod
    def sup_entry(self) -> Fraction:
        """Upper bound m_A on sup_{x,y} |A(x, y)|."""

    @abstractmethod
    def _compute_row(self, x: VertexId) -> SparseRow:
        """Nonzero entries of row x."""

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """JSON rule tree, inverse of operator_from_dict."""

    def row(self, x: VertexId) -> SparseRow:
        """Nonzero entries {y: A(x, y)} (cached)."""
        if (cached := self._rows.get(x)) is None:
            cached = {y: val for y, val in self._compute_row(x).items() if val != 0}
            self._rows[x] = cached
        return cached

    def entry(self, x: VertexId, y: VertexId) -> Fraction:
        """A(x, y), 0 without touching the ball if d_G(x, y) > radius."""
        if graph_distance(self.graph, x, y, self.radius) is None:
            return ZERO
        return self.row(x).get(y, ZERO)

    def __add__(self, other: PatternOperator) -> PatternOperator:
        return add(self, other)

    def __sub__(self, other: PatternOperator) -> PatternOperator:
        return add(self, scale(-1, other))

    def __neg__(self) -> PatternOperator:
        return scale(-1, self)

    def __matmul__(self, other: PatternOperator) -> PatternOperator:
        return mul(self, other)

    def __rmul__(self, coeff: Rational) -> PatternOperator:
        return scale(coeff, self)

    def star(self) -> PatternOperator:
        """Adjoint A*(x, y) = A(y, x) (conjugation is trivial on rationals)."""
        return star(self)


@dataclass(frozen=True, eq=False)
class Adjacency(PatternOperator):
    """1 on edges, 0 elsewhere."""

    @property
    def radius(self) -> int:
        return 1

    @property
    def sup_entry(self) -> Fraction:
        return Fraction(1)

    def _compute_row(self, x: VertexId) -> SparseRow:
        return dict.fromkeys(self.graph.neighbors(x), Fraction(1))

    def to_dict(self) -> dict[str, Any]:
        return {"op": RuleOp.adjacency.value}


@dataclass(frozen=True, eq=False)
class Identity(PatternOperator):
    """Identity matrix."""

    @property
    def radius(self) -> int:
        return 0

    @property
    def sup_entry(self) -> Fraction:
        return Fraction(1)

    def _compute_row(self, x: VertexId) -> SparseRow:
        return {x: Fraction(1)}

    def to_dict(self) -> dict[str, Any]:
        return {"op": RuleOp.identity.value}


@dataclass(frozen=True, eq=False)
class PatternPotential(PatternOperator):
    """Diagonal V(x, x) = table[r-pattern of x], 0 for patterns not in table."""

    r: int
    table: Mapping[PatternCode, Fraction]

    def __post_init__(self) -> None:
        """Keys must all be r-patterns."""
        if radii := {code.radius for code in self.table} - {self.r}:
            raise ValueError(
                f"Mixed-radius table: got radii {sorted(radii)} for potential of "
                f"radius {self.r}"
            )

    @property
    def radius(self) -> int:
        return self.r

    @property
    def sup_entry(self) -> Fraction:
        return max((abs(val) for val in self.table.values()), default=ZERO)

    def _compute_row(self, x: VertexId) -> SparseRow:
        code = canonical_code(ball(self.graph, x, self.r))
        return {x: self.table.get(code, ZERO)}

    def to_dict(self) -> dict[str, Any]:
        return {
            "op": RuleOp.potential.value,
            "radius": self.r,
            "table": {code.hex(): fraction_str(val) for code, val in self.table.items()},
        }


@dataclass(frozen=True, eq=False)
class DegreePotential(PatternOperator):
    """V(x, x) = deg(x), determined by the 1-pattern of x."""

    @property
    def radius(self) -> int:
        return 1

    @property
    def sup_entry(self) -> Fraction:
        return Fraction(self.graph.max_degree)

    def _compute_row(self, x: VertexId) -> SparseRow:
        return {x: Fraction(self.graph.degree(x))}

    def to_dict(self) -> dict[str, Any]:
        return {"op": RuleOp.degree.value}


@dataclass(frozen=True, eq=False)
class LetterPotential(PatternOperator):
    """V(x, x) = table[label(x)], a 0-pattern potential on decorated graphs."""

    table: Mapping[str, Fraction]

    @property
    def radius(self) -> int:
        return 0

    @property
    def sup_entry(self) -> Fraction:
        return max((abs(val) for val in self.table.values()), default=ZERO)

    def _compute_row(self, x: VertexId) -> SparseRow:
        return {x: self.table.get(self.graph.label(x), ZERO)}

    def to_dict(self) -> dict[str, Any]:
        return {
            "op": RuleOp.letters.value,
            "table": {key: fraction_str(val) for key, val in self.table.items()},
        }


@dataclass(frozen=True, eq=False)
class OrbitTable(PatternOperator):
    """A(x, y) = table[(r-pattern of x, canonical position of y in ball(x, r))].

    Pattern invariant iff values are constant on root-fixing orbits, which
    orbit_table_operator guarantees. Building an OrbitTable directly allows
    deliberately broken tables (useful as negative controls).
    """

    r: int
    table: Mapping[tuple[PatternCode, int], Fraction]

    @property
    def radius(self) -> int:
        return self.r

    @property
    def sup_entry(self) -> Fraction:
        return max((abs(val) for val in self.table.values()), default=ZERO)

    def _compute_row(self, x: VertexId) -> SparseRow:
        local_ball = ball(self.graph, x, self.r)
        code = canonical_code(local_ball)
        positions = canonical_positions(local_ball)
        return {
            y: self.table.get((code, positions[y]), ZERO) for y in local_ball.vertices
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "op": RuleOp.orbit_table.value,
            "radius": self.r,
            "positions": {
                f"{code.hex()}:{pos}": fraction_str(val)
                for (code, pos), val in sorted(self.table.items())
            },
        }


@dataclass(frozen=True, eq=False)
class Sum(PatternOperator):
    """A + B."""

    left: PatternOperator
    right: PatternOperator

    @property
    def radius(self) -> int:
        return max(self.left.radius, self.right.radius)

    @property
    def pattern_radius(self) -> int:
        return max(self.left.pattern_radius, self.right.pattern_radius)

    @property
    def sup_entry(self) -> Fraction:
        return self.left.sup_entry + self.right.sup_entry

    def _compute_row(self, x: VertexId) -> SparseRow:
        out = dict(self.left.row(x))
        for y, val in self.right.row(x).items():
            out[y] = out.get(y, ZERO) + val
        return out

    def to_dict(self) -> dict[str, Any]:
        terms = []
        for term in (self.left, self.right):
            as_dict = term.to_dict()
            terms += as_dict["terms"] if as_dict["op"] == RuleOp.add else [as_dict]
        return {"op": RuleOp.add.value, "terms": terms}


@dataclass(frozen=True, eq=False)
class Product(PatternOperator):
    """AB(x, y) = sum_z A(x, z) B(z, y), z ranging over ball(x, r_A)."""

    left: PatternOperator
    right: PatternOperator

    @property
    def radius(self) -> int:
        return self.left.radius + self.right.radius

    @property
    def pattern_radius(self) -> int:
        return max(self.left.pattern_radius, self.left.radius + self.right.pattern_radius)

    @property
    def sup_entry(self) -> Fraction:
        n_mid = max_ball_size(self.left.radius, self.graph.max_degree)
        return self.left.sup_entry * self.right.sup_entry * n_mid

    def _compute_row(self, x: VertexId) -> SparseRow:
        out: dict[VertexId, Fraction] = defaultdict(Fraction)
        for z, a_xz in self.left.row(x).items():
            for y, b_zy in self.right.row(z).items():
                out[y] += a_xz * b_zy
        return out

    def to_dict(self) -> dict[str, Any]:
        factors = []
        for factor in (self.left, self.right):
            as_dict = factor.to_dict()
            factors += as_dict["factors"] if as_dict["op"] == RuleOp.mul else [as_dict]
        return {"op": RuleOp.mul.value, "factors": factors}


@dataclass(frozen=True, eq=False)
class Scale(PatternOperator):
    """c * A."""

    coeff: Fraction
    operand: PatternOperator

    @property
    def radius(self) -> int:
        return self.operand.radius

    @property
    def pattern_radius(self) -> int:
        return self.operand.pattern_radius

    @property
    def sup_entry(self) -> Fraction:
        return abs(self.coeff) * self.operand.sup_entry

    def _compute_row(self, x: VertexId) -> SparseRow:
        return {y: self.coeff * val for y, val in self.operand.row(x).items()}

    def to_dict(self) -> dict[str, Any]:
        return {
            "op": RuleOp.scale.value,
            "coeff": fraction_str(self.coeff),
            "operand": self.operand.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class Star(PatternOperator):
    """A*(x, y) = A(y, x)."""

    operand: PatternOperator

    @property
    def radius(self) -> int:
        return self.operand.radius

    @property
    def pattern_radius(self) -> int:
        # row x reads rows of A at every y within radius of x
        return self.operand.radius + self.operand.pattern_radius

    @property
    def sup_entry(self) -> Fraction:
        return self.operand.sup_entry

    def _compute_row(self, x: VertexId) -> SparseRow:
        near = ball(self.graph, x, self.operand.radius).vertices
        return {y: self.operand.row(y).get(x, ZERO) for y in near}

    def to_dict(self) -> dict[str, Any]:
        return {"op": RuleOp.star.value, "operand": self.operand.to_dict()}


def _check_same_graph(op_a: PatternOperator, op_b: PatternOperator) -> None:
    if op_a.graph != op_b.graph:
        raise ValueError(
            f"Operators live on different graphs: {op_a.graph.descriptor} vs "
            f"{op_b.graph.descriptor}"
        )


def adjacency_operator(g: InfiniteGraph) -> Adjacency:
    """Adjacency matrix: r_A = 1, m_A = 1."""
    return Adjacency(g)


def identity_operator(g: InfiniteGraph) -> Identity:
    """Identity: r_A = 0, m_A = 1."""
    return Identity(g)


def pattern_potential(
    g: InfiniteGraph, r: int, table: Mapping[PatternCode, Rational | str]
) -> PatternPotential:
    """Diagonal operator keyed by r-patterns. All keys must have radius r."""
    return PatternPotential(g, r, {code: to_fraction(val) for code, val in table.items()})


def degree_potential(g: InfiniteGraph) -> DegreePotential:
    """V(x, x) = deg(x)."""
    return DegreePotential(g)


def letter_potential(
    g: InfiniteGraph, table: Mapping[str, Rational | str]
) -> LetterPotential:
    """V(x, x) = table[label(x)], e.g. {"a": 0, "b": 1} on the Fibonacci chain."""
    return LetterPotential(g, {key: to_fraction(val) for key, val in table.items()})


def laplacian_operator(g: InfiniteGraph) -> PatternOperator:
    """Graph Laplacian degree_potential - adjacency."""
    return add(degree_potential(g), scale(-1, adjacency_operator(g)))


def orbit_table_operator(
    g: InfiniteGraph, r: int, values: Mapping[tuple[PatternCode, int], Rational | str]
) -> OrbitTable:
    """Operator with A(x, y) = values[(r-pattern of x, orbit index of y)].

    Orbit indices are least canonical positions of root-fixing orbits (see
    pattern.orbit_index). Each value is expanded to every canonical position of its
    orbit so the resulting table is pattern invariant by construction.
    """
    table: dict[tuple[PatternCode, int], Fraction] = {}
    orbits_by_code: dict[PatternCode, dict[VertexId, int]] = {}
    for (code, orbit_idx), val in values.items():
        if code.radius != r:
            raise ValueError(f"Invalid {code=}, radius must be {r}")
        if code not in orbits_by_code:
            orbits_by_code[code] = orbit_index(code.canonical_ball())
        by_position = orbits_by_code[code]
        if orbit_idx not in by_position.values():
            valid = sorted(set(by_position.values()))
            raise ValueError(f"Invalid orbit index {orbit_idx}, valid are {valid}")
        for (pos,), least in by_position.items():
            if least == orbit_idx:
                table[code, pos] = to_fraction(val)
    return OrbitTable(g, r, table)


def add(op_a: PatternOperator, op_b: PatternOperator) -> Sum:
    """A + B with r = max(r_A, r_B)."""
    _check_same_graph(op_a, op_b)
    return Sum(op_a.graph, op_a, op_b)


def mul(op_a: PatternOperator, op_b: PatternOperator) -> Product:
    """AB with r = r_A + r_B."""
    _check_same_graph(op_a, op_b)
    return Product(op_a.graph, op_a, op_b)


def scale(coeff: Rational | str, op_a: PatternOperator) -> Scale:
    """c * A for rational c."""
    return Scale(op_a.graph, to_fraction(coeff), op_a)


def star(op_a: PatternOperator) -> Star:
    """Adjoint of A."""
    return Star(op_a.graph, op_a)


def entry(op_a: PatternOperator, x: VertexId, y: VertexId) -> Fraction:
    """A(x, y)."""
    return op_a.entry(x, y)


def sup_entry(op_a: PatternOperator) -> Fraction:
    """Upper bound m_A on |A(x, y)|."""
    return op_a.sup_entry


def norm_bound(op_a: PatternOperator) -> Fraction:
    """K = m_A (1 + T(r_A, d)) >= ||A||, hence >= spectral radius of every section."""
    ball_size = max_ball_size(op_a.radius, op_a.graph.max_degree)
    return op_a.sup_entry * (1 + ball_size)


def window_trace(op_a: PatternOperator, Q: Window) -> Fraction:
    """(1/|Q|) sum_{x in Q} A(x, x), the window shadow of the trace Tr_G."""
    total = sum((op_a.row(x).get(x, ZERO) for x in Q.vertices), ZERO)
    return total / len(Q)


@dataclass(frozen=True, eq=False)
class FiniteSection:
    """B_n = p_Q A i_Q as sparse exact rows indexed by the window bijection."""

    window: Window
    rows: tuple[dict[int, Fraction], ...]
    source: dict[str, Any] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def nnz(self) -> int:
        """Number of stored nonzero entries."""
        return sum(map(len, self.rows))

    def entry(self, i: int, j: int) -> Fraction:
        """Matrix entry (i, j)."""
        return self.rows[i].get(j, ZERO)

    def iter_entries(self) -> Iterator[tuple[int, int, Fraction]]:
        """Nonzero (i, j, value) in row-major order."""
        for i, row in enumerate(self.rows):
            for j in sorted(row):
                yield i, j, row[j]

    def is_symmetric(self) -> bool:
        """Exact symmetry check."""
        return all(
            self.rows[j].get(i, ZERO) == val
            for i, row in enumerate(self.rows)
            for j, val in row.items()
        )

    def integer_scale(self) -> int:
        """LCM of all entry denominators (1 for integer sections)."""
        return lcm_denominator(val for row in self.rows for val in row.values())

    def scaled_int_rows(self) -> tuple[int, tuple[dict[int, int], ...]]:
        """(s, rows of s * B as Python ints)."""
        scale_factor = self.integer_scale()
        int_rows = tuple(
            {j: int(val * scale_factor) for j, val in row.items()} for row in self.rows
        )
        return scale_factor, int_rows

    def to_dense(self) -> np.ndarray:
        """Float64 dense matrix.

        Raises:
            LimitExceededError: If |Q| > LIMITS.dense_limit.
        """
        if len(self) > LIMITS.dense_limit:
            raise LimitExceededError(
                f"Section of size {len(self)} exceeds dense_limit={LIMITS.dense_limit}"
            )
        mat = np.zeros((len(self), len(self)))
        for i, j, val in self.iter_entries():
            mat[i, j] = float(val)
        return mat

    def to_sparse(self) -> sps.csr_array:
        """Float64 CSR matrix."""
        entries = list(self.iter_entries())
        rows = [i for i, _, _ in entries]
        cols = [j for _, j, _ in entries]
        vals = [float(val) for *_, val in entries]
        shape = (len(self), len(self))
        return sps.csr_array((vals, (rows, cols)), shape=shape)

    def to_rational_matrix(self) -> RationalMatrix:
        """Dense exact matrix for the exactla routines.

        Raises:
            LimitExceededError: If |Q| > LIMITS.exact_limit.
        """
        from folnerspec.exactla import RationalMatrix

        if len(self) > LIMITS.exact_limit:
            raise LimitExceededError(
                f"Section of size {len(self)} exceeds exact_limit="
                f"{LIMITS.exact_limit}, use the float path instead"
            )
        return RationalMatrix.from_sparse_rows(self.rows, len(self))

    def power_trace(self, k: int) -> Fraction:
        """Exact Tr(B^k) via sparse integer powers of the scaled matrix."""
        if k < 1:
            raise ValueError(f"Invalid {k=}, must be >= 1")
        scale_factor, int_rows = self.scaled_int_rows()
        half = k // 2
        identity: tuple[dict[int, int], ...] = tuple({i: 1} for i in range(len(self)))
        low = identity
        for _ in range(half):
            low = _sparse_matmul(low, int_rows)
        high = low if k - half == half else _sparse_matmul(low, int_rows)
        total = sum(
            val * high[j].get(i, 0) for i, row in enumerate(low) for j, val in row.items()
        )
        return Fraction(total, scale_factor**k)

    def quadratic_form(self, vec: Sequence[Fraction]) -> Fraction:
        """Exact x* B x."""
        if len(vec) != len(self):
            raise ValueError(f"Vector length {len(vec)} != section size {len(self)}")
        return sum(
            (vec[i] * val * vec[j] for i, j, val in self.iter_entries()), ZERO
        )


def _sparse_matmul(
    left: Sequence[dict[int, int]], right: Sequence[dict[int, int]]
) -> tuple[dict[int, int], ...]:
    out = []
    for row in left:
        acc: dict[int, int] = defaultdict(int)
        for mid, val in row.items():
            for col, other in right[mid].items():
                acc[col] += val * other
        out.append({col: val for col, val in acc.items() if val})
    return tuple(out)


def finite_section(op_a: PatternOperator, Q: Window) -> FiniteSection:
    """Compression p_Q A i_Q of op_a to window Q as sparse exact rows."""
    rows = tuple(
        {Q.index[y]: val for y, val in op_a.row(x).items() if y in Q}
        for x in Q.vertices
    )
    return FiniteSection(Q, rows, source=op_a.to_dict())


@dataclass(frozen=True)
class Violation:
    """A(x, y) != A(phi x, phi y) for an isomorphism phi of pattern balls."""

    x: VertexId
    x_image: VertexId
    y: VertexId
    y_image: VertexId
    value: Fraction
    image_value: Fraction


@dataclass
class InvarianceReport:
    """Outcome of validate_invariance."""

    n_codes: int
    n_pairs: int
    n_isomorphisms: int
    n_checks: int
    violations: list[Violation]

    @property
    def passed(self) -> bool:
        """True if no violation was found."""
        return not self.violations


def validate_invariance(
    op_a: PatternOperator, Q: Window, samples: int = 8, seed: int = 0
) -> InvarianceReport:
    """Check A(x, y) = A(phi x, phi y) over sampled pairs of equal-pattern vertices.

    For every pattern class in Q, up to `samples` pairs (x, x') are drawn (the first
    pair always being x = x' so nontrivial automorphisms get tested), all isomorphisms
    phi of their pattern balls enumerated and every y in ball(x) checked.

    Args:
        op_a (PatternOperator): Operator to validate.
        Q (Window): Window supplying the sample vertices.
        samples (int): Pairs per pattern class. Defaults to 8.
        seed (int): Seed for pair sampling. Defaults to 0.

    Returns:
        InvarianceReport: Counts and all violations found.
    """
    radius = op_a.pattern_radius
    rng = np.random.default_rng(seed=seed)
    classes: dict[PatternCode, list[VertexId]] = defaultdict(list)
    balls = {}
    for vertex in Q.vertices:
        balls[vertex] = ball(op_a.graph, vertex, radius)
        classes[canonical_code(balls[vertex])].append(vertex)

    n_pairs = n_isos = n_checks = 0
    violations: list[Violation] = []
    for code in sorted(classes):
        members = classes[code]
        pairs = [(members[0], members[0])]
        for _ in range(samples - 1):
            idx_a, idx_b = rng.integers(len(members), size=2)
            pairs.append((members[idx_a], members[idx_b]))
        for x, x_image in pairs:
            n_pairs += 1
            row, image_row = op_a.row(x), op_a.row(x_image)
            for phi in isomorphisms(balls[x], balls[x_image]):
                n_isos += 1
                for y in balls[x].vertices:
                    n_checks += 1
                    val, image_val = row.get(y, ZERO), image_row.get(phi[y], ZERO)
                    if val != image_val:
                        violations.append(
                            Violation(x, x_image, y, phi[y], val, image_val)
                        )
    return InvarianceReport(len(classes), n_pairs, n_isos, n_checks, violations)


def random_orbit_operator(
    g: InfiniteGraph,
    r: int,
    level: int,
    seed: int,
    *,
    low: int = -2,
    high: int = 2,
) -> OrbitTable:
    """Orbit-table operator with seeded random integer values in [low, high] for every
    orbit of every r-pattern found in the window of the given level.
    """
    rng = np.random.default_rng(seed=seed)
    values: dict[tuple[PatternCode, int], int] = {}
    for code in pattern_census(g, folner_window(g, level), r):
        orbit_ids = sorted(set(orbit_index(code.canonical_ball()).values()))
        for orbit_idx in orbit_ids:
            values[code, orbit_idx] = int(rng.integers(low, high + 1))
    return orbit_table_operator(g, r, values)


def random_gram_operator(
    g: InfiniteGraph,
    r: int,
    level: int,
    seed: int,
    *,
    low: int = -2,
    high: int = 2,
) -> Product:
    """Positive integer-valued operator C* C with C = random_orbit_operator(...)."""
    op_c = random_orbit_operator(g, r, level, seed, low=low, high=high)
    return mul(star(op_c), op_c)


def _parse_keyed_table(
    raw: Any, location: str, n_parts: int
) -> dict[tuple[str, ...], Fraction]:
    if not isinstance(raw, dict):
        raise ConfigError("expected a JSON object", location)
    out = {}
    for key, val in raw.items():
        parts = tuple(str(key).split(":"))
        if len(parts) != n_parts:
            raise ConfigError(f"invalid key {key!r}", location)
        try:
            out[parts] = to_fraction(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), f"{location}.{key}") from exc
    return out


def operator_from_dict(
    rule: Mapping[str, Any], g: InfiniteGraph, location: str = "operator"
) -> PatternOperator:
    """Build an operator from a JSON rule tree.

    Nodes are objects with an "op" key (see RuleOp): leaves adjacency, identity,
    degree, laplacian, letters {table}, potential {radius, table: {code_hex: val}},
    orbit_table {radius, orbits: {"code_hex:orbit": val}} or {radius, positions:
    {"code_hex:pos": val}}, random_gram {radius, level, seed, low?, high?} and inner
    nodes add {terms}, mul {factors}, scale {coeff, operand}, star {operand}.

    Raises:
        ConfigError: With location pointing at the offending node.
    """
    if not isinstance(rule, dict):
        raise ConfigError("operator node must be a JSON object", location)
    op_name = rule.get("op")
    valid_ops = [op.value for op in RuleOp]
    if op_name not in valid_ops:
        raise ConfigError(f"unknown {op_name=}, valid are {valid_ops}", f"{location}.op")
    op_name = RuleOp(op_name)

    def child(key: str, idx: int | None = None) -> PatternOperator:
        node = rule[key] if idx is None else rule[key][idx]
        loc = f"{location}.{key}" if idx is None else f"{location}.{key}[{idx}]"
        return operator_from_dict(node, g, loc)

    def int_param(key: str) -> int:
        val = rule.get(key)
        if not isinstance(val, int) or isinstance(val, bool):
            raise ConfigError(f"expected int, got {val!r}", f"{location}.{key}")
        return val

    simple = {
        RuleOp.adjacency: adjacency_operator,
        RuleOp.identity: identity_operator,
        RuleOp.degree: degree_potential,
        RuleOp.laplacian: laplacian_operator,
    }
    if op_name in simple:
        return simple[op_name](g)

    try:
        if op_name == RuleOp.letters:
            table = _parse_keyed_table(rule.get("table"), f"{location}.table", 1)
            return letter_potential(g, {key: val for (key,), val in table.items()})
        if op_name == RuleOp.potential:
            radius = int_param("radius")
            table = _parse_keyed_table(rule.get("table"), f"{location}.table", 1)
            codes = {PatternCode.from_hex(radius, hx): val for (hx,), val in table.items()}
            return pattern_potential(g, radius, codes)
        if op_name == RuleOp.orbit_table:
            radius = int_param("radius")
            if "positions" in rule:
                table = _parse_keyed_table(rule["positions"], f"{location}.positions", 2)
                return OrbitTable(
                    g,
                    radius,
                    {
                        (PatternCode.from_hex(radius, hx), int(pos)): val
                        for (hx, pos), val in table.items()
                    },
                )
            table = _parse_keyed_table(rule.get("orbits"), f"{location}.orbits", 2)
            return orbit_table_operator(
                g,
                radius,
                {
                    (PatternCode.from_hex(radius, hx), int(orbit)): val
                    for (hx, orbit), val in table.items()
                },
            )
        if op_name == RuleOp.random_gram:
            return random_gram_operator(
                g,
                int_param("radius"),
                int_param("level"),
                int_param("seed"),
                low=int(rule.get("low", -2)),
                high=int(rule.get("high", 2)),
            )
        if op_name == RuleOp.scale:
            return scale(to_fraction(rule["coeff"]), child("operand"))
        if op_name == RuleOp.star:
            return star(child("operand"))

        key = "terms" if op_name == RuleOp.add else "factors"
        items = rule.get(key)
        if not isinstance(items, list) or not items:
            raise ConfigError(f"expected nonempty list {key!r}", f"{location}.{key}")
        combine = add if op_name == RuleOp.add else mul
        out = child(key, 0)
        for idx in range(1, len(items)):
            out = combine(out, child(key, idx))
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"missing key {exc}", location) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), location) from exc
    return out

