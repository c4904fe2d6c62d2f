"""Lazily represented infinite graphs, Følner windows, rooted balls and boundaries.

Graphs are neighbor oracles keyed by integer coordinate tuples. Nothing is stored
beyond caches, so any window, ball or boundary is materialized on demand and a larger
window is always a restriction of the same infinite graph.
"""

from __future__ import annotations

import itertools
import math
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import TYPE_CHECKING, Any, ClassVar

import numpy as np

from folnerspec.enums import GeneratorName
from folnerspec.utils import LIMITS, LimitExceededError, UnsupportedGeneratorError
from folnerspec.utils.data import fraction_str, to_fraction


if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator

    from folnerspec.typing import Edge, Rational, VertexId

SUPPORTED_DIMS = (1, 2, 3)
UINT64 = 1 << 64


class InfiniteGraph(ABC):
    """Bounded-degree infinite graph given by a deterministic neighbor oracle.

    Subclasses are frozen dataclasses, so two graphs built from equal descriptors
    compare (and hash) equal.
    """

    generator: ClassVar[GeneratorName]

    @abstractmethod
    def neighbors(self, vertex: VertexId) -> tuple[VertexId, ...]:
        """Sorted neighbors of vertex."""

    @property
    @abstractmethod
    def max_degree(self) -> int:
        """Degree bound d."""

    @abstractmethod
    def box(self, n: int) -> list[VertexId]:
        """Vertices of the coordinate box [-n, n]^dim incl. decorations, sorted."""

    @abstractmethod
    def distance_lower_bound(self, x: VertexId, y: VertexId) -> int:
        """Cheap lower bound on d_G(x, y) computed from coordinates alone."""

    @property
    def params(self) -> dict[str, Any]:
        """Generator parameters as JSON-ready values."""
        return {}

    @property
    def seed(self) -> int | None:
        """Seed of random decorations, None for deterministic generators."""
        return None

    @property
    def descriptor(self) -> dict[str, Any]:
        """JSON descriptor {generator, params, seed}, see graph_from_descriptor."""
        return {
            "generator": self.generator.value,
            "params": self.params,
            "seed": self.seed,
        }

    def label(self, vertex: VertexId) -> str:  # noqa: ARG002
        """Vertex decoration (empty string if the graph carries none)."""
        return ""

    def degree(self, vertex: VertexId) -> int:
        """Number of neighbors of vertex."""
        return len(self.neighbors(vertex))

    def check_vertex(self, vertex: VertexId) -> None:
        """Raise ValueError if vertex is not a valid vertex id of this graph."""
        if not isinstance(vertex, tuple) or not all(
            isinstance(coord, int) for coord in vertex
        ):
            raise ValueError(f"Invalid {vertex=}, must be a tuple of ints")


@dataclass(frozen=True)
class LatticeGraph(InfiniteGraph):
    """ℤ^dim with nearest-neighbor edges."""

    dim: int
    generator: ClassVar[GeneratorName] = GeneratorName.lattice

    def __post_init__(self) -> None:
        """Check dimension."""
        if self.dim not in SUPPORTED_DIMS:
            raise UnsupportedGeneratorError(
                f"Invalid {self.dim=}, must be one of {SUPPORTED_DIMS}"
            )

    def neighbors(self, vertex: VertexId) -> tuple[VertexId, ...]:
        """Sorted nearest neighbors."""
        out = []
        for axis in range(self.dim):
            for step in (-1, 1):
                nbr = list(vertex)
                nbr[axis] += step
                out.append(tuple(nbr))
        return tuple(sorted(out))

    @property
    def max_degree(self) -> int:
        """2 * dim."""
        return 2 * self.dim

    @property
    def params(self) -> dict[str, Any]:
        """Lattice dimension."""
        return {"dim": self.dim}

    def box(self, n: int) -> list[VertexId]:
        """[-n, n]^dim in lexicographic order."""
        return list(itertools.product(range(-n, n + 1), repeat=self.dim))

    def distance_lower_bound(self, x: VertexId, y: VertexId) -> int:
        """L1 distance (exact on ℤ^dim)."""
        return sum(abs(a - b) for a, b in zip(x, y, strict=True))

    def check_vertex(self, vertex: VertexId) -> None:
        """Vertex must be a dim-tuple of ints."""
        super().check_vertex(vertex)
        if len(vertex) != self.dim:
            raise ValueError(f"Invalid {vertex=}, expected {self.dim} coordinates")


def _zigzag(val: int) -> int:
    """Map ℤ -> ℕ bijectively (0, -1, 1, -2, ... -> 0, 1, 2, 3, ...)."""
    return 2 * val if val >= 0 else -2 * val - 1


@lru_cache(maxsize=1 << 20)
def _cell_draw(seed: int, cell_a: int, cell_b: int) -> int:
    """Stateless 64-bit draw for cell (a, b): Philox keyed by seed, counter = cell."""
    counter = _zigzag(cell_a) | (_zigzag(cell_b) << 64)
    bit_gen = np.random.Philox(counter=counter, key=seed)
    return int(bit_gen.random_raw())


@dataclass(frozen=True)
class DecoratedLattice(InfiniteGraph):
    """ℤ² with an extra edge (a, b) -- (a+1, b+1) present with probability p per cell.

    Presence of the diagonal in cell (a, b) is decided by a counter-based draw keyed by
    (seed, a, b), so answers never depend on query order or window size.
    """

    p: Fraction
    seed: int = 0  # type: ignore[assignment]
    generator: ClassVar[GeneratorName] = GeneratorName.decorated_lattice

    def __post_init__(self) -> None:
        """Normalize p to a Fraction in [0, 1] and the seed to 64 bits."""
        prob = to_fraction(self.p)
        if not 0 <= prob <= 1:
            raise ValueError(f"Invalid p={prob}, must be in [0, 1]")
        object.__setattr__(self, "p", prob)
        object.__setattr__(self, "seed", int(self.seed) % UINT64)

    def has_diagonal(self, cell_a: int, cell_b: int) -> bool:
        """Whether the edge (a, b) -- (a+1, b+1) is present."""
        if self.p == 0:
            return False
        if self.p == 1:
            return True
        draw = _cell_draw(self.seed, cell_a, cell_b)
        return draw * self.p.denominator < self.p.numerator * UINT64

    def neighbors(self, vertex: VertexId) -> tuple[VertexId, ...]:
        """4 lattice neighbors plus up to 2 diagonal ones."""
        x, y = vertex
        out = [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)]
        if self.has_diagonal(x, y):
            out.append((x + 1, y + 1))
        if self.has_diagonal(x - 1, y - 1):
            out.append((x - 1, y - 1))
        return tuple(sorted(out))

    @property
    def max_degree(self) -> int:
        """4 lattice + 2 diagonal edges."""
        return 6

    @property
    def params(self) -> dict[str, Any]:
        """Diagonal probability as exact string."""
        return {"p": fraction_str(self.p)}

    def box(self, n: int) -> list[VertexId]:
        """[-n, n]² in lexicographic order."""
        return list(itertools.product(range(-n, n + 1), repeat=2))

    def distance_lower_bound(self, x: VertexId, y: VertexId) -> int:
        """Diagonals only shortcut steps where both coordinates move the same way."""
        dx, dy = y[0] - x[0], y[1] - x[1]
        if dx * dy < 0:
            return abs(dx) + abs(dy)
        return max(abs(dx), abs(dy))

    def check_vertex(self, vertex: VertexId) -> None:
        """Vertex must be a pair of ints."""
        super().check_vertex(vertex)
        if len(vertex) != 2:
            raise ValueError(f"Invalid {vertex=}, expected 2 coordinates")


@dataclass(frozen=True)
class PendantChain(InfiniteGraph):
    """ℤ backbone where each backbone vertex (x, 0) carries k leaves (x, 1..k)."""

    k: int
    generator: ClassVar[GeneratorName] = GeneratorName.pendant_chain

    def __post_init__(self) -> None:
        """Need at least 2 leaves per cell."""
        if not isinstance(self.k, int) or self.k < 2:
            raise ValueError(f"Invalid k={self.k}, must be an int >= 2")

    def neighbors(self, vertex: VertexId) -> tuple[VertexId, ...]:
        """Backbone: 2 backbone neighbors + k leaves. Leaf: its backbone vertex."""
        x, slot = vertex
        if slot != 0:
            return ((x, 0),)
        leaves = [(x, leaf) for leaf in range(1, self.k + 1)]
        return ((x - 1, 0), *leaves, (x + 1, 0))

    @property
    def max_degree(self) -> int:
        """k + 2."""
        return self.k + 2

    @property
    def params(self) -> dict[str, Any]:
        """Number of leaves per cell."""
        return {"k": self.k}

    def box(self, n: int) -> list[VertexId]:
        """Backbone [-n, n] with all attached leaves, 2n + 1 cells."""
        return [(x, slot) for x in range(-n, n + 1) for slot in range(self.k + 1)]

    def distance_lower_bound(self, x: VertexId, y: VertexId) -> int:
        """Backbone distance plus one step for each leaf endpoint off the backbone."""
        if x == y:
            return 0
        return abs(x[0] - y[0]) + (x[1] != 0) + (y[1] != 0)

    def check_vertex(self, vertex: VertexId) -> None:
        """Vertex must be (x, slot) with 0 <= slot <= k."""
        super().check_vertex(vertex)
        if len(vertex) != 2 or not 0 <= vertex[1] <= self.k:
            raise ValueError(f"Invalid {vertex=}, expected (x, slot <= {self.k})")


def _floor_times_alpha(m: int) -> int:
    """floor(m * (3 - sqrt(5)) / 2) in exact integer arithmetic."""
    if m == 0:
        return 0
    # floor(m * sqrt(5)), m * sqrt(5) is irrational for m != 0
    root = math.isqrt(5 * m * m)
    floor_sqrt = root if m > 0 else -root - 1
    return (3 * m - floor_sqrt - 1) // 2


def fibonacci_letter(n: int) -> str:
    """Letter at position n of the two-sided Fibonacci word abaababaabaab...

    Uses the Sturmian formula with slope 1/phi² where b sits at positions with
    floor((n+2)α) - floor((n+1)α) = 1.
    """
    jump = _floor_times_alpha(n + 2) - _floor_times_alpha(n + 1)
    return "b" if jump else "a"


@dataclass(frozen=True)
class SubstitutionChain(InfiniteGraph):
    """Path graph on ℤ whose vertices carry the letters of the Fibonacci word."""

    generator: ClassVar[GeneratorName] = GeneratorName.substitution_chain

    def neighbors(self, vertex: VertexId) -> tuple[VertexId, ...]:
        """Left and right neighbor."""
        (x,) = vertex
        return ((x - 1,), (x + 1,))

    @property
    def max_degree(self) -> int:
        """Path graph."""
        return 2

    def label(self, vertex: VertexId) -> str:
        """Fibonacci letter "a" or "b"."""
        return fibonacci_letter(vertex[0])

    def box(self, n: int) -> list[VertexId]:
        """[-n, n]."""
        return [(x,) for x in range(-n, n + 1)]

    def distance_lower_bound(self, x: VertexId, y: VertexId) -> int:
        """Exact path distance."""
        return abs(x[0] - y[0])

    def check_vertex(self, vertex: VertexId) -> None:
        """Vertex must be a 1-tuple."""
        super().check_vertex(vertex)
        if len(vertex) != 1:
            raise ValueError(f"Invalid {vertex=}, expected 1 coordinate")


def lattice_graph(dim: int) -> LatticeGraph:
    """Nearest-neighbor graph of ℤ^dim for dim in {1, 2, 3}."""
    return LatticeGraph(dim)


def decorated_lattice(p: Rational | str, seed: int) -> DecoratedLattice:
    """ℤ² plus a diagonal edge in each cell with probability p (exact rational)."""
    return DecoratedLattice(to_fraction(p), seed)


def pendant_chain(k: int) -> PendantChain:
    """ℤ backbone with k >= 2 pendant leaves per backbone vertex."""
    return PendantChain(k)


def substitution_chain() -> SubstitutionChain:
    """Fibonacci-decorated path graph."""
    return SubstitutionChain()


def graph_from_descriptor(descriptor: dict[str, Any]) -> InfiniteGraph:
    """Rebuild a graph from its JSON descriptor {generator, params, seed}.

    Raises:
        UnsupportedGeneratorError: For unknown generator names or bad parameters.
    """
    name = descriptor.get("generator")
    params = dict(descriptor.get("params") or {})
    seed = descriptor.get("seed")
    valid = [gen.value for gen in GeneratorName]
    if name not in valid:
        raise UnsupportedGeneratorError(f"Unknown generator {name=}, valid are {valid}")

    try:
        if name == GeneratorName.lattice:
            return LatticeGraph(int(params["dim"]))
        if name == GeneratorName.decorated_lattice:
            return decorated_lattice(params["p"], int(seed or 0))
        if name == GeneratorName.pendant_chain:
            return PendantChain(int(params["k"]))
        return SubstitutionChain()
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, UnsupportedGeneratorError):
            raise
        raise UnsupportedGeneratorError(
            f"Invalid params {params} for generator {name!r}: {exc}"
        ) from exc


@dataclass(frozen=True)
class Window:
    """Finite vertex set Q_n in canonical (lexicographic) order."""

    vertices: tuple[VertexId, ...]
    level: int
    index: dict[VertexId, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        """Build the vertex -> row index bijection."""
        if list(self.vertices) != sorted(self.vertices):
            raise ValueError("Window vertices must be in lexicographic order")
        index = {vertex: idx for idx, vertex in enumerate(self.vertices)}
        if len(index) != len(self.vertices):
            raise ValueError("Window vertices must be unique")
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, vertex: object) -> bool:
        return vertex in self.index

    def __iter__(self) -> Iterator[VertexId]:
        return iter(self.vertices)


def folner_window(g: InfiniteGraph, n: int) -> Window:
    """Box window [-n, n]^dim of g including all decorations of box vertices."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"Invalid level {n=}, must be a positive int")
    return Window(tuple(g.box(n)), level=n)


def check_levels(levels: Iterable[int]) -> list[int]:
    """Validate a Følner schedule: nonempty, strictly increasing positive ints."""
    levels = list(levels)
    if (
        not levels
        or any(not isinstance(lvl, int) or lvl < 1 for lvl in levels)
        or levels != sorted(set(levels))
    ):
        raise ValueError(f"Invalid {levels=}, must be nonempty strictly increasing >= 1")
    return levels


@dataclass(frozen=True, eq=False)
class RootedBall:
    """Induced subgraph on {u : d_G(u, root) <= radius} with root distances."""

    root: VertexId
    radius: int
    vertices: tuple[VertexId, ...]
    distances: dict[VertexId, int]
    edges: tuple[Edge, ...]
    labels: dict[VertexId, str]

    def __len__(self) -> int:
        return len(self.vertices)

    @cached_property
    def index(self) -> dict[VertexId, int]:
        """Vertex -> position in self.vertices."""
        return {vertex: idx for idx, vertex in enumerate(self.vertices)}

    @cached_property
    def local_key(
        self,
    ) -> tuple[tuple[int, ...], tuple[str, ...], tuple[tuple[int, int], ...]]:
        """Translation-free description (distances, labels, edges by index).

        Two balls whose vertex orders line up (e.g. lattice translates) share a key.
        """
        idx = self.index
        return (
            tuple(self.distances[vertex] for vertex in self.vertices),
            tuple(self.labels[vertex] for vertex in self.vertices),
            tuple((idx[u], idx[v]) for u, v in self.edges),
        )

    def degree(self, vertex: VertexId) -> int:
        """Degree inside the ball."""
        return sum(vertex in edge for edge in self.edges)


def ball(g: InfiniteGraph, v: VertexId, r: int) -> RootedBall:
    """BFS-materialized rooted ball B_r(v) of the infinite graph g.

    Raises:
        LimitExceededError: If r exceeds LIMITS.max_ball_radius.
    """
    if r < 0:
        raise ValueError(f"Invalid radius {r=}, must be >= 0")
    if r > LIMITS.max_ball_radius:
        raise LimitExceededError(
            f"Ball radius {r} exceeds max_ball_radius={LIMITS.max_ball_radius}"
        )
    g.check_vertex(v)

    distances = {v: 0}
    frontier = [v]
    for dist in range(1, r + 1):
        next_frontier = []
        for vertex in frontier:
            for nbr in g.neighbors(vertex):
                if nbr not in distances:
                    distances[nbr] = dist
                    next_frontier.append(nbr)
        frontier = next_frontier

    vertices = tuple(sorted(distances))
    edges = tuple(
        (u, w)
        for u in vertices
        for w in g.neighbors(u)
        if u < w and w in distances
    )
    return RootedBall(
        root=v,
        radius=r,
        vertices=vertices,
        distances=distances,
        edges=edges,
        labels={vertex: g.label(vertex) for vertex in vertices},
    )


def graph_distance(
    g: InfiniteGraph, x: VertexId, y: VertexId, cutoff: int
) -> int | None:
    """d_G(x, y) if it is <= cutoff, else None.

    The coordinate lower bound is checked first so far-apart pairs never trigger BFS.
    """
    if x == y:
        return 0
    if g.distance_lower_bound(x, y) > cutoff:
        return None
    seen = {x}
    frontier = [x]
    for dist in range(1, cutoff + 1):
        next_frontier = []
        for vertex in frontier:
            for nbr in g.neighbors(vertex):
                if nbr == y:
                    return dist
                if nbr not in seen:
                    seen.add(nbr)
                    next_frontier.append(nbr)
        frontier = next_frontier
    return None


def outer_boundary(g: InfiniteGraph, Q: Window) -> set[VertexId]:
    """Vertices outside Q adjacent to some vertex of Q."""
    return {nbr for vertex in Q.vertices for nbr in g.neighbors(vertex) if nbr not in Q}


def inner_boundary(g: InfiniteGraph, Q: Window, a: int) -> set[VertexId]:
    """∂_a Q: vertices x in Q with some y outside Q at d_G(x, y) <= a.

    Multi-source BFS from the outer boundary, only walking through Q (a shortest path
    from x to the complement leaves Q exactly once, at its last step).
    """
    if a < 1:
        raise ValueError(f"Invalid {a=}, must be >= 1")
    sources = outer_boundary(g, Q)
    depth: dict[VertexId, int] = {}
    queue: deque[tuple[VertexId, int]] = deque((src, 0) for src in sorted(sources))
    while queue:
        vertex, dist = queue.popleft()
        if dist == a:
            continue
        for nbr in g.neighbors(vertex):
            if nbr in Q and nbr not in depth:
                depth[nbr] = dist + 1
                queue.append((nbr, dist + 1))
    return set(depth)


def boundary_ratio(g: InfiniteGraph, Q: Window, a: int) -> Fraction:
    """|∂_a Q| / |Q|, the Følner quality of a window."""
    return Fraction(len(inner_boundary(g, Q, a)), len(Q))


def max_ball_size(r: int, d: int) -> int:
    """T(r, d) = 1 + d * sum_{i<r} (d-1)^i, the largest possible r-ball in a graph
    of degree <= d.
    """
    if r < 0 or d < 0:
        raise ValueError(f"Invalid {r=} or {d=}, must be >= 0")
    return 1 + d * sum((d - 1) ** i for i in range(r))


def window_edges(g: InfiniteGraph, Q: Window) -> list[Edge]:
    """Edges with both ends in Q, in canonical order."""
    return [
        (u, w) for u in Q.vertices for w in g.neighbors(u) if u < w and w in Q
    ]
