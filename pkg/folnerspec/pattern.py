"""Canonical codes of rooted balls (r-patterns), root-fixing orbits, pattern censuses
and frequency tables over Følner windows.

Canonical forms come from colour refinement (distance from root, vertex label, degree)
followed by exhaustive individualization-refinement over every remaining ambiguity.
The lexicographically least (vertex colours, edge list) encoding over all leaves of the
search tree is the canonical form, so codes are complete isomorphism invariants. All
leaves attaining it differ by an automorphism, which gives root-fixing automorphisms,
orbits and ball isomorphisms for free.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import TYPE_CHECKING, NamedTuple

import pandas as pd
from tqdm import tqdm

from folnerspec.enums import Key
from folnerspec.graph import RootedBall, ball, check_levels, folner_window
from folnerspec.utils import LIMITS, LimitExceededError


if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from folnerspec.graph import InfiniteGraph, Window
    from folnerspec.typing import VertexId

    BallKey = tuple[tuple[int, ...], tuple[str, ...], tuple[tuple[int, int], ...]]
    Encoding = tuple[tuple[tuple[int, str], ...], tuple[tuple[int, int], ...]]


@dataclass(frozen=True, order=True)
class PatternCode:
    """Canonical byte encoding of a rooted ball's isomorphism class at radius r."""

    radius: int
    code: bytes

    def hex(self) -> str:
        """Hex string of the canonical bytes (used as CSV / JSON key)."""
        return self.code.hex()

    @classmethod
    def from_hex(cls, radius: int, hex_str: str) -> PatternCode:
        """Inverse of hex()."""
        return cls(radius, bytes.fromhex(hex_str))

    @cached_property
    def _form(self) -> dict[str, list[list[int | str]]]:
        return json.loads(self.code)

    @property
    def n_vertices(self) -> int:
        """Number of ball vertices."""
        return len(self._form["v"])

    @property
    def root_degree(self) -> int:
        """Degree of the root (canonical position 0)."""
        return sum(0 in edge for edge in self._form["e"])

    @property
    def root_label(self) -> str:
        """Decoration of the root vertex."""
        return str(self._form["v"][0][1])

    def canonical_ball(self) -> RootedBall:
        """The canonical representative with vertex ids (position,), root (0,)."""
        verts = tuple((pos,) for pos in range(self.n_vertices))
        colours = self._form["v"]
        return RootedBall(
            root=(0,),
            radius=self.radius,
            vertices=verts,
            distances={(pos,): int(colours[pos][0]) for pos in range(len(verts))},
            edges=tuple(((int(i),), (int(j),)) for i, j in self._form["e"]),
            labels={(pos,): str(colours[pos][1]) for pos in range(len(verts))},
        )

    def __repr__(self) -> str:
        return f"PatternCode(r={self.radius}, n={self.n_vertices}, {self.hex()[:12]})"


class CanonicalForm(NamedTuple):
    """Least encoding plus all leaf labelings (ball index -> position) attaining it."""

    encoding: Encoding
    labelings: tuple[tuple[int, ...], ...]


def _rank(values: Sequence[object]) -> tuple[int, ...]:
    lookup = {val: idx for idx, val in enumerate(sorted(set(values)))}  # type: ignore[type-var]
    return tuple(lookup[val] for val in values)


def _refine(colours: Sequence[int], adj: list[list[int]]) -> tuple[int, ...]:
    """1-dim Weisfeiler-Leman refinement to the coarsest equitable partition."""
    current = _rank(colours)
    n_classes = len(set(current))
    while True:
        signatures = [
            (current[idx], tuple(sorted(current[nbr] for nbr in nbrs)))
            for idx, nbrs in enumerate(adj)
        ]
        refined = _rank(signatures)
        n_refined = len(set(refined))
        if n_refined == n_classes:
            return refined
        current, n_classes = refined, n_refined


def _encode(labeling: tuple[int, ...], key: BallKey) -> Encoding:
    dists, labels, edges = key
    order = [0] * len(labeling)
    for idx, pos in enumerate(labeling):
        order[pos] = idx
    colours = tuple((dists[idx], labels[idx]) for idx in order)
    canon_edges = tuple(
        sorted(
            (min(labeling[i], labeling[j]), max(labeling[i], labeling[j]))
            for i, j in edges
        )
    )
    return colours, canon_edges


@lru_cache(maxsize=1 << 16)
def _canonical_search(key: BallKey) -> CanonicalForm:
    """Individualization-refinement search over the ball described by key."""
    dists, labels, edges = key
    n_verts = len(dists)
    adj: list[list[int]] = [[] for _ in range(n_verts)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)

    init = _rank([(dists[i], labels[i], len(adj[i])) for i in range(n_verts)])
    best: Encoding | None = None
    leaves: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    stack = [_refine(init, adj)]
    while stack:
        colours = stack.pop()
        counts = Counter(colours)
        split = min((col for col, cnt in counts.items() if cnt > 1), default=None)
        if split is None:
            if colours in seen:
                continue
            seen.add(colours)
            encoding = _encode(colours, key)
            if best is None or encoding < best:
                best, leaves = encoding, [colours]
            elif encoding == best:
                leaves.append(colours)
            continue
        cell = [idx for idx, col in enumerate(colours) if col == split]
        for vertex in reversed(cell):
            child = [2 * col for col in colours]
            child[vertex] = 2 * split - 1
            stack.append(_refine(child, adj))

    if best is None:  # only possible for an empty ball
        raise ValueError("Cannot canonicalize an empty ball")
    return CanonicalForm(best, tuple(leaves))


def canonical_form(b: RootedBall) -> CanonicalForm:
    """Canonical form of b (cached on the ball's translation-free structure).

    Raises:
        LimitExceededError: If b has more than LIMITS.max_ball_size vertices.
    """
    if len(b) > LIMITS.max_ball_size:
        raise LimitExceededError(
            f"Ball of {len(b)} vertices exceeds max_ball_size={LIMITS.max_ball_size}"
        )
    return _canonical_search(b.local_key)


def canonical_code(b: RootedBall) -> PatternCode:
    """PatternCode of b, equal for two balls iff a root-preserving isomorphism exists."""
    colours, edges = canonical_form(b).encoding
    payload = {"v": [list(col) for col in colours], "e": [list(edge) for edge in edges]}
    return PatternCode(b.radius, json.dumps(payload, separators=(",", ":")).encode())


def canonical_positions(b: RootedBall) -> dict[VertexId, int]:
    """Canonical position of every ball vertex (root is always 0)."""
    labeling = canonical_form(b).labelings[0]
    return dict(zip(b.vertices, labeling, strict=True))


def isomorphisms(b1: RootedBall, b2: RootedBall) -> list[dict[VertexId, VertexId]]:
    """All root-preserving isomorphisms b1 -> b2 (empty if not isomorphic)."""
    if b1.radius != b2.radius:
        return []
    form1, form2 = canonical_form(b1), canonical_form(b2)
    if form1.encoding != form2.encoding:
        return []
    first = form1.labelings[0]
    out = []
    for labeling in form2.labelings:
        vertex_at = [0] * len(labeling)
        for idx, pos in enumerate(labeling):
            vertex_at[pos] = idx
        out.append(
            {
                vertex: b2.vertices[vertex_at[first[idx]]]
                for idx, vertex in enumerate(b1.vertices)
            }
        )
    return out


def automorphisms(b: RootedBall) -> list[dict[VertexId, VertexId]]:
    """Root-fixing automorphism group of b (identity first)."""
    return isomorphisms(b, b)


def root_fixing_orbits(b: RootedBall) -> list[tuple[VertexId, ...]]:
    """Orbits of the root-fixing automorphism group, ordered by orbit_index."""
    auts = automorphisms(b)
    positions = canonical_positions(b)
    orbits = {tuple(sorted({aut[vertex] for aut in auts})) for vertex in b.vertices}
    return sorted(orbits, key=lambda orb: min(positions[vertex] for vertex in orb))


def orbit_index(b: RootedBall) -> dict[VertexId, int]:
    """Least canonical position in each vertex's orbit. Isomorphism invariant."""
    positions = canonical_positions(b)
    out = {}
    for orbit in root_fixing_orbits(b):
        least = min(positions[vertex] for vertex in orbit)
        out |= dict.fromkeys(orbit, least)
    return out


def pattern_census(g: InfiniteGraph, Q: Window, r: int) -> dict[PatternCode, int]:
    """Count vertices of Q by the r-pattern of their ball in the infinite graph."""
    counts = Counter(canonical_code(ball(g, vertex, r)) for vertex in Q.vertices)
    return dict(sorted(counts.items()))


@dataclass
class FrequencyTable:
    """Per-level pattern counts with exact frequencies count / |Q_n|."""

    radius: int
    levels: list[int]
    sizes: dict[int, int]
    counts: dict[int, dict[PatternCode, int]]
    analytic: dict[PatternCode, Fraction] = field(default_factory=dict)

    def frequencies(self, level: int | None = None) -> dict[PatternCode, Fraction]:
        """Exact frequencies at level (default: top level)."""
        level = self.levels[-1] if level is None else level
        size = self.sizes[level]
        return {code: Fraction(cnt, size) for code, cnt in self.counts[level].items()}

    def event_frequency(
        self, event: Callable[[PatternCode], bool], level: int | None = None
    ) -> Fraction:
        """Total frequency of all patterns satisfying event."""
        freqs = self.frequencies(level)
        return sum((freq for code, freq in freqs.items() if event(code)), Fraction(0))

    @property
    def codes(self) -> list[PatternCode]:
        """All codes seen at any level, sorted."""
        return sorted({code for cnts in self.counts.values() for code in cnts})

    @property
    def convergence(self) -> Fraction | None:
        """max over codes of |freq(top level) - freq(previous level)|."""
        if len(self.levels) < 2:
            return None
        top, prev = (self.frequencies(lvl) for lvl in self.levels[-1:-3:-1])
        return max(
            abs(top.get(code, Fraction(0)) - prev.get(code, Fraction(0)))
            for code in self.codes
        )

    def to_df(self) -> pd.DataFrame:
        """Long table with columns level, n_vertices, code (hex), count, frequency."""
        rows = [
            {
                Key.level: level,
                Key.n_vertices: self.sizes[level],
                Key.code: code.hex(),
                Key.count: cnt,
                Key.frequency: Fraction(cnt, self.sizes[level]),
            }
            for level in self.levels
            for code, cnt in self.counts[level].items()
        ]
        cols = [Key.level, Key.n_vertices, Key.code, Key.count, Key.frequency]
        return pd.DataFrame(rows, columns=cols)


def frequency_table(
    g: InfiniteGraph,
    levels: Sequence[int],
    r: int,
    *,
    analytic: dict[PatternCode, Fraction] | None = None,
    verbose: bool = False,
) -> FrequencyTable:
    """Pattern censuses along the box Følner sequence at the given levels.

    Args:
        g (InfiniteGraph): Graph to sample.
        levels (Sequence[int]): Strictly increasing positive window levels.
        r (int): Pattern radius.
        analytic (dict[PatternCode, Fraction], optional): Known limit frequencies,
            kept as metadata next to the empirical counts.
        verbose (bool): Whether to show a progress bar over levels.

    Returns:
        FrequencyTable: Counts and sizes per level.
    """
    levels = check_levels(levels)

    sizes, counts = {}, {}
    for level in tqdm(levels, desc=f"r={r} census", disable=not verbose):
        window = folner_window(g, level)
        sizes[level] = len(window)
        counts[level] = pattern_census(g, window, r)
    return FrequencyTable(r, levels, sizes, counts, dict(analytic or {}))
