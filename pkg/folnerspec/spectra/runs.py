"""Experiments along a Følner schedule: trace moments with error bounds, IDS
staircases, ground-state and eigenspace densities, log-determinants, uniform
convergence diagnostics and trace/positivity/norm shadows.

Every run evaluates levels independently (optionally on a thread pool) and merges the
results in level order, so reports do not depend on completion order. Levels that hit
a resource guard are skipped with a PartialResultWarning and the report is flagged
partial.
"""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any, TypeVar

import numpy as np
import pandas as pd
import scipy.sparse.linalg
from tqdm import tqdm

from folnerspec.enums import Key
from folnerspec.exactla import RationalMatrix, det1, kernel_dim, log_fraction
from folnerspec.graph import (
    ball,
    check_levels,
    folner_window,
    inner_boundary,
    max_ball_size,
)
from folnerspec.operators import finite_section, identity_operator, norm_bound
from folnerspec.pattern import canonical_code
from folnerspec.spectra.helpers import eigenvalues_sym, staircase, sup_distance
from folnerspec.utils import (
    LIMITS,
    LimitExceededError,
    PartialResultWarning,
    PositivityWarning,
)
from folnerspec.utils.data import to_fraction, to_jsonable


if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from folnerspec.graph import InfiniteGraph, Window
    from folnerspec.operators import FiniteSection, PatternOperator
    from folnerspec.pattern import PatternCode
    from folnerspec.spectra.helpers import SpectralStaircase
    from folnerspec.typing import Rational, VertexId

T = TypeVar("T")
ZERO = Fraction(0)


def run_levels(
    func: Callable[[int], T],
    levels: Sequence[int],
    *,
    threads: int = 1,
    verbose: bool = False,
    desc: str = "levels",
) -> tuple[dict[int, T], bool]:
    """Evaluate func on every level, in parallel if threads > 1.

    Returns:
        tuple[dict[int, T], bool]: Results keyed by level in schedule order and
            whether any level was skipped by a resource guard.

    Raises:
        LimitExceededError: If every level was skipped.
    """
    levels = check_levels(levels)

    def guarded(level: int) -> T | None:
        try:
            return func(level)
        except LimitExceededError as exc:
            warnings.warn(
                f"Skipped level {level}: {exc}", PartialResultWarning, stacklevel=3
            )
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                tqdm(
                    pool.map(guarded, levels),
                    total=len(levels),
                    desc=desc,
                    disable=not verbose,
                )
            )
    else:
        results = [guarded(lvl) for lvl in tqdm(levels, desc=desc, disable=not verbose)]

    out = {lvl: res for lvl, res in zip(levels, results, strict=True) if res is not None}
    if not out:
        raise LimitExceededError(f"All {levels=} exceeded the resource limits")
    return out, len(out) < len(levels)


def _boundary_size(g: InfiniteGraph, Q: Window, width: int) -> int:
    return len(inner_boundary(g, Q, width)) if width > 0 else 0


def _section_eigs(section: FiniteSection) -> np.ndarray:
    return eigenvalues_sym(section.to_dense())


def closed_walk_weight(A: PatternOperator, x: VertexId, k: int) -> Fraction:
    """A^k(x, x) in the infinite graph: weighted closed k-walks from x."""
    vec: dict[VertexId, Fraction] = {x: Fraction(1)}
    for _ in range(k):
        nxt: dict[VertexId, Fraction] = defaultdict(Fraction)
        for y, weight in vec.items():
            for z, val in A.row(y).items():
                nxt[z] += weight * val
        vec = nxt
    return vec.get(x, ZERO)


@dataclass
class MomentReport:
    """Normalized section moments Tr(B_n^k)/|Q_n| next to window-free walk moments.

    walk_moments sums A^k(x, x) over pattern classes weighted by their window
    counts, so |moments - walk_moments| <= bounds level by level.
    """

    k: int
    levels: list[int]
    sizes: dict[int, int]
    moments: dict[int, Fraction]
    bounds: dict[int, Fraction]
    walk_moments: dict[int, Fraction]
    float_moments: dict[int, float | None]
    norm_bound: Fraction
    partial: bool = False

    @property
    def limit(self) -> Fraction:
        """Walk moment at the top level, the estimate of Tr_G(A^k)."""
        return self.walk_moments[self.levels[-1]]

    @property
    def bound_holds(self) -> bool:
        """|section moment - walk moment| <= error bound at every level."""
        return all(
            abs(self.moments[lvl] - self.walk_moments[lvl]) <= self.bounds[lvl]
            for lvl in self.levels
        )

    @property
    def consistent(self) -> bool:
        """Successive section moments differ by at most their error bounds plus the
        change of the walk moment.
        """
        return all(
            abs(self.moments[lvl1] - self.moments[lvl2])
            <= self.bounds[lvl1]
            + self.bounds[lvl2]
            + abs(self.walk_moments[lvl1] - self.walk_moments[lvl2])
            for lvl1, lvl2 in zip(self.levels, self.levels[1:], strict=False)
        )

    @property
    def float_consistent(self) -> bool:
        """Float eigenvalue moments match exact ones within 1e-6 K^k."""
        tol = 1e-6 * float(self.norm_bound) ** self.k
        return all(
            val is None or abs(val - float(self.moments[lvl])) <= tol
            for lvl, val in self.float_moments.items()
        )

    @property
    def passed(self) -> bool:
        """All moment checks hold."""
        return self.bound_holds and self.consistent and self.float_consistent

    def to_df(self) -> pd.DataFrame:
        """One row per level."""
        return pd.DataFrame(
            [
                {
                    Key.level: lvl,
                    Key.n_vertices: self.sizes[lvl],
                    Key.moment: self.moments[lvl],
                    Key.moment_bound: self.bounds[lvl],
                    Key.walk_moment: self.walk_moments[lvl],
                }
                for lvl in self.levels
            ]
        )

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary."""
        return to_jsonable(
            {
                "k": self.k,
                "levels": self.levels,
                "sizes": self.sizes,
                "moments": self.moments,
                "bounds": self.bounds,
                "walk_moments": self.walk_moments,
                "float_moments": self.float_moments,
                "limit": self.limit,
                "norm_bound": self.norm_bound,
                "bound_holds": self.bound_holds,
                "consistent": self.consistent,
                "float_consistent": self.float_consistent,
                "partial": self.partial,
            }
        )


def moment_run(
    A: PatternOperator,
    levels: Sequence[int],
    k: int,
    *,
    check_float: bool = True,
    threads: int = 1,
    verbose: bool = False,
) -> MomentReport:
    """Exact moments Tr(B_n^k)/|Q_n| with error bound m^k |∂_{kr} Q_n| T(r, d)^(k-1)
    / |Q_n| and the frequency-weighted walk moment.

    Vertices of Q_n are grouped by their pattern at radius floor(k/2) r + p (p being
    the radius of the ball that determines a row of A), which determines A^k(x, x).
    The closed-walk weight is then computed once per pattern. Vertices whose walk
    ball exceeds LIMITS.max_ball_size (e.g. ℤ³ adjacency at k = 6 needs radius-4
    balls of 129 vertices) are not classified and get their walk weight computed
    one by one instead.

    Args:
        A (PatternOperator): Operator.
        levels (Sequence[int]): Følner schedule.
        k (int): Moment order >= 1.
        check_float (bool): Whether to also compute float eigenvalue moments of
            symmetric sections. Defaults to True.
        threads (int): Worker threads over levels. Defaults to 1.
        verbose (bool): Whether to show a progress bar. Defaults to False.

    Returns:
        MomentReport: Per-level moments, bounds and walk moments.
    """
    if k < 1:
        raise ValueError(f"Invalid {k=}, must be >= 1")
    g, r = A.graph, A.radius
    walk_radius = (k // 2) * r + A.pattern_radius
    ball_size = max_ball_size(r, g.max_degree)
    walk_cache: dict[PatternCode, Fraction] = {}

    def level_moments(level: int) -> tuple[int, Fraction, Fraction, Fraction, float | None]:
        Q = folner_window(g, level)
        section = finite_section(A, Q)
        moment = section.power_trace(k) / len(Q)
        boundary = _boundary_size(g, Q, k * r)
        bound = Fraction(A.sup_entry**k * boundary * ball_size ** (k - 1), len(Q))

        walk_total = ZERO
        for x in Q.vertices:
            try:
                code = canonical_code(ball(g, x, walk_radius))
            except LimitExceededError:
                # pattern too large to classify, sum its closed walks directly
                walk_total += closed_walk_weight(A, x, k)
                continue
            if code not in walk_cache:
                walk_cache[code] = closed_walk_weight(A, x, k)
            walk_total += walk_cache[code]

        float_moment = None
        if check_float and section.is_symmetric() and len(Q) <= LIMITS.dense_limit:
            float_moment = float(np.sum(_section_eigs(section) ** k) / len(Q))
        return len(Q), moment, bound, walk_total / len(Q), float_moment

    results, partial = run_levels(
        level_moments, levels, threads=threads, verbose=verbose, desc=f"k={k} moments"
    )
    return MomentReport(
        k=k,
        levels=list(results),
        sizes={lvl: res[0] for lvl, res in results.items()},
        moments={lvl: res[1] for lvl, res in results.items()},
        bounds={lvl: res[2] for lvl, res in results.items()},
        walk_moments={lvl: res[3] for lvl, res in results.items()},
        float_moments={lvl: res[4] for lvl, res in results.items()},
        norm_bound=norm_bound(A),
        partial=partial,
    )


@dataclass
class Atom:
    """A candidate point mass of the IDS at a rational λ."""

    lam: Fraction
    center: float
    masses: dict[int, Fraction]
    exact_densities: dict[int, Fraction] = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        """Exact kernel density of B_n - λ is positive at some checked level."""
        return any(val > 0 for val in self.exact_densities.values())

    @property
    def consistent(self) -> bool:
        """Exact density never exceeds the float cluster mass."""
        return all(
            dens <= self.masses.get(lvl, ZERO)
            for lvl, dens in self.exact_densities.items()
        )


@dataclass
class IDSEstimate:
    """Per-level staircases of a self-adjoint operator and their diagnostics."""

    levels: list[int]
    staircases: dict[int, SpectralStaircase]
    norm_bound: float
    sup_distances: list[float]
    reference_distances: dict[int, float] = field(default_factory=dict)
    atoms: list[Atom] = field(default_factory=list)
    shubin: dict[float, float] = field(default_factory=dict)
    partial: bool = False

    @property
    def top(self) -> SpectralStaircase:
        """Staircase of the largest window."""
        return self.staircases[self.levels[-1]]

    @property
    def in_range(self) -> bool:
        """Every staircase vanishes below -K and reaches 1 at K."""
        return all(
            float(stair(K)) == 1.0 and float(stair.left_limit(-K)) == 0.0
            for stair in self.staircases.values()
            for K in [self.norm_bound]
        )

    @property
    def cauchy_decreasing(self) -> bool:
        """Sup distances between consecutive levels strictly decrease (or vanish)."""
        return _strictly_decreasing(self.sup_distances)

    @property
    def passed(self) -> bool:
        """Range and atom checks hold and the Cauchy distances decrease."""
        return (
            self.in_range
            and self.cauchy_decreasing
            and all(atom.consistent for atom in self.atoms)
            and not self.partial
        )

    def to_df(self) -> pd.DataFrame:
        """Long table of breakpoints: level, lambda, N."""
        frames = []
        for lvl, stair in self.staircases.items():
            df_stair = stair.to_df()
            df_stair.insert(0, Key.level, lvl)
            frames.append(df_stair)
        return pd.concat(frames, ignore_index=True)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary (breakpoints go to CSV via to_df)."""
        return to_jsonable(
            {
                "levels": self.levels,
                "sizes": {lvl: stair.size for lvl, stair in self.staircases.items()},
                "norm_bound": self.norm_bound,
                "sup_distances": self.sup_distances,
                "reference_distances": self.reference_distances,
                "atoms": [
                    {
                        "lambda": atom.lam,
                        "center": atom.center,
                        "masses": atom.masses,
                        "exact_densities": atom.exact_densities,
                        "certified": atom.certified,
                        "consistent": atom.consistent,
                    }
                    for atom in self.atoms
                ],
                "shubin": {f"{lam:.6g}": diff for lam, diff in self.shubin.items()},
                "cauchy_decreasing": self.cauchy_decreasing,
                "partial": self.partial,
            }
        )


def _strictly_decreasing(vals: Sequence[float]) -> bool:
    return all(
        nxt < prev or prev == nxt == 0
        for prev, nxt in zip(vals, vals[1:], strict=False)
    )


def ids_run(
    A: PatternOperator,
    levels: Sequence[int],
    *,
    reference: Callable[[np.ndarray], np.ndarray] | None = None,
    merge_tol: float | None = None,
    grid: Sequence[float] | None = None,
    atom_mass: float = 0.01,
    positive: bool = True,
    threads: int = 1,
    verbose: bool = False,
) -> IDSEstimate:
    """Staircases N_{B_n} along a Følner schedule with Cauchy sup distances, atom
    detection and the Shubin continuity-point check.

    Atoms are top-level jumps of mass >= atom_mass. Their centers are rounded to
    rationals with denominator <= 1000 and certified only by an exact kernel
    dimension of B_n - λ on levels within LIMITS.exact_limit.

    Args:
        A (PatternOperator): Self-adjoint operator.
        levels (Sequence[int]): Følner schedule.
        reference (Callable, optional): Analytic IDS to measure sup distances against.
        merge_tol (float, optional): Cluster tolerance. Defaults to 1e-8 * K.
        grid (Sequence[float], optional): Continuity points for the Shubin check.
            Defaults to 31 interior points of [0, K] ([-K, K] if not positive), minus
            points near atoms.
        atom_mass (float): Smallest jump considered an atom. Defaults to 0.01.
        positive (bool): Whether A is declared positive. Sections with eigenvalues
            below -1e-9 K then emit a PositivityWarning. Defaults to True.
        threads (int): Worker threads over levels. Defaults to 1.
        verbose (bool): Whether to show a progress bar. Defaults to False.

    Returns:
        IDSEstimate: Staircases and diagnostics.
    """
    K = float(norm_bound(A))
    merge_tol = 1e-8 * K if merge_tol is None else merge_tol

    def level_staircase(level: int) -> tuple[SpectralStaircase, FiniteSection]:
        section = finite_section(A, folner_window(A.graph, level))
        eigs = _section_eigs(section)
        if positive and len(eigs) and eigs[0] < -1e-9 * K:
            warnings.warn(
                f"Section at {level=} has eigenvalue {eigs[0]:.3g} < 0 although the "
                "operator was declared positive",
                PositivityWarning,
                stacklevel=2,
            )
        return staircase(eigs, len(section), merge_tol, K), section

    results, partial = run_levels(
        level_staircase, levels, threads=threads, verbose=verbose, desc="IDS"
    )
    lvls = list(results)
    stairs = {lvl: res[0] for lvl, res in results.items()}
    dists = [
        sup_distance(stairs[lvl1], stairs[lvl2])
        for lvl1, lvl2 in zip(lvls, lvls[1:], strict=False)
    ]
    ref_dists = (
        {lvl: sup_distance(stair, reference) for lvl, stair in stairs.items()}
        if reference is not None
        else {}
    )

    atoms = []
    for center, mass in stairs[lvls[-1]].jumps:
        if mass < atom_mass:
            continue
        lam = Fraction(center).limit_denominator(1000)
        atom = Atom(lam, center, {lvl: st.jump_at(center) for lvl, st in stairs.items()})
        for lvl, (_, section) in results.items():
            if len(section) <= LIMITS.exact_limit:
                mat = section.to_rational_matrix()
                atom.exact_densities[lvl] = Fraction(
                    kernel_dim(mat, lam), len(section)
                )
        atoms.append(atom)

    if grid is None:
        grid = np.linspace(0 if positive else -K, K, 33)[1:-1]
    grid = [
        float(lam)
        for lam in grid
        if all(abs(lam - atom.center) > 1e-6 * K for atom in atoms)
    ]
    shubin = {}
    if len(lvls) > 1:
        top, prev = stairs[lvls[-1]], stairs[lvls[-2]]
        shubin = {lam: float(abs(top(lam) - prev(lam))) for lam in grid}

    return IDSEstimate(
        levels=lvls,
        staircases=stairs,
        norm_bound=K,
        sup_distances=dists,
        reference_distances=ref_dists,
        atoms=atoms,
        shubin=shubin,
        partial=partial,
    )


@dataclass
class KernelReport:
    """Exact kernel dimensions per level.

    For eigenspace runs squared_kernel_dims holds dim Ker p(A - λ)^2 i and
    boundaries |∂_{2r} Q_n|, the allowed gap between the two kernels.
    """

    lam: Fraction
    levels: list[int]
    sizes: dict[int, int]
    kernel_dims: dict[int, int]
    squared_kernel_dims: dict[int, int] = field(default_factory=dict)
    boundaries: dict[int, int] = field(default_factory=dict)
    partial: bool = False

    @property
    def densities(self) -> dict[int, Fraction]:
        """dim Ker / |Q_n| per level."""
        return {
            lvl: Fraction(self.kernel_dims[lvl], self.sizes[lvl]) for lvl in self.levels
        }

    @property
    def squared_densities(self) -> dict[int, Fraction]:
        """dim Ker p(A - λ)^2 i / |Q_n| per level (eigenspace runs only)."""
        return {
            lvl: Fraction(dim, self.sizes[lvl])
            for lvl, dim in self.squared_kernel_dims.items()
        }

    @property
    def stabilization(self) -> list[Fraction]:
        """|density_i - density_{i-1}| along the schedule."""
        dens = [self.densities[lvl] for lvl in self.levels]
        return [abs(nxt - prev) for prev, nxt in zip(dens, dens[1:], strict=False)]

    @property
    def limit(self) -> Fraction:
        """Density at the top level."""
        return self.densities[self.levels[-1]]

    @property
    def passed(self) -> bool:
        """Kernel gap <= boundary size at every level (trivially True for ground-state
        runs) and no level was skipped.
        """
        return not self.partial and all(
            abs(self.kernel_dims[lvl] - dim) <= self.boundaries[lvl]
            for lvl, dim in self.squared_kernel_dims.items()
        )

    def to_df(self) -> pd.DataFrame:
        """One row per level."""
        rows = []
        for lvl in self.levels:
            row = {
                Key.level: lvl,
                Key.n_vertices: self.sizes[lvl],
                Key.kernel_dim: self.kernel_dims[lvl],
                Key.kernel_density: self.densities[lvl],
            }
            if lvl in self.squared_kernel_dims:
                row[Key.squared_kernel_dim] = self.squared_kernel_dims[lvl]
                row[Key.boundary] = self.boundaries[lvl]
            rows.append(row)
        return pd.DataFrame(rows)

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary."""
        return to_jsonable(
            {
                "lambda": self.lam,
                "levels": self.levels,
                "sizes": self.sizes,
                "kernel_dims": self.kernel_dims,
                "densities": self.densities,
                "squared_kernel_dims": self.squared_kernel_dims,
                "squared_densities": self.squared_densities,
                "boundaries": self.boundaries,
                "stabilization": self.stabilization,
                "limit": self.limit,
                "passed": self.passed,
                "partial": self.partial,
            }
        )


def ground_state_run(
    A: PatternOperator,
    levels: Sequence[int],
    *,
    threads: int = 1,
    verbose: bool = False,
) -> KernelReport:
    """Exact ground-state densities dim Ker(B_n) / |Q_n| by rational elimination."""

    def level_kernel(level: int) -> tuple[int, int]:
        section = finite_section(A, folner_window(A.graph, level))
        return len(section), kernel_dim(section.to_rational_matrix())

    results, partial = run_levels(
        level_kernel, levels, threads=threads, verbose=verbose, desc="ground state"
    )
    return KernelReport(
        lam=ZERO,
        levels=list(results),
        sizes={lvl: res[0] for lvl, res in results.items()},
        kernel_dims={lvl: res[1] for lvl, res in results.items()},
        partial=partial,
    )


def eigenspace_run(
    A: PatternOperator,
    lam: Rational | str,
    levels: Sequence[int],
    *,
    threads: int = 1,
    verbose: bool = False,
) -> KernelReport:
    """dim Ker(B_n - λ) next to dim Ker p_Q (A - λ)^2 i_Q, both exact.

    The two differ by at most |∂_{2r_A} Q_n| since both kernels agree on vectors
    supported away from that boundary layer.
    """
    lam = to_fraction(lam)
    g = A.graph
    shifted = A - lam * identity_operator(g)
    squared = shifted @ shifted

    def level_kernels(level: int) -> tuple[int, int, int, int]:
        Q = folner_window(g, level)
        section = finite_section(A, Q)
        dim = kernel_dim(section.to_rational_matrix(), lam)
        sq_dim = kernel_dim(finite_section(squared, Q).to_rational_matrix())
        return len(Q), dim, sq_dim, _boundary_size(g, Q, 2 * A.radius)

    results, partial = run_levels(
        level_kernels, levels, threads=threads, verbose=verbose, desc=f"λ={lam}"
    )
    return KernelReport(
        lam=lam,
        levels=list(results),
        sizes={lvl: res[0] for lvl, res in results.items()},
        kernel_dims={lvl: res[1] for lvl, res in results.items()},
        squared_kernel_dims={lvl: res[2] for lvl, res in results.items()},
        boundaries={lvl: res[3] for lvl, res in results.items()},
        partial=partial,
    )


def staircase_logdet(stair: SpectralStaircase, K: float, tol: float) -> float:
    """ln K (1 - N(0)) - ∫_0^K (N(λ) - N(0)) / λ dλ on a staircase.

    N - N(0) equals j/|Q| on [μ_j, μ_{j+1}) for the positive eigenvalues μ_1 <= ...
    <= μ_m (μ_{m+1} = K), so the integral is a finite sum of logarithms.
    """
    mus = stair.eigenvalues[stair.eigenvalues > tol]
    if len(mus) == 0:
        return 0.0
    size = stair.size
    uppers = np.append(mus[1:], max(K, mus[-1]))
    weights = np.arange(1, len(mus) + 1) / size
    integral = float(np.sum(weights * np.log(uppers / mus)))
    return len(mus) / size * math.log(K) - integral


@dataclass
class LogdetReport:
    """Exact |det|_1 of sections with normalized logs and float cross-checks.

    det1_scaled is det1 of the integer-scaled section s B_n, a positive integer whose
    normalized log is >= 0.
    """

    levels: list[int]
    sizes: dict[int, int]
    scales: dict[int, int]
    det1: dict[int, Fraction]
    det1_scaled: dict[int, Fraction]
    logdets: dict[int, float]
    norm_bound: float
    fk_estimates: dict[int, float] = field(default_factory=dict)
    staircase_logdets: dict[int, float] = field(default_factory=dict)
    partial: bool = False

    @property
    def scaled_logdets(self) -> dict[int, float]:
        """(1/|Q|) ln det1(s B_n)."""
        return {
            lvl: log_fraction(val) / self.sizes[lvl] for lvl, val in self.det1_scaled.items()
        }

    @property
    def fk_estimate(self) -> float | None:
        """Float Fuglede-Kadison estimate at the top level."""
        return self.fk_estimates.get(self.levels[-1])

    @property
    def staircase_errors(self) -> dict[int, float]:
        """|exact logdet - staircase evaluation| per level."""
        return {
            lvl: abs(self.logdets[lvl] - val)
            for lvl, val in self.staircase_logdets.items()
        }

    @property
    def passed(self) -> bool:
        """Every scaled det1 is a positive integer with nonnegative normalized log."""
        return not self.partial and all(
            val.denominator == 1 and val >= 1 and self.scaled_logdets[lvl] >= 0
            for lvl, val in self.det1_scaled.items()
        )

    def to_df(self) -> pd.DataFrame:
        """One row per level."""
        return pd.DataFrame(
            [
                {
                    Key.level: lvl,
                    Key.n_vertices: self.sizes[lvl],
                    Key.scale: self.scales[lvl],
                    Key.det1: self.det1[lvl],
                    Key.logdet: self.logdets[lvl],
                    Key.fk_estimate: self.fk_estimates.get(lvl),
                }
                for lvl in self.levels
            ]
        )

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary with exact determinants as strings."""
        return to_jsonable(
            {
                "levels": self.levels,
                "sizes": self.sizes,
                "scales": self.scales,
                "det1": self.det1,
                "det1_scaled": self.det1_scaled,
                "logdets": self.logdets,
                "scaled_logdets": self.scaled_logdets,
                "norm_bound": self.norm_bound,
                "fk_estimate": self.fk_estimate,
                "staircase_logdets": self.staircase_logdets,
                "staircase_errors": self.staircase_errors,
                "passed": self.passed,
                "partial": self.partial,
            }
        )


def logdet_run(
    A: PatternOperator,
    levels: Sequence[int],
    *,
    tol: float | None = None,
    threads: int = 1,
    verbose: bool = False,
) -> LogdetReport:
    """Exact det1 and (1/|Q|) ln det1 of every section plus the float Fuglede-Kadison
    estimate (1/|Q|) Σ_{λ_i > tol} ln λ_i and its staircase-sum form.

    Args:
        A (PatternOperator): Positive self-adjoint operator.
        levels (Sequence[int]): Følner schedule.
        tol (float, optional): Eigenvalues <= tol count as zero. Defaults to 1e-9 K.
        threads (int): Worker threads over levels. Defaults to 1.
        verbose (bool): Whether to show a progress bar. Defaults to False.

    Returns:
        LogdetReport: Per-level determinants and estimates.
    """
    K = float(norm_bound(A))
    tol = 1e-9 * K if tol is None else tol

    def level_det(level: int) -> dict[str, Any]:
        section = finite_section(A, folner_window(A.graph, level))
        mat = section.to_rational_matrix()
        ints, scale = mat.scaled_to_integers()
        det_val = det1(mat)
        out = {
            "size": len(section),
            "scale": scale,
            "det1": det_val,
            "det1_scaled": det1(RationalMatrix(ints)) if scale > 1 else det_val,
            "logdet": log_fraction(det_val) / len(section),
        }
        if section.is_symmetric() and len(section) <= LIMITS.dense_limit:
            eigs = _section_eigs(section)
            if len(eigs) and eigs[0] < -tol:
                warnings.warn(
                    f"Section at {level=} has eigenvalue {eigs[0]:.3g} < 0",
                    PositivityWarning,
                    stacklevel=2,
                )
            pos = eigs[eigs > tol]
            out["fk"] = float(np.sum(np.log(pos)) / len(section))
            stair = staircase(eigs, len(section), norm_bound=K)
            out["stair"] = staircase_logdet(stair, K, tol)
        return out

    results, partial = run_levels(
        level_det, levels, threads=threads, verbose=verbose, desc="logdet"
    )
    return LogdetReport(
        levels=list(results),
        sizes={lvl: res["size"] for lvl, res in results.items()},
        scales={lvl: res["scale"] for lvl, res in results.items()},
        det1={lvl: res["det1"] for lvl, res in results.items()},
        det1_scaled={lvl: res["det1_scaled"] for lvl, res in results.items()},
        logdets={lvl: res["logdet"] for lvl, res in results.items()},
        norm_bound=K,
        fk_estimates={lvl: res["fk"] for lvl, res in results.items() if "fk" in res},
        staircase_logdets={
            lvl: res["stair"] for lvl, res in results.items() if "stair" in res
        },
        partial=partial,
    )


@dataclass
class ConvergenceReport:
    """Numerical check of the uniform convergence criterion for staircases.

    Hypotheses: pointwise Cauchy behavior on a continuity grid and convergence of the
    jump masses at detected atoms. Conclusion: decreasing sup distances, the last
    one being the uniform-convergence certificate.
    """

    sup_distances: list[float]
    grid_diffs: list[float]
    jump_masses: dict[float, list[Fraction]]
    jump_tol: float
    pointwise_cauchy: bool
    drifting_jumps: list[float]

    @property
    def jumps_converge(self) -> bool:
        """No atom's mass keeps drifting."""
        return not self.drifting_jumps

    @property
    def decreasing(self) -> bool:
        """Consecutive sup distances strictly decrease (or are all 0)."""
        return _strictly_decreasing(self.sup_distances)

    @property
    def certificate(self) -> float:
        """Final sup distance."""
        return self.sup_distances[-1]

    @property
    def passed(self) -> bool:
        """Hypotheses and conclusion all hold."""
        return self.pointwise_cauchy and self.jumps_converge and self.decreasing

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary."""
        return to_jsonable(
            {
                "sup_distances": self.sup_distances,
                "grid_diffs": self.grid_diffs,
                "jump_masses": {f"{lam:.6g}": ms for lam, ms in self.jump_masses.items()},
                "jump_tol": self.jump_tol,
                "pointwise_cauchy": self.pointwise_cauchy,
                "jumps_converge": self.jumps_converge,
                "drifting_jumps": self.drifting_jumps,
                "decreasing": self.decreasing,
                "certificate": self.certificate,
                "passed": self.passed,
            }
        )


def uniform_convergence_diag(
    staircases: Sequence[SpectralStaircase],
    *,
    grid: Sequence[float] | None = None,
    atom_mass: float = 0.01,
    jump_tol: float | None = None,
) -> ConvergenceReport:
    """Check hypotheses and conclusion of uniform convergence on a staircase sequence.

    Args:
        staircases (Sequence[SpectralStaircase]): At least 3 staircases ordered by
            increasing window.
        grid (Sequence[float], optional): Continuity points. Defaults to 63 interior
            points spanning all eigenvalues, minus points near atoms.
        atom_mass (float): Top-level jump mass from which a cluster counts as an
            atom. Defaults to 0.01.
        jump_tol (float, optional): Accepted final change of an atom's mass. Defaults
            to 2 / (smaller of the last two window sizes).

    Returns:
        ConvergenceReport: Diagnostics and certificate.
    """
    if len(staircases) < 3:
        raise ValueError(f"Need >= 3 staircases, got {len(staircases)}")
    stairs = list(staircases)
    top = stairs[-1]
    dists = [sup_distance(s1, s2) for s1, s2 in zip(stairs, stairs[1:], strict=False)]
    if jump_tol is None:
        jump_tol = 2 / min(stairs[-1].size, stairs[-2].size)

    jump_masses, drifting = {}, []
    for center, mass in top.jumps:
        if mass < atom_mass:
            continue
        masses = [stair.jump_at(center) for stair in stairs]
        jump_masses[center] = masses
        first_diff = float(abs(masses[1] - masses[0]))
        last_diff = float(abs(masses[-1] - masses[-2]))
        if last_diff > max(jump_tol, 0.5 * first_diff):
            drifting.append(center)

    if grid is None:
        all_eigs = np.concatenate([stair.eigenvalues for stair in stairs])
        lo, hi = (all_eigs.min(), all_eigs.max()) if len(all_eigs) else (0.0, 1.0)
        grid = np.linspace(lo, hi, 65)[1:-1]
    span = max(1.0, *(abs(float(val)) for val in grid)) if len(grid) else 1.0
    grid = np.array(
        [
            lam
            for lam in grid
            if all(abs(lam - center) > 1e-6 * span for center in jump_masses)
        ]
    )
    grid_diffs = [
        float(np.max(np.abs(s2(grid) - s1(grid)), initial=0))
        for s1, s2 in zip(stairs, stairs[1:], strict=False)
    ]
    pointwise = grid_diffs[-1] <= grid_diffs[0] + 1 / top.size

    return ConvergenceReport(
        sup_distances=dists,
        grid_diffs=grid_diffs,
        jump_masses=jump_masses,
        jump_tol=jump_tol,
        pointwise_cauchy=pointwise,
        drifting_jumps=drifting,
    )


@dataclass
class TraceReport:
    """|tr_Q(AB) - tr_Q(BA)| per level with two boundary bounds.

    bounds = 2 m_A m_B |∂_D Q| / |Q| counts one exterior partner per boundary
    vertex, counted_bounds multiplies by the T(D, d) - 1 possible partners and is the
    one the check uses.
    """

    levels: list[int]
    sizes: dict[int, int]
    diffs: dict[int, Fraction]
    bounds: dict[int, Fraction]
    counted_bounds: dict[int, Fraction]

    @property
    def passed(self) -> bool:
        """diff <= counted bound at every level."""
        return all(self.diffs[lvl] <= self.counted_bounds[lvl] for lvl in self.levels)

    @property
    def simple_bound_holds(self) -> bool:
        """diff <= 2 m_A m_B |∂_D Q| / |Q| at every level."""
        return all(self.diffs[lvl] <= self.bounds[lvl] for lvl in self.levels)

    def to_df(self) -> pd.DataFrame:
        """One row per level."""
        return pd.DataFrame(
            [
                {
                    Key.level: lvl,
                    Key.n_vertices: self.sizes[lvl],
                    Key.trace_diff: self.diffs[lvl],
                    Key.trace_bound: self.counted_bounds[lvl],
                }
                for lvl in self.levels
            ]
        )

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary."""
        return to_jsonable(
            {
                "levels": self.levels,
                "sizes": self.sizes,
                "diffs": self.diffs,
                "bounds": self.bounds,
                "counted_bounds": self.counted_bounds,
                "simple_bound_holds": self.simple_bound_holds,
                "passed": self.passed,
            }
        )


def trace_property_run(
    A: PatternOperator,
    B: PatternOperator,
    levels: Sequence[int],
    *,
    threads: int = 1,
    verbose: bool = False,
) -> TraceReport:
    """Window shadows of Tr_G(AB) = Tr_G(BA), exact."""
    if A.graph != B.graph:
        raise ValueError("Operators act on different graphs")
    g = A.graph
    width = max(A.radius, B.radius)
    partners = max_ball_size(width, g.max_degree) - 1
    prod_ab, prod_ba = A @ B, B @ A
    base = 2 * A.sup_entry * B.sup_entry

    def level_trace(level: int) -> tuple[int, Fraction, int]:
        Q = folner_window(g, level)
        total = sum(
            (prod_ab.row(x).get(x, ZERO) - prod_ba.row(x).get(x, ZERO) for x in Q),
            ZERO,
        )
        return len(Q), abs(total) / len(Q), _boundary_size(g, Q, width)

    results, _ = run_levels(
        level_trace, levels, threads=threads, verbose=verbose, desc="trace"
    )
    sizes = {lvl: res[0] for lvl, res in results.items()}
    bounds = {lvl: base * res[2] / res[0] for lvl, res in results.items()}
    return TraceReport(
        levels=list(results),
        sizes=sizes,
        diffs={lvl: res[1] for lvl, res in results.items()},
        bounds=bounds,
        counted_bounds={lvl: val * partners for lvl, val in bounds.items()},
    )


@dataclass
class PositivityReport:
    """Smallest section eigenvalue and smallest exact quadratic form per level."""

    levels: list[int]
    min_eigs: dict[int, float | None]
    min_forms: dict[int, Fraction]
    n_vectors: int
    tol: float

    @property
    def passed(self) -> bool:
        """All exact forms >= 0 and float spectra >= -tol."""
        return all(val >= 0 for val in self.min_forms.values()) and all(
            val is None or val >= -self.tol for val in self.min_eigs.values()
        )

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary."""
        return to_jsonable(
            {
                "levels": self.levels,
                "min_eigs": self.min_eigs,
                "min_forms": self.min_forms,
                "n_vectors": self.n_vectors,
                "passed": self.passed,
            }
        )


def positivity_run(
    A: PatternOperator,
    levels: Sequence[int],
    *,
    n_vectors: int = 100,
    seed: int = 0,
    threads: int = 1,
    verbose: bool = False,
) -> PositivityReport:
    """Positivity of sections: min float eigenvalue and exact x* B_n x >= 0 for seeded
    random rational vectors x (entries p/q, |p| <= 5, 1 <= q <= 3).
    """
    K = float(norm_bound(A))

    def level_positivity(level: int) -> tuple[float | None, Fraction]:
        section = finite_section(A, folner_window(A.graph, level))
        rng = np.random.default_rng([seed, level])
        forms = []
        for _ in range(n_vectors):
            nums = rng.integers(-5, 6, size=len(section))
            dens = rng.integers(1, 4, size=len(section))
            vec = [Fraction(int(p), int(q)) for p, q in zip(nums, dens, strict=True)]
            forms.append(section.quadratic_form(vec))
        min_eig = None
        if section.is_symmetric() and len(section) <= LIMITS.dense_limit:
            min_eig = float(_section_eigs(section)[0])
        return min_eig, min(forms, default=ZERO)

    results, _ = run_levels(
        level_positivity, levels, threads=threads, verbose=verbose, desc="positivity"
    )
    return PositivityReport(
        levels=list(results),
        min_eigs={lvl: res[0] for lvl, res in results.items()},
        min_forms={lvl: res[1] for lvl, res in results.items()},
        n_vectors=n_vectors,
        tol=1e-9 * K,
    )


@dataclass
class NormReport:
    """Section spectral radii against the certified norm bound K."""

    levels: list[int]
    spectral_radii: dict[int, float]
    norm_bound: Fraction

    @property
    def passed(self) -> bool:
        """Every spectral radius <= K (up to float rounding)."""
        K = float(self.norm_bound)
        return all(rad <= K * (1 + 1e-9) for rad in self.spectral_radii.values())

    def to_df(self) -> pd.DataFrame:
        """One row per level."""
        return pd.DataFrame(
            [
                {
                    Key.level: lvl,
                    Key.spectral_radius: rad,
                    Key.norm_bound: float(self.norm_bound),
                }
                for lvl, rad in self.spectral_radii.items()
            ]
        )

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready summary."""
        return to_jsonable(
            {
                "levels": self.levels,
                "spectral_radii": self.spectral_radii,
                "norm_bound": self.norm_bound,
                "passed": self.passed,
            }
        )


def spectral_radius(section: FiniteSection) -> float:
    """Largest |eigenvalue| of a section: dense eigensolver within dense_limit,
    sparse Lanczos (symmetric) beyond.
    """
    if len(section) == 0:
        return 0.0
    if len(section) <= LIMITS.dense_limit:
        if section.is_symmetric():
            eigs = _section_eigs(section)
        else:
            eigs = np.linalg.eigvals(section.to_dense())
        return float(np.max(np.abs(eigs)))
    if not section.is_symmetric():
        raise LimitExceededError(
            f"Non-symmetric section of size {len(section)} exceeds "
            f"dense_limit={LIMITS.dense_limit}"
        )
    top = scipy.sparse.linalg.eigsh(
        section.to_sparse(), k=1, which="LM", return_eigenvectors=False
    )
    return float(np.abs(top).max())


def norm_run(
    A: PatternOperator,
    levels: Sequence[int],
    *,
    threads: int = 1,
    verbose: bool = False,
) -> NormReport:
    """Spectral radius of every section against norm_bound(A)."""

    def level_radius(level: int) -> float:
        return spectral_radius(finite_section(A, folner_window(A.graph, level)))

    results, _ = run_levels(
        level_radius, levels, threads=threads, verbose=verbose, desc="norm"
    )
    return NormReport(list(results), results, norm_bound(A))
