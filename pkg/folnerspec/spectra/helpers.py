"""Float spectra of finite sections: symmetric eigenvalues, spectral staircases
N(λ) = #{eigenvalues <= λ} / |Q| with their jumps, sup distances between step
functions and closed-form reference curves for the bundled fixtures.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd
import scipy.linalg
import scipy.sparse as sps

from folnerspec.enums import Key


if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import ArrayLike


def eigenvalues_sym(mat: ArrayLike, atol: float = 1e-12) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix in ascending order.

    Tridiagonal input (e.g. path graph sections) goes straight to LAPACK's
    tridiagonal solver, anything else through eigvalsh.

    Args:
        mat (ArrayLike | scipy.sparse array): Square matrix.
        atol (float): Entrywise symmetry tolerance. Defaults to 1e-12.

    Returns:
        np.ndarray: Sorted eigenvalues.

    Raises:
        ValueError: If mat is not square or not symmetric within atol.
    """
    mat = mat.toarray() if sps.issparse(mat) else np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"Expected square matrix, got shape={mat.shape}")
    if not np.allclose(mat, mat.T, rtol=0, atol=atol):
        raise ValueError(f"Matrix is not symmetric within {atol=}")
    if len(mat) == 0:
        return np.zeros(0)

    mat = (mat + mat.T) / 2
    if len(mat) > 2 and not np.any(np.triu(mat, 2)):
        return scipy.linalg.eigvalsh_tridiagonal(
            np.diag(mat).copy(), np.diag(mat, 1).copy()
        )
    return scipy.linalg.eigvalsh(mat)


@dataclass(frozen=True)
class SpectralStaircase:
    """Right-continuous step function N(λ) = #{eigenvalues <= λ} / size."""

    eigenvalues: np.ndarray
    size: int
    merge_tol: float
    norm_bound: float | None = None

    def __call__(self, lam: ArrayLike) -> np.ndarray | float:
        """N(λ), vectorized."""
        counts = np.searchsorted(self.eigenvalues, lam, side="right")
        return counts / self.size

    def left_limit(self, lam: ArrayLike) -> np.ndarray | float:
        """N(λ-) = #{eigenvalues < λ} / size."""
        return np.searchsorted(self.eigenvalues, lam, side="left") / self.size

    @cached_property
    def breakpoints(self) -> np.ndarray:
        """Distinct eigenvalues (where N jumps)."""
        return np.unique(self.eigenvalues)

    @cached_property
    def jumps(self) -> list[tuple[float, Fraction]]:
        """(cluster mean, multiplicity / size) for every cluster of eigenvalues whose
        consecutive gaps are <= merge_tol.
        """
        eigs = self.eigenvalues
        if len(eigs) == 0:
            return []
        cuts = np.flatnonzero(np.diff(eigs) > self.merge_tol) + 1
        return [
            (float(np.mean(cluster)), Fraction(len(cluster), self.size))
            for cluster in np.split(eigs, cuts)
        ]

    def jump_at(self, lam: float, tol: float | None = None) -> Fraction:
        """Mass of the cluster within tol (default merge_tol) of lam, else 0."""
        tol = self.merge_tol if tol is None else tol
        lo = np.searchsorted(self.eigenvalues, lam - tol, side="left")
        hi = np.searchsorted(self.eigenvalues, lam + tol, side="right")
        return Fraction(int(hi - lo), self.size)

    def to_df(self) -> pd.DataFrame:
        """Breakpoint table with columns lambda and N (right values)."""
        return pd.DataFrame(
            {Key.lam: self.breakpoints, Key.ids: self(self.breakpoints)}
        )


def staircase(
    eigs: ArrayLike,
    size: int | None = None,
    merge_tol: float | None = None,
    norm_bound: float | None = None,
) -> SpectralStaircase:
    """Spectral staircase of a section with eigenvalues eigs.

    Args:
        eigs (ArrayLike): Eigenvalues (sorted on input is expected, re-sorted anyway).
        size (int, optional): Window size |Q|. Defaults to len(eigs).
        merge_tol (float, optional): Eigenvalues closer than this fuse into one jump.
            Defaults to 1e-8 * norm_bound (or 1e-8 * max(1, spectral radius)).
        norm_bound (float, optional): Certified bound K with N(K) = 1.

    Returns:
        SpectralStaircase: The step function and its jumps.
    """
    eigs = np.sort(np.asarray(eigs, dtype=float))
    size = len(eigs) if size is None else size
    if size < max(1, len(eigs)):
        raise ValueError(f"Invalid {size=} for {len(eigs)} eigenvalues")
    if merge_tol is None:
        scale = norm_bound or max(1.0, float(np.abs(eigs).max(initial=0)))
        merge_tol = 1e-8 * scale
    return SpectralStaircase(eigs, size, merge_tol, norm_bound)


def sup_distance(
    s1: SpectralStaircase,
    s2: SpectralStaircase | Callable[[np.ndarray], np.ndarray],
) -> float:
    """sup_λ |N1(λ) - N2(λ)|.

    Both functions are constant between consecutive breakpoints, so it suffices to
    compare right values and left limits at the union of breakpoints. A callable s2
    must be a continuous nondecreasing distribution function, e.g. z_laplacian_ids.
    Its sup against a step function is attained at the steps' breakpoints, plus the
    norm bound if s1 has one.
    """
    if isinstance(s2, SpectralStaircase):
        points = np.union1d(s1.breakpoints, s2.breakpoints)
        right = np.abs(s1(points) - s2(points))
        left = np.abs(s1.left_limit(points) - s2.left_limit(points))
    else:
        points = s1.breakpoints
        if s1.norm_bound is not None:
            points = np.union1d(points, [s1.norm_bound])
        ref = np.asarray(s2(points), dtype=float)
        right = np.abs(s1(points) - ref)
        left = np.abs(s1.left_limit(points) - ref)
    if len(points) == 0:
        return 0.0
    return float(max(right.max(), left.max()))


def z_laplacian_ids(lam: ArrayLike) -> np.ndarray:
    """IDS of the ℤ Laplacian 2I - A: (1/π) arccos(1 - λ/2) on [0, 4]."""
    lam = np.clip(np.asarray(lam, dtype=float), 0, 4)
    return np.arccos(1 - lam / 2) / np.pi


def z_adjacency_ids(lam: ArrayLike) -> np.ndarray:
    """IDS of the ℤ adjacency operator: 1 - arccos(λ/2) / π on [-2, 2]."""
    lam = np.clip(np.asarray(lam, dtype=float), -2, 2)
    return 1 - np.arccos(lam / 2) / np.pi


def lemma_polynomial_bracket(
    stair: SpectralStaircase, lam: float, k: int
) -> dict[str, float | bool]:
    """Bracket N(λ) <= mean P_k(eigenvalues) <= N(λ + 1/k) + 1/k.

    P_k is the ramp equal to 1 up to λ, 0 from λ + 1/k on and linear in between, a
    continuous stand-in for the polynomial approximants of the step 1_{(-∞, λ]}.
    """
    if k < 1:
        raise ValueError(f"Invalid {k=}, must be >= 1")
    ramp = np.clip(1 - k * (stair.eigenvalues - lam), 0, 1)
    value = float(ramp.sum() / stair.size)
    lower = float(stair(lam))
    upper = float(stair(lam + 1 / k)) + 1 / k
    return {
        "lower": lower,
        "value": value,
        "upper": upper,
        "holds": lower <= value + 1e-12 and value <= upper + 1e-12,
    }
