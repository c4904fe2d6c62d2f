"""Exact rational linear algebra for finite sections: rank and kernel dimensions by
fraction-free (Bareiss) elimination, characteristic polynomials by the
Faddeev-LeVerrier recurrence, |det|_1 and normalized log-determinants.

Matrices are dense numpy object arrays of Python ints / Fractions, so row operations
run in numpy's inner loops while arithmetic never rounds.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np

from folnerspec.utils import LIMITS, EmptyProductWarning, LimitExceededError
from folnerspec.utils.data import fraction_str, lcm_denominator, to_fraction


if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from folnerspec.typing import Rational


@dataclass(frozen=True, eq=False)
class RationalMatrix:
    """Square matrix of exact rationals (numpy object array of Fractions)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        """Check shape."""
        shape = self.entries.shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"RationalMatrix must be square, got {shape=}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Rational | str]]) -> RationalMatrix:
        """From nested sequences of ints, Fractions or "p/q" strings."""
        n_rows = len(rows)
        entries = np.empty((n_rows, n_rows), dtype=object)
        for i, row in enumerate(rows):
            if len(row) != n_rows:
                raise ValueError(f"Row {i} has length {len(row)}, expected {n_rows}")
            for j, val in enumerate(row):
                entries[i, j] = to_fraction(val)
        return cls(entries)

    @classmethod
    def from_sparse_rows(
        cls, rows: Sequence[Mapping[int, Fraction]], size: int
    ) -> RationalMatrix:
        """From per-row {column: value} dicts."""
        entries = np.full((size, size), Fraction(0), dtype=object)
        for i, row in enumerate(rows):
            for j, val in row.items():
                entries[i, j] = Fraction(val)
        return cls(entries)

    @classmethod
    def identity(cls, size: int) -> RationalMatrix:
        """size x size identity."""
        entries = np.full((size, size), Fraction(0), dtype=object)
        for idx in range(size):
            entries[idx, idx] = Fraction(1)
        return cls(entries)

    @classmethod
    def diag(cls, values: Sequence[Rational | str]) -> RationalMatrix:
        """Diagonal matrix."""
        mat = cls.identity(len(values))
        for idx, val in enumerate(values):
            mat.entries[idx, idx] = to_fraction(val)
        return mat

    @property
    def n(self) -> int:
        """Dimension."""
        return self.entries.shape[0]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        return self.entries[idx]

    def shifted(self, lam: Rational) -> RationalMatrix:
        """M - lam * I."""
        out = self.entries.copy()
        for idx in range(self.n):
            out[idx, idx] -= lam
        return RationalMatrix(out)

    def scaled_to_integers(self) -> tuple[np.ndarray, int]:
        """(s * M as an object array of ints, s) with s the LCM of all denominators."""
        scale = lcm_denominator(self.entries.flat)
        ints = np.empty_like(self.entries)
        for idx, val in np.ndenumerate(self.entries):
            ints[idx] = int(val * scale)
        return ints, scale

    def is_symmetric(self) -> bool:
        """Exact symmetry."""
        return bool(np.all(self.entries == self.entries.T))

    def is_zero(self) -> bool:
        """All entries zero."""
        return all(val == 0 for val in self.entries.flat)

    def rank(self) -> int:
        """Exact rank by fraction-free elimination."""
        ints, _ = self.scaled_to_integers()
        return _bareiss(ints)[0]

    def to_float(self) -> np.ndarray:
        """Float64 copy."""
        return self.entries.astype(float)


def _bareiss(mat: np.ndarray) -> tuple[int, int, int]:
    """Fraction-free row echelon form of an integer object matrix.

    Pivots are the smallest-magnitude nonzero candidates in each column. Divisions by
    the previous pivot are exact since every intermediate entry is a minor of mat.

    Returns:
        tuple[int, int, int]: (rank, last pivot, sign of the row permutation). For a
            full-rank square matrix det = sign * last pivot.
    """
    work = mat.copy()
    n_rows, n_cols = work.shape
    rank, prev, sign = 0, 1, 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        column = work[rank:, col]
        candidates = [idx for idx, val in enumerate(column) if val != 0]
        if not candidates:
            continue
        pivot_row = rank + min(candidates, key=lambda idx: abs(column[idx]))
        if pivot_row != rank:
            work[[rank, pivot_row]] = work[[pivot_row, rank]]
            sign = -sign
        pivot = work[rank, col]
        below = work[rank + 1 :, col + 1 :]
        factors = work[rank + 1 :, col]
        work[rank + 1 :, col + 1 :] = (
            below * pivot - np.outer(factors, work[rank, col + 1 :])
        ) // prev
        work[rank + 1 :, col] = 0
        prev = pivot
        rank += 1
    return rank, prev, sign


def kernel_dim(M: RationalMatrix, lam: Rational | str = 0) -> int:
    """dim Ker(M - lam I) = n - rank(M - lam I), exact."""
    return M.n - M.shifted(to_fraction(lam)).rank()


@dataclass(frozen=True)
class CharPoly:
    """Coefficients c_0..c_n of det(x I - M), c_n = 1."""

    coeffs: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        """n."""
        return len(self.coeffs) - 1

    def __call__(self, x: Rational) -> Fraction:
        """Horner evaluation."""
        out = Fraction(0)
        for coeff in reversed(self.coeffs):
            out = out * x + coeff
        return out

    @property
    def lowest_nonzero_index(self) -> int:
        """Smallest k with c_k != 0 (= n - rank for diagonalizable M)."""
        return next(idx for idx, coeff in enumerate(self.coeffs) if coeff != 0)

    def root_multiplicity(self, lam: Rational) -> int:
        """Order of vanishing at lam, by repeated synthetic division."""
        coeffs = list(self.coeffs)
        mult = 0
        while len(coeffs) > 1:
            # divide by (x - lam): quotient coefficients high to low
            quotient, rem = [], Fraction(0)
            for coeff in reversed(coeffs):
                rem = rem * lam + coeff
                quotient.append(rem)
            if rem != 0:
                break
            mult += 1
            coeffs = list(reversed(quotient[:-1]))
        return mult

    def to_dict(self) -> dict[str, Any]:
        """JSON form with exact decimal strings, lowest degree first."""
        return {
            "degree": self.degree,
            "coeffs": [fraction_str(coeff) for coeff in self.coeffs],
        }


def char_poly(M: RationalMatrix) -> CharPoly:
    """Exact characteristic polynomial via Faddeev-LeVerrier.

    The recurrence M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k runs on the
    integer-scaled A = s M (divisions by k are exact over ℤ) with sparse left
    multiplication, then c_k(M) = c_k(A) s^(k-n).

    Raises:
        LimitExceededError: If n > LIMITS.exact_limit.
    """
    size = M.n
    if size > LIMITS.exact_limit:
        raise LimitExceededError(
            f"Matrix of size {size} exceeds exact_limit={LIMITS.exact_limit}, use "
            "float eigenvalues (spectra.eigenvalues_sym) instead"
        )
    ints, scale = M.scaled_to_integers()
    sparse_rows = [
        [(j, int(ints[i, j])) for j in range(size) if ints[i, j] != 0]
        for i in range(size)
    ]
    coeffs = [0] * (size + 1)
    coeffs[size] = 1
    prev = np.zeros((size, size), dtype=object)
    zero_row = np.zeros(size, dtype=object)
    for k in range(1, size + 1):
        cur = np.empty((size, size), dtype=object)
        for i, row in enumerate(sparse_rows):
            acc = zero_row.copy()
            for j, val in row:
                acc += val * prev[j]
            cur[i] = acc
        for idx in range(size):
            cur[idx, idx] += coeffs[size - k + 1]
        trace = sum(val * cur[j, i] for i, row in enumerate(sparse_rows) for j, val in row)
        quot, rem = divmod(-trace, k)
        if rem:
            raise ArithmeticError(f"Inexact Faddeev-LeVerrier step {k=}")
        coeffs[size - k] = quot
        prev = cur
    return CharPoly(
        tuple(Fraction(coeff, scale ** (size - idx)) for idx, coeff in enumerate(coeffs))
    )


def det1(M: RationalMatrix) -> Fraction:
    """|det|_1: magnitude of the lowest nonzero coefficient of char_poly(M).

    For symmetric M this is the product of the nonzero eigenvalues. Full-rank matrices
    take the elimination shortcut |det M|. The zero matrix gives the empty product 1
    and emits EmptyProductWarning.
    """
    ints, scale = M.scaled_to_integers()
    rank, last_pivot, sign = _bareiss(ints)
    if rank == 0:
        warnings.warn(
            f"det1 of the {M.n}x{M.n} zero matrix taken as empty product 1",
            EmptyProductWarning,
            stacklevel=2,
        )
        return Fraction(1)
    if rank == M.n:
        return abs(Fraction(sign * last_pivot, scale**M.n))
    poly = char_poly(M)
    return abs(poly.coeffs[poly.lowest_nonzero_index])


def log_fraction(val: Fraction) -> float:
    """ln of a positive rational, safe for numerators beyond float range."""
    if val <= 0:
        raise ValueError(f"log of non-positive {val=}")
    return math.log(val.numerator) - math.log(val.denominator)


def logdet_window(M: RationalMatrix, size: int | None = None) -> float:
    """(1/|Q|) ln det1(M), |Q| defaulting to the matrix dimension.

    Nonnegative whenever M is integer valued, det1 then being a positive integer.
    """
    size = M.n if size is None else size
    if size < 1:
        raise ValueError(f"Invalid window {size=}")
    return log_fraction(det1(M)) / size


def det_report(M: RationalMatrix, *, include_char_poly: bool = False) -> dict[str, Any]:
    """JSON-ready determinant summary with exact decimal-string rationals.

    Keys: n, rank, scale (LCM of denominators), det1, det1_scaled (det1 of scale * M),
    logdet, empty_product and optionally char_poly.
    """
    ints, scale = M.scaled_to_integers()
    rank = _bareiss(ints)[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyProductWarning)
        det_val = det1(M)
    report: dict[str, Any] = {
        "n": M.n,
        "rank": rank,
        "scale": scale,
        "det1": fraction_str(det_val),
        "det1_scaled": fraction_str(det_val * Fraction(scale) ** rank),
        "logdet": log_fraction(det_val) / M.n if M.n else 0.0,
        "empty_product": rank == 0,
    }
    if include_char_poly:
        report["char_poly"] = char_poly(M).to_dict()
    return report
