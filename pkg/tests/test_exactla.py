from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

import folnerspec as fsp
from folnerspec.exactla import RationalMatrix, log_fraction, logdet_window
from folnerspec.utils import EmptyProductWarning, LimitExceededError, patch_limits


def tridiag(size: int) -> RationalMatrix:
    """Dirichlet Laplacian of the path on size vertices."""
    rows = [[0] * size for _ in range(size)]
    for idx in range(size):
        rows[idx][idx] = 2
        if idx + 1 < size:
            rows[idx][idx + 1] = rows[idx + 1][idx] = -1
    return RationalMatrix.from_rows(rows)


def random_rational(size: int, seed: int, rank: int | None = None) -> RationalMatrix:
    """Random symmetric rational matrix, optionally of reduced rank."""
    rng = np.random.default_rng(seed)
    rank = size if rank is None else rank
    nums = rng.integers(-4, 5, size=(size, rank))
    dens = rng.integers(1, 4, size=(size, rank))
    factor = [
        [Fraction(int(p), int(q)) for p, q in zip(num_row, den_row, strict=True)]
        for num_row, den_row in zip(nums, dens, strict=True)
    ]
    rows = [
        [
            sum((factor[i][k] * factor[j][k] for k in range(rank)), Fraction(0))
            for j in range(size)
        ]
        for i in range(size)
    ]
    return RationalMatrix.from_rows(rows)


def to_sympy(mat: RationalMatrix) -> sympy.Matrix:
    return sympy.Matrix(
        mat.n,
        mat.n,
        lambda i, j: sympy.Rational(mat[i, j].numerator, mat[i, j].denominator),
    )


def test_rational_matrix_constructors() -> None:
    mat = RationalMatrix.from_rows([[1, "1/2"], ["1/2", Fraction(-3)]])
    assert mat.n == len(mat) == 2
    assert mat[0, 1] == Fraction(1, 2)
    assert mat.is_symmetric()
    assert not mat.is_zero()
    assert RationalMatrix.from_rows([[0, 0], [0, 0]]).is_zero()

    ints, scale = mat.scaled_to_integers()
    assert scale == 2
    assert ints.tolist() == [[2, 1], [1, -6]]

    np.testing.assert_array_equal(RationalMatrix.identity(3).to_float(), np.eye(3))
    assert RationalMatrix.diag(["1/3", 2])[0, 0] == Fraction(1, 3)
    sparse = RationalMatrix.from_sparse_rows([{1: Fraction(5)}, {}], 2)
    assert sparse[0, 1] == 5
    assert sparse[1, 1] == 0
    assert mat.shifted(Fraction(1))[1, 1] == -4

    with pytest.raises(ValueError, match="Row 1 has length 1, expected 2"):
        RationalMatrix.from_rows([[1, 2], [3]])
    with pytest.raises(ValueError, match="must be square"):
        RationalMatrix(np.zeros((2, 3), dtype=object))


@pytest.mark.parametrize(
    ("size", "seed", "rank"), [(5, 0, None), (6, 1, 3), (8, 2, 1), (7, 3, 6)]
)
def test_rank_and_kernel_match_sympy(size: int, seed: int, rank: int | None) -> None:
    mat = random_rational(size, seed, rank)
    sym = to_sympy(mat)
    assert mat.rank() == sym.rank()
    assert fsp.kernel_dim(mat) == size - sym.rank()
    lam = Fraction(1, 2)
    shifted = sym - sympy.Rational(1, 2) * sympy.eye(size)
    assert fsp.kernel_dim(mat, lam) == size - shifted.rank()


@pytest.mark.parametrize(("size", "seed", "rank"), [(4, 0, None), (6, 4, 2), (5, 5, 4)])
def test_char_poly_matches_sympy(size: int, seed: int, rank: int | None) -> None:
    mat = random_rational(size, seed, rank)
    poly = fsp.char_poly(mat)
    x = sympy.Symbol("x")
    expected = to_sympy(mat).charpoly(x).all_coeffs()[::-1]
    assert poly.degree == size
    assert poly.coeffs[-1] == 1
    assert [sympy.Rational(c.numerator, c.denominator) for c in poly.coeffs] == expected
    assert poly.lowest_nonzero_index == fsp.kernel_dim(mat)
    assert poly.root_multiplicity(Fraction(0)) == fsp.kernel_dim(mat)
    assert poly(Fraction(0)) == poly.coeffs[0]
    assert poly.to_dict()["degree"] == size


def test_char_poly_tridiag() -> None:
    poly = fsp.char_poly(tridiag(3))
    # det(xI - L) = x^3 - 6x^2 + 10x - 4
    assert poly.coeffs == (-4, 10, -6, 1)
    assert poly.to_dict() == {"degree": 3, "coeffs": ["-4", "10", "-6", "1"]}
    assert poly.root_multiplicity(Fraction(2)) == 1
    assert poly.root_multiplicity(Fraction(1)) == 0


def test_char_poly_limit() -> None:
    with patch_limits(exact_limit=4), pytest.raises(LimitExceededError):
        fsp.char_poly(tridiag(5))


@pytest.mark.parametrize("size", [1, 2, 5, 17, 40])
def test_det1_path_laplacian(size: int) -> None:
    assert fsp.det1(tridiag(size)) == size + 1
    assert logdet_window(tridiag(size)) == pytest.approx(math.log(size + 1) / size)


@pytest.mark.parametrize(("size", "seed", "rank"), [(5, 7, 2), (6, 8, 5), (4, 9, None)])
def test_det1_is_product_of_nonzero_eigenvalues(
    size: int, seed: int, rank: int | None
) -> None:
    mat = random_rational(size, seed, rank)
    eigs = np.linalg.eigvalsh(mat.to_float())
    nonzero = eigs[np.abs(eigs) > 1e-9]
    assert float(fsp.det1(mat)) == pytest.approx(abs(np.prod(nonzero)), rel=1e-8)


def test_det1_singular_integer() -> None:
    # adjacency of the path on 3 vertices has eigenvalues -sqrt2, 0, sqrt2
    mat = RationalMatrix.from_rows([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    assert fsp.det1(mat) == 2
    assert fsp.kernel_dim(mat) == 1


def test_det1_zero_matrix() -> None:
    with pytest.warns(EmptyProductWarning, match="empty product"):
        assert fsp.det1(RationalMatrix.from_rows([[0, 0], [0, 0]])) == 1


def test_det1_of_integer_matrix_at_least_one() -> None:
    for seed in range(5):
        mat = random_rational(6, seed, rank=4)
        ints, _ = mat.scaled_to_integers()
        det_val = fsp.det1(RationalMatrix(ints))
        assert det_val.denominator == 1
        assert det_val >= 1
        assert logdet_window(RationalMatrix(ints)) >= 0


def test_log_fraction() -> None:
    huge = Fraction(10**400 + 1, 3)
    assert log_fraction(huge) == pytest.approx(400 * math.log(10) - math.log(3))
    with pytest.raises(ValueError, match="log of non-positive"):
        log_fraction(Fraction(0))
    with pytest.raises(ValueError, match="Invalid window size=0"):
        logdet_window(tridiag(2), size=0)


def test_det_report() -> None:
    mat = RationalMatrix.from_rows([["1/2", 0, 0], [0, "3/4", 0], [0, 0, 0]])
    report = fsp.det_report(mat, include_char_poly=True)
    assert report["n"] == 3
    assert report["rank"] == 2
    assert report["scale"] == 4
    assert report["det1"] == "3/8"
    assert report["det1_scaled"] == "6"
    assert report["logdet"] == pytest.approx(math.log(3 / 8) / 3)
    assert not report["empty_product"]
    assert report["char_poly"]["coeffs"] == ["0", "3/8", "-5/4", "1"]

    zero = fsp.det_report(RationalMatrix.from_rows([[0]]))
    assert zero["empty_product"]
    assert zero["det1"] == "1"
