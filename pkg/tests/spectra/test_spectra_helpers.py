from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sps
from numpy.testing import assert_allclose

import folnerspec as fsp
from folnerspec.enums import Key
from folnerspec.spectra import (
    SpectralStaircase,
    lemma_polynomial_bracket,
    z_adjacency_ids,
    z_laplacian_ids,
)
from tests.conftest import rand_sym


def path_laplacian_eigs(size: int) -> np.ndarray:
    """Closed-form spectrum of the Dirichlet path Laplacian."""
    return 2 - 2 * np.cos(np.pi * np.arange(1, size + 1) / (size + 1))


def test_eigenvalues_sym_dense() -> None:
    eigs = fsp.eigenvalues_sym(rand_sym)
    assert_allclose(eigs, np.linalg.eigvalsh(rand_sym), atol=1e-10)
    assert np.all(np.diff(eigs) >= 0)


@pytest.mark.parametrize("size", [1, 2, 3, 50])
def test_eigenvalues_sym_tridiagonal(size: int) -> None:
    lap = 2 * np.eye(size) - np.eye(size, k=1) - np.eye(size, k=-1)
    eigs = fsp.eigenvalues_sym(lap)
    assert_allclose(eigs, np.sort(path_laplacian_eigs(size)), atol=1e-12)
    assert_allclose(fsp.eigenvalues_sym(sps.csr_array(lap)), eigs, atol=1e-12)


def test_eigenvalues_sym_raises() -> None:
    with pytest.raises(ValueError, match="Expected square matrix"):
        fsp.eigenvalues_sym(np.zeros((2, 3)))
    with pytest.raises(ValueError, match="not symmetric"):
        fsp.eigenvalues_sym(np.array([[0, 1], [0, 0]]))
    assert len(fsp.eigenvalues_sym(np.zeros((0, 0)))) == 0


def test_staircase_values() -> None:
    stair = fsp.staircase([2, 0, 1, 0])
    assert isinstance(stair, SpectralStaircase)
    assert stair.size == 4
    assert stair(0) == 0.5
    assert stair.left_limit(0) == 0
    assert stair(1.5) == 0.75
    assert stair(-1) == 0
    assert stair(2) == 1
    assert_allclose(stair([-1, 0, 1, 2]), [0, 0.5, 0.75, 1])
    assert_allclose(stair.breakpoints, [0, 1, 2])
    assert stair.jumps == [
        (0.0, Fraction(1, 2)),
        (1.0, Fraction(1, 4)),
        (2.0, Fraction(1, 4)),
    ]
    assert stair.jump_at(0) == Fraction(1, 2)
    assert stair.jump_at(0.5) == 0
    assert stair.jump_at(0.5, tol=0.6) == Fraction(3, 4)

    df_stair = stair.to_df()
    assert list(df_stair) == [Key.lam, Key.ids]
    assert df_stair[Key.ids].tolist() == [0.5, 0.75, 1]


def test_staircase_merge_tol() -> None:
    eigs = [0, 1e-12, 3e-12, 1]
    assert len(fsp.staircase(eigs).jumps) == 2
    stair = fsp.staircase(eigs, merge_tol=1e-13)
    assert len(stair.jumps) == 4
    assert fsp.staircase(eigs, norm_bound=100).merge_tol == pytest.approx(1e-6)


def test_staircase_padded_window() -> None:
    stair = fsp.staircase([1.0], size=4)
    assert stair(5) == 0.25
    with pytest.raises(ValueError, match="Invalid size=1 for 2 eigenvalues"):
        fsp.staircase([1, 2], size=1)
    with pytest.raises(ValueError, match="Invalid size=0"):
        fsp.staircase([])


def test_sup_distance_staircases() -> None:
    s1, s2 = fsp.staircase([0, 1]), fsp.staircase([0.5, 1])
    assert fsp.sup_distance(s1, s2) == 0.5
    assert fsp.sup_distance(s2, s1) == 0.5
    assert fsp.sup_distance(s1, s1) == 0
    # a jump of the same size at a slightly shifted position is a full jump apart
    s3 = fsp.staircase([0, 1 + 1e-6])
    assert fsp.sup_distance(s1, s3) == 0.5


def test_sup_distance_multiplicity() -> None:
    s1 = fsp.staircase([1, 2, 3])
    s2 = fsp.staircase([2, 2, 3])
    assert fsp.sup_distance(s1, s2) == pytest.approx(1 / 3)


@pytest.mark.parametrize("size", [11, 41, 161])
def test_sup_distance_to_z_laplacian(size: int) -> None:
    stair = fsp.staircase(path_laplacian_eigs(size), norm_bound=12)
    dist = fsp.sup_distance(stair, z_laplacian_ids)
    assert 0 < dist <= 2 / size


def test_reference_ids() -> None:
    assert z_laplacian_ids(2) == pytest.approx(0.5)
    assert_allclose(z_laplacian_ids([-1, 0, 4, 5]), [0, 0, 1, 1])
    assert z_adjacency_ids(0) == pytest.approx(0.5)
    assert_allclose(z_adjacency_ids([-3, -2, 2, 3]), [0, 0, 1, 1])
    # adjacency and Laplacian of Z are related by lambda -> 2 - lambda
    lams = np.linspace(-2, 2, 9)
    assert_allclose(z_adjacency_ids(lams), 1 - z_laplacian_ids(2 - lams), atol=1e-12)


@pytest.mark.parametrize("k", [1, 3, 10, 100])
@pytest.mark.parametrize("lam", [0.3, 1.0, 2.5])
def test_lemma_polynomial_bracket(k: int, lam: float) -> None:
    stair = fsp.staircase(path_laplacian_eigs(60), norm_bound=12)
    bracket = lemma_polynomial_bracket(stair, lam, k)
    assert bracket["holds"]
    assert bracket["lower"] <= bracket["value"] <= bracket["upper"]
    assert bracket["lower"] == stair(lam)


def test_lemma_polynomial_bracket_tightens() -> None:
    stair = fsp.staircase(path_laplacian_eigs(400), norm_bound=12)
    gaps = [
        lemma_polynomial_bracket(stair, 1.0, k)["value"] - float(stair(1.0))
        for k in (2, 20, 200)
    ]
    assert gaps == sorted(gaps, reverse=True)
    with pytest.raises(ValueError, match="Invalid k=0"):
        lemma_polynomial_bracket(stair, 1.0, 0)
