from __future__ import annotations

import os

import pytest

import folnerspec.utils.testing
from folnerspec.utils import (
    CONFIG_DIR,
    LIMITS,
    PKG_DIR,
    ROOT,
    ConfigError,
    LimitExceededError,
    UnsupportedGeneratorError,
    patch_limits,
)
from folnerspec.utils.testing import TEST_FILES


def test_dir_globals() -> None:
    assert os.path.isdir(PKG_DIR)
    assert os.path.isdir(ROOT)
    assert os.path.dirname(PKG_DIR) == ROOT
    assert set(os.listdir(ROOT)) >= {"folnerspec", "tests"}
    assert os.path.isdir(CONFIG_DIR)
    assert CONFIG_DIR == f"{PKG_DIR}/configs"
    assert folnerspec.utils.testing.CONFIG_DIR == CONFIG_DIR
    assert os.path.isdir(TEST_FILES)


def test_patch_limits() -> None:
    orig = LIMITS.exact_limit
    with patch_limits(exact_limit=5, max_ball_radius=2) as limits:
        assert limits.exact_limit == LIMITS.exact_limit == 5
        assert LIMITS.max_ball_radius == 2
    assert LIMITS.exact_limit == orig
    assert LIMITS.max_ball_radius == 12


def test_patch_limits_restores_on_error() -> None:
    orig = LIMITS.dense_limit
    with pytest.raises(RuntimeError, match="boom"), patch_limits(dense_limit=3):
        raise RuntimeError("boom")
    assert LIMITS.dense_limit == orig


def test_patch_limits_unknown_key() -> None:
    with (
        pytest.raises(ValueError, match="Unknown limits \\['foo'\\]"),
        patch_limits(foo=1),
    ):
        pass


def test_error_hierarchy() -> None:
    assert issubclass(LimitExceededError, ValueError)
    assert issubclass(UnsupportedGeneratorError, ValueError)
    err = ConfigError("expected int", "operator.radius")
    assert err.location == "operator.radius"
    assert str(err) == "operator.radius: expected int"
    assert str(ConfigError("bad")) == "bad"
