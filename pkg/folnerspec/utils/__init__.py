"""folnerspec utility functions, error classes and library-wide limits."""

# ruff: noqa: E402 (Module level import not at top of file)

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, fields
from typing import TYPE_CHECKING


if TYPE_CHECKING:
    from collections.abc import Generator


PKG_DIR: str = os.path.dirname(os.path.dirname(__file__))
ROOT: str = os.path.dirname(PKG_DIR)
CONFIG_DIR: str = f"{PKG_DIR}/configs"  # bundled experiment configs


class LimitExceededError(ValueError):
    """A resource guard (ball radius, ball size, dense or exact size) was exceeded."""


class UnsupportedGeneratorError(ValueError):
    """Unknown graph generator or unsupported generator parameters."""


class ConfigError(ValueError):
    """Invalid experiment config. location points at the offending entry."""

    def __init__(self, msg: str, location: str = "") -> None:
        """Store location next to the message."""
        self.location = location
        super().__init__(f"{location}: {msg}" if location else msg)


class PartialResultWarning(UserWarning):
    """Some Følner levels were skipped because a resource guard was hit."""


class PositivityWarning(UserWarning):
    """A finite section declared positive has eigenvalues below -tol."""


class EmptyProductWarning(UserWarning):
    """det1 of an all-zero matrix was taken as the empty product 1."""


@dataclass
class Limits:
    """Resource guards shared across modules. Mutate via patch_limits()."""

    max_ball_radius: int = 12
    max_ball_size: int = 64
    dense_limit: int = 6000
    exact_limit: int = 400


LIMITS = Limits()


@contextmanager
def patch_limits(**kwargs: int) -> Generator[Limits, None, None]:
    """Temporarily override entries of LIMITS and restore them on context exit.

        with patch_limits(exact_limit=100):
            ground_state_run(...)

    Args:
        **kwargs: Limits field names and their temporary values.

    Yields:
        Limits: The patched global limits.
    """
    valid = {fld.name for fld in fields(Limits)}
    if bad_keys := set(kwargs) - valid:
        raise ValueError(f"Unknown limits {sorted(bad_keys)}, valid are {sorted(valid)}")

    saved = {key: getattr(LIMITS, key) for key in kwargs}
    for key, val in kwargs.items():
        setattr(LIMITS, key, val)
    try:
        yield LIMITS
    finally:
        for key, val in saved.items():
            setattr(LIMITS, key, val)


from folnerspec.utils.data import (
    config_hash,
    fraction_str,
    lcm_denominator,
    to_fraction,
    to_jsonable,
)
from folnerspec.utils.testing import TEST_FILES
