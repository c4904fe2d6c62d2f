"""Testing related utils."""

from __future__ import annotations

from folnerspec.utils import CONFIG_DIR, ROOT


__all__ = ["CONFIG_DIR", "TEST_FILES"]

TEST_FILES: str = f"{ROOT}/tests/files"
