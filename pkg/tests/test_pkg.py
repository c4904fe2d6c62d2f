from __future__ import annotations

import os
import sys
from glob import glob
from importlib.metadata import PackageNotFoundError, version
from types import ModuleType

import pytest

import folnerspec as fsp


def test_pkg_metadata() -> None:
    try:
        assert fsp.__version__ == version(fsp.PKG_NAME)
    except PackageNotFoundError:
        pytest.skip("folnerspec not installed")

    try:
        import tomllib

        with open(f"{fsp.ROOT}/pyproject.toml", mode="rb") as file:
            pyproject = tomllib.load(file)

        assert pyproject["project"]["name"] == fsp.PKG_NAME
        assert pyproject["project"]["version"] == fsp.__version__
    except ImportError:
        pass  # tomllib only available in 3.11+


def test_all_modules_reexported() -> None:
    # re-import to make sure submodules are exported by __init__ and not just
    # importable because pytest already imported them
    sys.modules.pop(fsp.PKG_NAME, None)

    import folnerspec

    try:
        first_level_modules = [
            os.path.basename(os.path.splitext(file)[0])
            for file in glob(f"{fsp.PKG_DIR}/*.py")
            if "__init__.py" not in file
        ]
        for module_name in first_level_modules:
            if module_name == "cli":  # entry point, not part of the library API
                continue
            assert hasattr(folnerspec, module_name), (
                f"{module_name} not exported in {fsp.PKG_NAME}/__init__.py"
            )
            assert isinstance(getattr(folnerspec, module_name), ModuleType)
    finally:
        sys.modules[fsp.PKG_NAME] = folnerspec


def test_bundled_configs_ship_with_package() -> None:
    configs = glob(f"{fsp.PKG_DIR}/configs/*.json")
    assert len(configs) >= 10
