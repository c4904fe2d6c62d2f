from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

import folnerspec as fsp


if TYPE_CHECKING:
    from folnerspec.graph import DecoratedLattice, LatticeGraph, PendantChain


np_rng = np.random.default_rng(seed=0)
# random symmetric test matrix
rand_sym = np_rng.normal(size=(12, 12))
rand_sym = rand_sym + rand_sym.T


@pytest.fixture
def z1() -> LatticeGraph:
    return fsp.lattice_graph(1)


@pytest.fixture
def z2() -> LatticeGraph:
    return fsp.lattice_graph(2)


@pytest.fixture
def pendant() -> PendantChain:
    return fsp.pendant_chain(2)


@pytest.fixture
def decorated() -> DecoratedLattice:
    return fsp.decorated_lattice("1/2", seed=0)


@pytest.fixture(
    params=[
        {"generator": "lattice", "params": {"dim": 1}, "seed": None},
        {"generator": "lattice", "params": {"dim": 2}, "seed": None},
        {"generator": "decorated_lattice", "params": {"p": "1/3"}, "seed": 5},
        {"generator": "pendant_chain", "params": {"k": 3}, "seed": None},
        {"generator": "substitution_chain", "params": {}, "seed": None},
    ],
    ids=["z1", "z2", "decorated", "pendant", "fibonacci"],
)
def any_graph(request: pytest.FixtureRequest) -> fsp.InfiniteGraph:
    return fsp.graph_from_descriptor(request.param)
