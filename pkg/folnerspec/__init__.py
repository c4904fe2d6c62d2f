"""folnerspec: spectral invariants of pattern-invariant operators on aperiodic graphs,
approximated by finite sections over Følner windows.

import folnerspec as fsp

g = fsp.lattice_graph(1)
est = fsp.ids_run(fsp.laplacian_operator(g), [100, 200, 400])
"""

from __future__ import annotations

from importlib.metadata import PackageNotFoundError, version

from folnerspec import enums, exactla, graph, io, operators, pattern, spectra, typing, utils
from folnerspec.enums import GeneratorName, Key, RuleOp, Task
from folnerspec.exactla import (
    CharPoly,
    RationalMatrix,
    char_poly,
    det1,
    det_report,
    kernel_dim,
    logdet_window,
)
from folnerspec.graph import (
    InfiniteGraph,
    RootedBall,
    Window,
    ball,
    boundary_ratio,
    decorated_lattice,
    folner_window,
    graph_distance,
    graph_from_descriptor,
    inner_boundary,
    lattice_graph,
    max_ball_size,
    pendant_chain,
    substitution_chain,
)
from folnerspec.io import save_fig, save_report_json
from folnerspec.operators import (
    FiniteSection,
    PatternOperator,
    adjacency_operator,
    add,
    degree_potential,
    entry,
    finite_section,
    identity_operator,
    laplacian_operator,
    letter_potential,
    mul,
    norm_bound,
    operator_from_dict,
    orbit_table_operator,
    pattern_potential,
    random_gram_operator,
    scale,
    star,
    sup_entry,
    validate_invariance,
    window_trace,
)
from folnerspec.pattern import (
    PatternCode,
    automorphisms,
    canonical_code,
    frequency_table,
    isomorphisms,
    orbit_index,
    pattern_census,
    root_fixing_orbits,
)
from folnerspec.spectra import (
    eigenspace_run,
    eigenvalues_sym,
    ground_state_run,
    ids_run,
    logdet_run,
    moment_plot,
    moment_run,
    norm_run,
    positivity_run,
    staircase,
    staircase_plot,
    sup_distance,
    trace_property_run,
    uniform_convergence_diag,
)
from folnerspec.utils import LIMITS, PKG_DIR, ROOT, patch_limits


PKG_NAME = "folnerspec"
try:
    __version__ = version(PKG_NAME)
except PackageNotFoundError:
    __version__ = "0+unknown"  # package not installed
