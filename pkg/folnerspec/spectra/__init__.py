"""Spectra of finite sections: staircases, IDS estimates, moments, kernel densities
and log-determinants along Følner sequences.
"""

from __future__ import annotations

from folnerspec.spectra.helpers import (
    SpectralStaircase,
    eigenvalues_sym,
    lemma_polynomial_bracket,
    staircase,
    sup_distance,
    z_adjacency_ids,
    z_laplacian_ids,
)
from folnerspec.spectra.plotly import moment_plot, staircase_plot
from folnerspec.spectra.runs import (
    ConvergenceReport,
    IDSEstimate,
    KernelReport,
    LogdetReport,
    MomentReport,
    NormReport,
    PositivityReport,
    TraceReport,
    closed_walk_weight,
    eigenspace_run,
    ground_state_run,
    ids_run,
    logdet_run,
    moment_run,
    norm_run,
    positivity_run,
    run_levels,
    staircase_logdet,
    trace_property_run,
    uniform_convergence_diag,
)
