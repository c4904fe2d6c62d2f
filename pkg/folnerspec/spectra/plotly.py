"""Plotly figures of spectral staircases and trace moments.

Example usage:
    est = ids_run(laplacian_operator(lattice_graph(1)), [100, 200, 400])
    fig = staircase_plot(est, reference=z_laplacian_ids)
    fig.show()
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import plotly
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from folnerspec.enums import Key
from folnerspec.spectra.runs import IDSEstimate


if TYPE_CHECKING:
    from collections.abc import Callable, Sequence
    from typing import Any

    from folnerspec.spectra.helpers import SpectralStaircase
    from folnerspec.spectra.runs import MomentReport


def staircase_plot(
    staircases: IDSEstimate | dict[Any, SpectralStaircase],
    reference: Callable[[np.ndarray], np.ndarray] | None = None,
    *,
    colors: Sequence[str] | None = None,
    reference_kwargs: dict[str, Any] | None = None,
    n_ref_points: int = 400,
) -> go.Figure:
    """Step plot of N(λ) per Følner level, optionally against an analytic IDS.

    Args:
        staircases (IDSEstimate | dict[Any, SpectralStaircase]): An ids_run result or
            a mapping of trace names (e.g. levels) to staircases.
        reference (Callable, optional): Analytic IDS drawn as a dashed line.
        colors (Sequence[str], optional): Trace colors. Defaults to
            plotly.colors.qualitative.Plotly.
        reference_kwargs (dict, optional): Passed to the reference line's
            go.Scatter.line.
        n_ref_points (int): Points at which reference is evaluated. Defaults to 400.

    Returns:
        go.Figure: Staircase figure.
    """
    if isinstance(staircases, IDSEstimate):
        staircases = {f"n={lvl}": stair for lvl, stair in staircases.staircases.items()}
    if not staircases:
        raise ValueError("No staircases to plot")
    colors = colors or plotly.colors.qualitative.Plotly

    fig = go.Figure()
    lo, hi = np.inf, -np.inf
    for idx, (name, stair) in enumerate(staircases.items()):
        pts = stair.breakpoints
        if len(pts) == 0:
            continue
        upper = stair.norm_bound if stair.norm_bound is not None else pts[-1]
        x_vals = np.concatenate([[pts[0]], pts, [max(upper, pts[-1])]])
        y_vals = np.concatenate([[0], stair(pts), [stair(pts[-1])]])
        lo, hi = min(lo, x_vals[0]), max(hi, x_vals[-1])
        fig.add_scatter(
            x=x_vals,
            y=y_vals,
            mode="lines",
            name=str(name),
            line=dict(shape="hv", color=colors[idx % len(colors)]),
            hovertemplate=f"{name}<br>λ = %{{x:.4g}}<br>N = %{{y:.4f}}<extra></extra>",
        )

    if reference is not None and np.isfinite(lo):
        grid = np.linspace(lo, hi, n_ref_points)
        line_defaults = dict(dash="dash", color="gray")
        fig.add_scatter(
            x=grid,
            y=reference(grid),
            mode="lines",
            name="reference",
            line=line_defaults | (reference_kwargs or {}),
        )

    fig.layout.xaxis.title = Key.lam.label
    fig.layout.yaxis.title = Key.ids.label
    fig.layout.legend.update(x=0.02, y=0.98, xanchor="left", yanchor="top")
    return fig


def moment_plot(report: MomentReport) -> go.Figure:
    """Section moments with their error bars next to the walk moments per level,
    plus the bound itself on a log axis.
    """
    levels = report.levels
    moments = [float(report.moments[lvl]) for lvl in levels]
    walks = [float(report.walk_moments[lvl]) for lvl in levels]
    bounds = [float(report.bounds[lvl]) for lvl in levels]

    fig = make_subplots(rows=1, cols=2, subplot_titles=("moments", "error bound"))
    fig.add_scatter(
        x=levels,
        y=moments,
        error_y=dict(type="data", array=bounds, visible=True),
        mode="markers+lines",
        name=Key.moment.label,
        row=1,
        col=1,
    )
    fig.add_scatter(
        x=levels, y=walks, mode="markers", name=Key.walk_moment.label, row=1, col=1
    )
    fig.add_scatter(
        x=levels,
        y=bounds,
        mode="markers+lines",
        name=Key.moment_bound.label,
        showlegend=False,
        row=1,
        col=2,
    )
    fig.update_xaxes(title_text=Key.level.label)
    fig.update_yaxes(type="log", row=1, col=2)
    fig.layout.title = f"k = {report.k}"
    return fig
