"""I/O utils for windows, finite sections, tables, reports and figures."""

from __future__ import annotations

import json
import os
from fractions import Fraction
from typing import TYPE_CHECKING

import pandas as pd
import plotly.graph_objects as go

from folnerspec.graph import window_edges
from folnerspec.typing import FIG_EXPORT_FORMATS
from folnerspec.utils.data import fraction_str, to_jsonable


if TYPE_CHECKING:
    from collections.abc import Sequence
    from typing import Any

    from folnerspec.graph import InfiniteGraph, Window
    from folnerspec.operators import FiniteSection


def _ensure_parent(path: str) -> None:
    if parent := os.path.dirname(path):
        os.makedirs(parent, exist_ok=True)


def write_edge_list(g: InfiniteGraph, Q: Window, path: str) -> int:
    """Write the edges of the window-induced subgraph as "i j" lines of window indices.

    Returns:
        int: Number of edges written.
    """
    _ensure_parent(path)
    edges = window_edges(g, Q)
    with open(path, mode="w") as file:
        file.writelines(f"{Q.index[u]} {Q.index[w]}\n" for u, w in edges)
    return len(edges)


def write_section_mtx(section: FiniteSection, path: str) -> int:
    """Write a finite section as an exact sparse triplet file.

    The first line is "n nnz", followed by one "i j value" line per nonzero entry
    with value an exact "p/q" or integer string.

    Returns:
        int: Number of nonzero entries written.
    """
    _ensure_parent(path)
    with open(path, mode="w") as file:
        file.write(f"{len(section)} {section.nnz}\n")
        file.writelines(
            f"{i} {j} {fraction_str(val)}\n" for i, j, val in section.iter_entries()
        )
    return section.nnz


def read_section_mtx(path: str) -> tuple[int, list[tuple[int, int, Fraction]]]:
    """Inverse of write_section_mtx: (n, [(i, j, value), ...])."""
    with open(path) as file:
        size, nnz = map(int, file.readline().split())
        triplets = []
        for line in file:
            i, j, val = line.split()
            triplets.append((int(i), int(j), Fraction(val)))
    if len(triplets) != nnz:
        raise ValueError(f"{path} declares {nnz=} but holds {len(triplets)} entries")
    return size, triplets


def write_two_column(
    xs: Sequence[float], ys: Sequence[float], path: str, header: str = ""
) -> None:
    """Plain whitespace-separated two-column text for external plotting tools."""
    if len(xs) != len(ys):
        raise ValueError(f"Length mismatch: {len(xs)=} != {len(ys)=}")
    _ensure_parent(path)
    with open(path, mode="w") as file:
        if header:
            file.write(f"# {header}\n")
        file.writelines(f"{x:.17g} {y:.17g}\n" for x, y in zip(xs, ys, strict=True))


def df_to_csv(df: pd.DataFrame, path: str, **kwargs: Any) -> None:
    """Write a report table to CSV with Fractions as exact "p/q" strings and enum
    column names as their values.
    """
    _ensure_parent(path)
    out = df.rename(columns=lambda col: getattr(col, "value", col))
    out = out.map(lambda val: fraction_str(val) if isinstance(val, Fraction) else val)
    out.to_csv(path, **dict(index=False) | kwargs)


def save_report_json(report: Any, path: str, **metadata: Any) -> dict[str, Any]:
    """Write a report (dict, dataclass or anything with to_dict) as sorted, indented
    JSON. Extra keyword arguments are stored next to it (e.g. config hash, version).

    Returns:
        dict[str, Any]: The JSON-ready payload that was written.
    """
    payload = to_jsonable(report)
    if not isinstance(payload, dict):
        payload = {"report": payload}
    payload |= to_jsonable(metadata)
    _ensure_parent(path)
    with open(path, mode="w") as file:
        json.dump(payload, file, indent=2, sort_keys=True, ensure_ascii=False)
        file.write("\n")
    return payload


def save_fig(
    fig: go.Figure,
    path: str,
    *,
    plotly_config: dict[str, Any] | None = None,
    env_disable: Sequence[str] = ("CI",),
    **kwargs: Any,
) -> None:
    """Write a plotly figure to disk as standalone HTML or plotly JSON.

    Args:
        fig (go.Figure): Plotly figure.
        path (str): Output path ending in .html or .json.
        plotly_config (dict, optional): Configuration options for fig.write_html().
            Defaults to dict(showTips=False, responsive=True, displaylogo=False).
        env_disable (list[str], optional): Do nothing if any of these environment
            variables are set. Defaults to ("CI",).
        **kwargs: Keyword arguments passed to fig.write_html() or fig.write_json().
    """
    if not isinstance(fig, go.Figure):
        raise TypeError(f"Unsupported figure type {type(fig)}, expected plotly Figure")
    ext = path.rsplit(".", 1)[-1].lower()
    if ext not in FIG_EXPORT_FORMATS:
        raise ValueError(f"Unsupported {ext=}, must be one of {FIG_EXPORT_FORMATS}")
    if any(var in os.environ for var in env_disable):
        return
    _ensure_parent(path)
    if ext == "html":
        config = dict(showTips=False, responsive=True, displaylogo=False)
        fig.write_html(
            path, config=config | (plotly_config or {}), include_plotlyjs="cdn", **kwargs
        )
    else:
        fig.write_json(path, **kwargs)
