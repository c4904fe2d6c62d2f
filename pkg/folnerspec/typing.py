"""Typing related: TypeAlias, generic types and so on."""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING, Literal, get_args


if TYPE_CHECKING:
    from typing import TypeAlias

VertexId: TypeAlias = tuple[int, ...]  # lattice coordinates, optionally + slot tag
Edge: TypeAlias = tuple[VertexId, VertexId]

Rational: TypeAlias = Fraction | int
SparseRow: TypeAlias = dict[VertexId, Fraction]  # nonzero entries A(x, ·)

Letter: TypeAlias = Literal["a", "b"]
LETTERS = LETTER_A, LETTER_B = get_args(Letter)

FigExportFormat: TypeAlias = Literal["html", "json"]
FIG_EXPORT_FORMATS = get_args(FigExportFormat)
