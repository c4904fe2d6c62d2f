"""Enums used as keys/accessors for configs, reports and dataframes."""

from __future__ import annotations

import sys
from enum import Enum, unique
from typing import TYPE_CHECKING


if TYPE_CHECKING:
    from typing import Any

    from typing_extensions import Self


# TODO: remove following definition of StrEnum once Python 3.11+
if sys.version_info >= (3, 11):
    from enum import StrEnum
else:

    class StrEnum(str, Enum):
        """Enum where members are also (and must be) strings.

        Copied from std lib due to being 3.11+.
        """

        def __new__(cls, *values: Any) -> Self:
            """Values must already be str."""
            if len(values) > 3:
                raise TypeError(f"too many arguments for str(): {values!r}")
            if len(values) == 1 and not isinstance(values[0], str):
                raise TypeError(f"{values[0]!r} is not a string")
            value = str(*values)
            member = str.__new__(cls, value)
            member._value_ = value
            return member

        def __str__(self) -> str:
            """Return the member value."""
            return str(self._value_)


class LabelEnum(StrEnum):
    """StrEnum with optional label and description attributes.

    Simply add label and description as a tuple starting with the key's value.
    """

    def __new__(cls, val: str, label: str, desc: str = "") -> Self:
        """Create a new class from a value, label, and description. Label and
        description are optional.
        """
        member = str.__new__(cls, val)
        member._value_ = val
        member.__dict__ |= dict(label=label, desc=desc)
        return member

    def __repr__(self) -> str:
        """Return label if available, else type name and value."""
        return self.label or f"{type(self).__name__}.{self.name}"

    def __reduce_ex__(self, proto: object) -> tuple[type, tuple[str]]:
        """Return as a string when pickling so renamed enums can still be unpickled."""
        return str, (self.value,)

    @property
    def label(self) -> str:
        """Make label read-only."""
        return self.__dict__["label"]

    @property
    def description(self) -> str:
        """Make description read-only."""
        return self.__dict__["desc"]


@unique
class Task(LabelEnum):
    """Experiment tasks runnable from the CLI."""

    census = "census", "Pattern census", "count r-patterns in one window"
    frequencies = "frequencies", "Pattern frequencies", "frequencies per Følner level"
    moments = "moments", "Trace moments", "normalized Tr(B_n^k) with error bounds"
    ids = "ids", "Integrated density of states", "staircases and Cauchy distances"
    ground_state = "ground-state", "Ground-state density", "exact dim Ker(B_n)/|Q_n|"
    eigenspace = "eigenspace", "Eigenspace density", "dim Ker(B_n - λ) vs squared"
    logdet = "logdet", "Log-determinant", "exact det1 and normalized log"
    converge = "converge", "Uniform convergence", "staircase convergence certificate"
    invariance = "invariance", "Pattern invariance", "isomorphism invariance check"
    norm = "norm", "Norm bound", "spectral radius vs norm bound"
    trace = "trace", "Trace property", "window trace of AB vs BA"


@unique
class GeneratorName(LabelEnum):
    """Built-in infinite graph generators."""

    lattice = "lattice", "ℤᵈ lattice", "nearest-neighbor lattice graph"
    decorated_lattice = (
        "decorated_lattice",
        "Decorated ℤ²",
        "ℤ² with Bernoulli diagonal edges",
    )
    pendant_chain = "pendant_chain", "Pendant chain", "ℤ with k pendant leaves per site"
    substitution_chain = (
        "substitution_chain",
        "Fibonacci chain",
        "ℤ with Fibonacci substitution letters",
    )


@unique
class RuleOp(LabelEnum):
    """Node types of serialized operator rule trees."""

    adjacency = "adjacency", "Adjacency"
    identity = "identity", "Identity"
    degree = "degree", "Degree potential"
    letters = "letters", "Letter potential"
    potential = "potential", "Pattern potential"
    orbit_table = "orbit_table", "Orbit table"
    add = "add", "Sum"
    mul = "mul", "Product"
    scale = "scale", "Scalar multiple"
    star = "star", "Adjoint"
    laplacian = "laplacian", "Graph Laplacian"
    random_gram = "random_gram", "Random C*C"


@unique
class Key(LabelEnum):
    """Keys used to access report entries and dataframe columns."""

    level = "level", "Følner level n"
    n_vertices = "n_vertices", "|Q_n|"
    code = "code", "Pattern code (hex)"
    count = "count", "Pattern count"
    frequency = "frequency", "Empirical frequency"
    moment = "moment", "Tr(B_n^k)/|Q_n|"
    moment_bound = "moment_bound", "Boundary error bound"
    walk_moment = "walk_moment", "Frequency-weighted walk moment"
    lam = "lambda", "λ"
    ids = "N", "N(λ)"
    jump = "jump", "Jump J(λ)"
    sup_dist = "sup_distance", "sup |N_m - N_n|"
    kernel_dim = "kernel_dim", "dim Ker"
    kernel_density = "kernel_density", "dim Ker/|Q_n|"
    squared_kernel_dim = "squared_kernel_dim", "dim Ker(p(A-λ)²i)"
    boundary = "boundary", "|∂Q_n|"
    det1 = "det1", "|det|₁"
    logdet = "logdet", "log det_Q"
    fk_estimate = "fk_estimate", "Fuglede-Kadison estimate"
    scale = "scale", "Integer scaling"
    spectral_radius = "spectral_radius", "Spectral radius"
    norm_bound = "norm_bound", "Norm bound K"
    min_eig = "min_eig", "Minimal eigenvalue"
    trace_diff = "trace_diff", "|tr(AB) - tr(BA)|/|Q_n|"
    trace_bound = "trace_bound", "Trace property bound"
    passed = "passed", "Check passed"
