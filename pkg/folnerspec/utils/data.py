"""Data conversion utils:

- to_fraction: Parse ints, Fractions and "p/q" strings into exact Fractions.
- fraction_str: Exact decimal-string rendering of a rational ("p/q" or "p").
- lcm_denominator: Least common multiple of the denominators of some rationals.
- to_jsonable: Recursively convert reports (dataclasses, Fractions, numpy scalars,
    enums, tuples) into JSON-ready builtins.
- config_hash: SHA-256 of the canonical JSON form of a dict.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np


if TYPE_CHECKING:
    from collections.abc import Iterable
    from typing import Any


def to_fraction(val: Any) -> Fraction:
    """Convert ints, Fractions and "p/q" or integer strings to an exact Fraction.

    Floats are rejected since silently rounding them would break exactness of
    finite sections. Pass floats as strings ("0.5" is parsed exactly).

    Args:
        val (int | Fraction | str): Value to convert.

    Returns:
        Fraction: Exact rational value.

    Raises:
        TypeError: If val is a float, bool or any other unsupported type.
        ValueError: If val is a string that does not parse as a rational.
    """
    if isinstance(val, bool):
        raise TypeError(f"Expected rational, got bool {val=}")
    if isinstance(val, Fraction):
        return val
    if isinstance(val, int | np.integer):
        return Fraction(int(val))
    if isinstance(val, str):
        try:
            return Fraction(val.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"Invalid rational string {val=}") from exc
    raise TypeError(
        f"Expected int, Fraction or 'p/q' string, got {type(val).__name__} {val=}"
    )


def fraction_str(val: Fraction | int) -> str:
    """Render a rational exactly, e.g. Fraction(1, 3) -> "1/3", Fraction(4) -> "4"."""
    return str(Fraction(val))


def lcm_denominator(values: Iterable[Fraction | int]) -> int:
    """Least common multiple of the denominators of values (1 if empty)."""
    out = 1
    for val in values:
        out = math.lcm(out, Fraction(val).denominator)
    return out


def to_jsonable(obj: Any) -> Any:
    """Recursively convert obj into JSON-ready builtins.

    Fractions become exact "p/q" strings (never floats), numpy arrays become lists,
    enum members their values, dataclasses dicts of their fields and dict keys strings.
    """
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, bool | str | int | type(None)):
        return obj
    if isinstance(obj, float | np.floating):
        val = float(obj)
        return val if math.isfinite(val) else str(val)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(itm) for itm in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return {
            fld.name: to_jsonable(getattr(obj, fld.name))
            for fld in dataclasses.fields(obj)
            if fld.repr
        }
    if isinstance(obj, dict):
        return {_json_key(key): to_jsonable(val) for key, val in obj.items()}
    if isinstance(obj, list | tuple | set | frozenset):
        return [to_jsonable(itm) for itm in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"Cannot convert {type(obj).__name__} to JSON")


def _json_key(key: Any) -> str:
    if isinstance(key, Enum):
        return str(key.value)
    if isinstance(key, tuple):
        return ",".join(map(str, key))
    if isinstance(key, Fraction):
        return fraction_str(key)
    return str(getattr(key, "hex", lambda: key)())


def config_hash(config: dict[str, Any]) -> str:
    """SHA-256 hex digest of the canonical (sorted keys, compact) JSON of config."""
    canonical = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
