"""Canonical JSON text for toric pairs.

Coefficients are exact rational strings such as ``"1/2"`` or ``"-1"``; float
literals are rejected on input so a file can never carry rounding.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

from .errors import KequivError
from .toric import Fan, ToricPair


def _no_floats(text: str):
    raise KequivError("float_literal", f"float literal {text!r} is not allowed; use an exact rational string")


def _rational(value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise KequivError("bad_pairfile", f"coefficient {value!r} must be an integer or a rational string")
    try:
        return Fraction(value) if isinstance(value, int) else Fraction(value.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise KequivError("bad_pairfile", f"cannot parse coefficient {value!r}") from exc


def _int_list(value, what: str) -> list[int]:
    if not isinstance(value, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in value):
        raise KequivError("bad_pairfile", f"{what} must be a list of integers")
    return value


def from_dict(data: dict) -> ToricPair:
    if not isinstance(data, dict):
        raise KequivError("bad_pairfile", "pair file must hold a JSON object")
    missing = {"rank", "rays", "cones"} - set(data)
    if missing:
        raise KequivError("bad_pairfile", "pair file is missing fields", missing=sorted(missing))
    rank = data["rank"]
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 0:
        raise KequivError("bad_pairfile", "rank must be a nonnegative integer")
    rays = [tuple(_int_list(r, "each ray")) for r in data["rays"]]
    cones = [tuple(_int_list(c, "each cone")) for c in data["cones"]]
    boundary = data.get("boundary", {}) or {}
    if not isinstance(boundary, dict):
        raise KequivError("bad_pairfile", "boundary must map ray indices to rationals")
    coeffs = {}
    for key, value in boundary.items():
        try:
            idx = int(key)
        except ValueError as exc:
            raise KequivError("bad_pairfile", f"boundary key {key!r} is not a ray index") from exc
        coeffs[idx] = _rational(value)
    label = data.get("label", "")
    if not isinstance(label, str):
        raise KequivError("bad_pairfile", "label must be a string")
    return ToricPair(Fan(rank, tuple(rays), tuple(cones)), coeffs, label)


def to_dict(pair: ToricPair) -> dict:
    return {
        "boundary": {str(k): str(v) for k, v in pair.coefficients.items()},
        "cones": [list(c) for c in pair.fan.cones],
        "label": pair.label,
        "rank": pair.fan.rank,
        "rays": [list(r) for r in pair.fan.rays],
    }


_INNER_LIST = re.compile(r"\[\s*(-?\d+(?:,\s*-?\d+)*)\s*\]")


def dumps(pair: ToricPair) -> str:
    """Indented JSON with sorted keys; integer vectors stay on one line."""
    text = json.dumps(to_dict(pair), sort_keys=True, indent=2)
    text = _INNER_LIST.sub(lambda m: "[" + ", ".join(x.strip() for x in m.group(1).split(",")) + "]", text)
    return text + "\n"


def loads(text: str) -> ToricPair:
    try:
        data = json.loads(text, parse_float=_no_floats, parse_constant=_no_floats)
    except json.JSONDecodeError as exc:
        raise KequivError("bad_pairfile", f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    return from_dict(data)


def load(path: str | Path) -> ToricPair:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise KequivError("io_error", f"cannot read {path}: {exc.strerror}") from exc
    return loads(text)


def dump(pair: ToricPair, path: str | Path) -> None:
    Path(path).write_text(dumps(pair), encoding="utf-8")
