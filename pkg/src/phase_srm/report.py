"""Problem-spec parsing and report serialization.

Reports are JSON documents in which every real is written with 17
significant digits, so ``load_report(dump_report(doc)) == doc`` holds
exactly for finite floats.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ValidationError
from .symstate import StateSpec, make_state_spec


class SpecParseError(Exception):
    """The spec file is not well-formed JSON or lacks required structure."""


@dataclass(frozen=True)
class ProblemSpec:
    state: StateSpec
    copies: int
    sample_points: int | str
    tolerance: float = 1e-10
    seed: int | None = None
    trials: int | None = None

    def resolved_M(self, copies: int | None = None) -> int:
        N = self.copies if copies is None else copies
        if self.sample_points == "minimal":
            return self.state.K * N + 1
        return int(self.sample_points)

    def echo(self) -> dict:
        return {
            "amplitudes": [[z.real, z.imag] for z in self.state.c],
            "K": self.state.K,
            "copies": self.copies,
            "sample_points": self.sample_points,
            "M": self.resolved_M(),
            "tolerance": self.tolerance,
            "seed": self.seed,
            "trials": self.trials,
        }


def _parse_amplitude(raw: Any) -> complex:
    if isinstance(raw, bool):
        raise SpecParseError(f"amplitude {raw!r} is not a number")
    if isinstance(raw, (int, float)):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw
    ):
        return complex(raw[0], raw[1])
    raise SpecParseError(f"amplitude {raw!r} must be a number or an [re, im] pair")


def parse_problem(text: str) -> ProblemSpec:
    """Parse and validate a problem spec.

    Raises :class:`SpecParseError` for malformed documents and
    :class:`~phase_srm.errors.ValidationError` for well-formed but invalid
    content.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise SpecParseError(f"invalid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise SpecParseError("spec must be a JSON object")
    for key in ("amplitudes", "copies"):
        if key not in doc:
            raise SpecParseError(f"missing field {key!r}")
    if not isinstance(doc["amplitudes"], list):
        raise SpecParseError("'amplitudes' must be a list")
    amps = [_parse_amplitude(a) for a in doc["amplitudes"]]
    copies = doc["copies"]
    if not isinstance(copies, int) or isinstance(copies, bool):
        raise SpecParseError("'copies' must be an integer")
    M = doc.get("sample_points", "minimal")
    if isinstance(M, bool) or not (isinstance(M, int) or M == "minimal"):
        raise SpecParseError("'sample_points' must be an integer or \"minimal\"")
    tol = doc.get("tolerance", 1e-10)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)):
        raise SpecParseError("'tolerance' must be a number")
    for key in ("seed", "trials"):
        val = doc.get(key)
        if val is not None and (not isinstance(val, int) or isinstance(val, bool)):
            raise SpecParseError(f"'{key}' must be an integer")

    state = make_state_spec(amps)
    if copies < 1:
        raise ValidationError("'copies' must be >= 1")
    if isinstance(M, int) and M < 1:
        raise ValidationError("'sample_points' must be >= 1")
    if tol <= 0:
        raise ValidationError("'tolerance' must be positive")
    if doc.get("trials") is not None and doc["trials"] < 1:
        raise ValidationError("'trials' must be >= 1")
    return ProblemSpec(state, copies, M, float(tol), doc.get("seed"), doc.get("trials"))


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def _emit(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_emit(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _emit(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        return format(obj, ".17g") if not obj.is_integer() or abs(obj) >= 1e17 else f"{obj:.1f}"
    return json.dumps(obj)


def dump_report(doc: dict, indent: int = 2) -> str:
    return _emit(_plain(doc), indent, 0) + "\n"


def load_report(text: str) -> dict:
    return json.loads(text)
