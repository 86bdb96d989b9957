"""Fan files in, JSON reports out."""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import errors
from .fan import FanData

SCHEMA_VERSION = 1
FIXTURES = ("p1", "p2", "p1xp1", "f1", "f2", "f3")


@dataclass(frozen=True)
class FanInput:
    fan: FanData
    nef_basis: tuple[tuple[int, ...], ...] | None
    source: str


def _int_matrix(value, name: str) -> list[list[int]]:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise errors.SchemaError(f"{name} must be an array of integer arrays", witness={"field": name})
    for row in value:
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
            raise errors.SchemaError(f"{name} must contain integers only", witness={"field": name})
    return value


def fan_from_mapping(data: dict, source: str = "<memory>") -> FanInput:
    for key in ("rank", "rays", "max_cones"):
        if key not in data:
            raise errors.SchemaError(key, witness={"field": key, "source": source})
    n = data["rank"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise errors.SchemaError("rank must be a positive integer", witness={"field": "rank"})
    rays = _int_matrix(data["rays"], "rays")
    cones = _int_matrix(data["max_cones"], "max_cones")
    if any(len(v) != n for v in rays):
        raise errors.SchemaError(f"every ray needs {n} coordinates", witness={"field": "rays"})
    m = len(rays)
    for cone in cones:
        if any(not 1 <= i <= m for i in cone):
            raise errors.SchemaError(f"cone {cone} refers to a missing ray (indices are 1-based)",
                                     witness={"field": "max_cones", "cone": cone})
    nef = data.get("nef_basis")
    if nef is not None:
        nef = tuple(tuple(row) for row in _int_matrix(nef, "nef_basis"))
    fan = FanData.from_lists(n, rays, [[i - 1 for i in cone] for cone in cones])
    return FanInput(fan=fan, nef_basis=nef, source=source)


def parse_fan_text(text: str, fmt: str, source: str = "<memory>") -> FanInput:
    try:
        if fmt == "json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except json.JSONDecodeError as exc:
        raise errors.SchemaError(f"{source}: line {exc.lineno}: {exc.msg}",
                                 witness={"line": exc.lineno}) from exc
    except tomllib.TOMLDecodeError as exc:
        raise errors.SchemaError(f"{source}: {exc}") from exc
    if not isinstance(data, dict):
        raise errors.SchemaError(f"{source}: top level must be a table")
    return fan_from_mapping(data, source)


def parse_fan_file(path: str | Path) -> FanInput:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise errors.IoError(f"cannot read {path}: {exc.strerror}", witness={"path": str(path)}) from exc
    fmt = "json" if path.suffix.lower() == ".json" else "toml"
    return parse_fan_text(text, fmt, str(path))


def load_fixture(name: str) -> FanInput:
    if name not in FIXTURES:
        raise errors.IoError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("toricmirror.fixtures").joinpath(f"{name}.toml").read_text()
    return parse_fan_text(text, "toml", f"fixture:{name}")


def fraction_str(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def jsonable(obj: Any) -> Any:
    """Fractions become "num/den" strings; tuples become lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "coeffs") and hasattr(obj, "algebra"):
        return {label: fraction_str(c) for label, c in zip(basis_labels(obj.algebra), obj.coeffs) if c}
    return str(obj)


def basis_labels(ga) -> list[str]:
    out = []
    for e in ga.basis:
        parts = [f"p{a + 1}" if k == 1 else f"p{a + 1}^{k}" for a, k in enumerate(e) if k]
        out.append("*".join(parts) or "1")
    return out


def dumps(report: dict) -> str:
    payload = {"schema_version": SCHEMA_VERSION, **report}
    return json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"
