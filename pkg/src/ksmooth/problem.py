"""Reading and writing problem, space and operator JSON documents.

Space::

    {"dim": n, "norm": {"type": "polyhedral", "vertices": [[expr, ...], ...],
                        "facets": [[expr, ...], ...]}            # facets optional
                     | {"type": "lp", "p": number}
                     | {"type": "l1"} | {"type": "linf"}}

Operator (rows indexed by the codomain)::

    {"domain": Space, "codomain": Space, "matrix": [[expr, ...], ...]}

A problem is an operator document with an optional ``"options"`` object
holding ``scalar_mode`` (exact|float), ``eps`` and ``method``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import numeric as nm
from . import spaces as sp
from .errors import KSmoothError, ParseError
from .operators import Operator
from .order import METHODS
from .spaces import Lp, Space

SCALAR_MODES = ("exact", "float")


@dataclass
class Options:
    scalar_mode: str | None = None
    eps: float | None = None
    method: str = "auto"


@dataclass
class Problem:
    space_x: Space
    space_y: Space
    matrix: tuple[tuple, ...]
    options: Options = field(default_factory=Options)

    def operator(self) -> Operator:
        return Operator(self.space_x, self.space_y, self.matrix)


def parse_scalar(value: Any, mode: str):
    if isinstance(value, bool):
        raise ParseError(f"not a scalar: {value!r}")
    if isinstance(value, str):
        try:
            s = nm.scalar_parse(value)
        except KSmoothError as exc:
            if mode == "float":
                try:
                    return float(value)
                except ValueError:
                    pass
            raise ParseError(f"bad scalar {value!r}: {exc}") from exc
        return s if mode == "exact" else float(s)
    if isinstance(value, int):
        return nm.QSqrt2(value) if mode == "exact" else float(value)
    if isinstance(value, float):
        if mode == "exact":
            raise ParseError(
                f"float literal {value!r} in exact mode; write it as an expression string"
            )
        return value
    raise ParseError(f"not a scalar: {value!r}")


def _vectors(rows: Any, mode: str, what: str) -> list[tuple]:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{what} must be a list of lists")
    return [tuple(parse_scalar(c, mode) for c in r) for r in rows]


def _norm_type(obj: Any) -> str:
    try:
        return obj["norm"]["type"]
    except (TypeError, KeyError) as exc:
        raise ParseError("space needs a norm object with a type") from exc


def is_lp_json(obj: Any) -> bool:
    return _norm_type(obj) == "lp"


def space_from_json(obj: Any, mode: str = "exact", name: str = "") -> Space:
    if not isinstance(obj, dict) or "dim" not in obj or "norm" not in obj:
        raise ParseError("space must be an object with 'dim' and 'norm'")
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"dim must be a positive integer, got {dim!r}")
    norm = obj["norm"]
    kind = _norm_type(obj)
    try:
        if kind == "l1":
            space = sp.l1(dim)
        elif kind == "linf":
            space = sp.linf(dim)
        elif kind == "lp":
            p = norm.get("p")
            if isinstance(p, bool) or not isinstance(p, (int, float)):
                raise ParseError("lp norm needs a numeric 'p'")
            return sp.lp(dim, p)
        elif kind == "polyhedral":
            verts = _vectors(norm.get("vertices"), mode, "vertices")
            facets = norm.get("facets")
            if facets is not None:
                facets = _vectors(facets, mode, "facets")
            if any(len(v) != dim for v in verts):
                raise ParseError(f"every vertex must have {dim} coordinates")
            space = sp.polyhedral(verts, facets, name=name or obj.get("name", ""))
        else:
            raise ParseError(f"unknown norm type {kind!r}")
    except ParseError:
        raise
    except KSmoothError as exc:
        raise ParseError(f"invalid space: {exc}") from exc
    if mode == "float" and kind in ("l1", "linf"):
        space = _floated(space)
    return space


def _floated(space: Space) -> Space:
    norm = space.norm
    verts = [tuple(float(c) for c in v) for v in norm.vertices]
    facets = None if norm.facets is None else [tuple(float(c) for c in f) for f in norm.facets]
    return sp.polyhedral(verts, facets, name=space.name, validate=False)


def resolve_mode(doc: dict, requested: str | None) -> str:
    """Exact by default; l_p inputs fall back to float automatically."""
    if requested is not None and requested not in SCALAR_MODES:
        raise ParseError(f"scalar mode must be one of {SCALAR_MODES}")
    spaces = [doc.get(k) for k in ("domain", "codomain") if k in doc]
    if any(is_lp_json(s) for s in spaces):
        return "float"
    return requested or "exact"


def problem_from_json(doc: Any, overrides: Options | None = None) -> Problem:
    if not isinstance(doc, dict):
        raise ParseError("problem must be a JSON object")
    for key in ("domain", "codomain", "matrix"):
        if key not in doc:
            raise ParseError(f"problem is missing {key!r}")
    raw = doc.get("options") or {}
    if not isinstance(raw, dict):
        raise ParseError("options must be an object")
    opts = Options(raw.get("scalar_mode"), raw.get("eps"), raw.get("method", "auto"))
    if overrides is not None:
        opts.scalar_mode = overrides.scalar_mode or opts.scalar_mode
        opts.eps = overrides.eps if overrides.eps is not None else opts.eps
        if overrides.method != "auto":
            opts.method = overrides.method
    if opts.method not in METHODS:
        raise ParseError(f"method must be one of {METHODS}")
    mode = resolve_mode(doc, opts.scalar_mode)
    opts.scalar_mode = mode
    x = space_from_json(doc["domain"], mode, "X")
    y = space_from_json(doc["codomain"], mode, "Y")
    matrix = _vectors(doc["matrix"], mode, "matrix")
    if len(matrix) != y.dim or any(len(r) != x.dim for r in matrix):
        raise ParseError(f"matrix must have {y.dim} rows of length {x.dim}")
    return Problem(x, y, tuple(matrix), opts)


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc


def load_problem(path: str | Path, overrides: Options | None = None) -> Problem:
    return problem_from_json(load_json(path), overrides)


def parse_vector(text: str, mode: str = "exact") -> tuple:
    """A vector given as a JSON array or as comma-separated expressions."""
    text = text.strip()
    if text.startswith("["):
        try:
            items = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad vector {text!r}: {exc}") from exc
        if not isinstance(items, list):
            raise ParseError("vector must be a JSON array")
    else:
        items = [t.strip() for t in text.split(",")]
    return tuple(parse_scalar(c, mode) for c in items)


def space_to_json(space: Space) -> dict:
    if isinstance(space.norm, Lp):
        return {"dim": space.dim, "norm": {"type": "lp", "p": space.norm.p}}
    out = {
        "dim": space.dim,
        "norm": {
            "type": "polyhedral",
            "vertices": [[nm.scalar_print(c) for c in v] for v in space.norm.vertices],
        },
    }
    return out


def operator_to_json(T: Operator) -> dict:
    return {
        "domain": space_to_json(T.domain),
        "codomain": space_to_json(T.codomain),
        "matrix": [[nm.scalar_print(c) for c in row] for row in T.matrix],
    }
