"""JSON specs for domains, measures, maps and open sets.

Complex numbers are written as ``[x, y]`` pairs; plain reals are accepted
wherever a complex number is expected.

    domain:   {"outer": {"center": [x, y], "radius": r}, "inner": [{...}, ...]}
    measure:  {"atoms": [{"z": [x, y], "w": w}, ...]}
    map:      {"kind": "mobius", "coeffs": [a, b, c, d]}
              {"kind": "quadpoly", "beta": [x, y]}
              {"kind": "compose", "maps": [map, ...]}   (maps[0] applied first)
    presented domain: a domain spec, or {"base": domain, "chart": map}
    open set: {"components": [presented domain, ...], "weights": [...]}
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .conformal import Composition, PresentedDomain, QuadPoly
from .errors import SpecError
from .geometry import Circle, CircularDomain, MobiusMap
from .measures import AtomicMeasure
from .opensets import OpenSetDomain


class SpecParseError(SpecError):
    """Malformed JSON; the message carries line and column."""


def read_json(path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def cplx(v) -> complex:
    if isinstance(v, (int, float)):
        z = complex(v)
    elif isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        z = complex(v[0], v[1])
    else:
        raise SpecError(f"expected a number or an [x, y] pair, got {v!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise SpecError(f"non-finite number {v!r}")
    return z


def pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _field(obj, key, kind="object"):
    if not isinstance(obj, dict) or key not in obj:
        raise SpecError(f"{kind} spec is missing '{key}'")
    return obj[key]


def circle_from_spec(obj) -> Circle:
    r = _field(obj, "radius", "circle")
    if not isinstance(r, (int, float)):
        raise SpecError("circle radius must be a number")
    return Circle(cplx(_field(obj, "center", "circle")), float(r))


def domain_from_spec(obj) -> CircularDomain:
    inner = obj.get("inner", []) if isinstance(obj, dict) else None
    if not isinstance(inner, list):
        raise SpecError("domain 'inner' must be a list")
    return CircularDomain(circle_from_spec(_field(obj, "outer", "domain")),
                          tuple(circle_from_spec(c) for c in inner))


def domain_to_spec(domain: CircularDomain) -> dict:
    def circ(c):
        return {"center": pair(c.center), "radius": c.radius}

    return {"outer": circ(domain.outer), "inner": [circ(c) for c in domain.inner]}


def measure_from_spec(obj) -> AtomicMeasure:
    atoms = _field(obj, "atoms", "measure")
    if not isinstance(atoms, list):
        raise SpecError("measure 'atoms' must be a list")
    pts = [cplx(_field(a, "z", "atom")) for a in atoms]
    ws = [_field(a, "w", "atom") for a in atoms]
    if not all(isinstance(w, (int, float)) for w in ws):
        raise SpecError("atom weights must be numbers")
    return AtomicMeasure(np.array(pts, dtype=complex), np.array(ws, dtype=float))


def measure_to_spec(mu: AtomicMeasure) -> dict:
    return {"atoms": [{"z": pair(z), "w": float(w)} for z, w in zip(mu.points.tolist(), mu.weights.tolist())]}


def map_from_spec(obj):
    kind = _field(obj, "kind", "map")
    if kind == "mobius":
        coeffs = _field(obj, "coeffs", "mobius map")
        if not isinstance(coeffs, list) or len(coeffs) != 4:
            raise SpecError("mobius 'coeffs' must list a, b, c, d")
        return MobiusMap(*(cplx(c) for c in coeffs))
    if kind == "quadpoly":
        return QuadPoly(cplx(_field(obj, "beta", "quadpoly map")))
    if kind == "compose":
        maps = _field(obj, "maps", "compose map")
        if not isinstance(maps, list) or not maps:
            raise SpecError("compose 'maps' must be a non-empty list")
        return Composition(tuple(map_from_spec(m) for m in maps))
    raise SpecError(f"unknown map kind {kind!r}")


def map_to_spec(m) -> dict:
    if isinstance(m, MobiusMap):
        return {"kind": "mobius", "coeffs": [pair(c) for c in (m.a, m.b, m.c, m.d)]}
    if isinstance(m, QuadPoly):
        return {"kind": "quadpoly", "beta": pair(m.beta)}
    if isinstance(m, Composition):
        return {"kind": "compose", "maps": [map_to_spec(f) for f in m.maps]}
    raise TypeError(f"cannot serialise {type(m).__name__}")


def presented_from_spec(obj) -> PresentedDomain:
    if isinstance(obj, dict) and "base" in obj:
        base = domain_from_spec(obj["base"])
        chart = map_from_spec(obj["chart"]) if "chart" in obj else MobiusMap.identity()
        return PresentedDomain(base, chart)
    return PresentedDomain.circular(domain_from_spec(obj))


def openset_from_spec(obj, weights=None) -> OpenSetDomain:
    comps = _field(obj, "components", "open set")
    if not isinstance(comps, list):
        raise SpecError("open set 'components' must be a list")
    w = weights if weights is not None else obj.get("weights", ())
    return OpenSetDomain(tuple(presented_from_spec(c) for c in comps), tuple(w or ()))


def load(path, parser):
    try:
        return parser(read_json(path))
    except (KeyError, TypeError, AttributeError) as exc:
        raise SpecError(f"{path}: malformed spec ({exc})") from None


def dumps(obj) -> str:
    """Canonical JSON text; key order is fixed by construction so equal inputs give equal bytes."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
