"""Domain files, point parsing and report serialization.

Complex numbers in JSON files are ``[re, im]`` pairs; on the command line
they are written ``re+imi`` and points are comma separated tuples of them.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import re
from typing import Any

import numpy as np

from .geometry import (
    Ball,
    BallAutomorphism,
    Composition,
    CoordinateProjection,
    Domain,
    HartogsMap,
    HartogsPgvlu,
    HoloMap,
    IdentityMap,
    MobiusMap,
    PlanarComplement,
    Polydisk,
    ProductMap,
    Pushforward,
    SublevelDcg,
    unit_bidisk,
    unit_disk,
)
from .intervals import encode_real


class InputError(ValueError):
    """Malformed user input (exit code 2 on the command line)."""


BUILTIN = {
    "ball2": lambda: Ball((0j, 0j), 1.0),
    "disk": unit_disk,
    "bidisk": unit_bidisk,
    "sublevel-dcg": SublevelDcg.default,
    "hartogs": HartogsPgvlu.default,
}

_COMPLEX = re.compile(r"^[+-]?[0-9.eE+-]*[ij]?$")


def parse_complex(text: str) -> complex:
    """Parse ``re+imi`` (also ``re``, ``imi``, and j in place of i)."""
    s = text.strip().replace(" ", "")
    if not s or not _COMPLEX.match(s):
        raise InputError(f"cannot parse complex number {text!r}")
    try:
        val = complex(s.replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {text!r}") from exc
    if not (math.isfinite(val.real) and math.isfinite(val.imag)):
        raise InputError(f"non-finite complex number {text!r}")
    return val


def parse_point(text: str) -> np.ndarray:
    parts = [p for p in text.split(",")]
    if not 1 <= len(parts) <= 2:
        raise InputError(f"points have one or two coordinates, got {text!r}")
    return np.array([parse_complex(p) for p in parts], dtype=complex)


def decode_complex(x) -> complex:
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, str):
        return parse_complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise InputError(f"complex numbers are [re, im] pairs, got {x!r}")


def decode_point(x) -> np.ndarray:
    if not isinstance(x, (list, tuple)) or not x:
        raise InputError(f"points are lists of [re, im] pairs, got {x!r}")
    return np.array([decode_complex(v) for v in x], dtype=complex)


def encode_complex(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def encode_point(p) -> list:
    return [encode_complex(z) for z in np.atleast_1d(p)]


def map_from_dict(d: dict, source: Domain) -> HoloMap:
    kind = d.get("type")
    if kind == "identity":
        return IdentityMap(source)
    if kind == "projection":
        return CoordinateProjection(source, int(d["index"]), domain_from_dict(d["target"]) if "target" in d else unit_disk())
    if kind == "mobius":
        return MobiusMap(source, int(d.get("index", 0)), decode_complex(d["a"]))
    if kind == "product":
        return ProductMap(source, tuple(decode_point(d["points"])), tuple(d.get("permutation", ())))
    if kind == "hartogs_F":
        return HartogsMap(source)
    if kind == "ball_automorphism":
        return BallAutomorphism(source, tuple(decode_point(d["point"])))
    if kind == "composition":
        maps, src = [], source
        for md in d["maps"]:
            m = map_from_dict(md, src)
            maps.append(m)
            src = m.target
        return Composition(tuple(maps))
    raise InputError(f"unknown map type {kind!r}")


def domain_from_dict(d: Any) -> Domain:
    if isinstance(d, str):
        if d in BUILTIN:
            return BUILTIN[d]()
        raise InputError(f"unknown builtin domain {d!r}")
    if not isinstance(d, dict):
        raise InputError("a domain is a JSON object or a builtin name")
    kind = d.get("type")
    try:
        if kind == "builtin":
            return domain_from_dict(d["name"])
        if kind == "ball":
            return Ball(tuple(decode_point(d["center"])), float(d.get("radius", 1.0)))
        if kind == "polydisk":
            return Polydisk(tuple(decode_point(d["center"])), tuple(float(r) for r in d["radii"]))
        if kind == "planar_complement":
            removed = tuple((decode_complex(c), float(r)) for c, r in d["removed"])
            return PlanarComplement(removed, float(d.get("outer_radius", 10.0)))
        if kind == "sublevel_dcg":
            if "c" not in d:
                return SublevelDcg.default(int(d.get("J", 8)), float(d.get("mass", 0.2)))
            return SublevelDcg(tuple(float(c) for c in d["c"]), tuple(float(k) for k in d["k"]), float(d.get("outer_radius", 8.0)))
        if kind == "hartogs_pgvlu":
            if "c" not in d:
                return HartogsPgvlu.default(int(d.get("J", 6)))
            return HartogsPgvlu(
                tuple(decode_complex(c) for c in d["c"]), tuple(float(r) for r in d["r"]), tuple(float(k) for k in d["k"])
            )
        if kind == "pushforward":
            src = domain_from_dict(d["source"])
            return Pushforward(src, map_from_dict(d["map"], src))
    except InputError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid {kind} domain: {exc}") from exc
    raise InputError(f"unknown domain type {kind!r}")


def load_domain(spec: str) -> Domain:
    """A builtin name or the path of a JSON domain file."""
    if spec in BUILTIN:
        return BUILTIN[spec]()
    try:
        with open(spec) as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"no builtin domain or file named {spec!r}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed domain file {spec!r}: {exc}") from exc
    return domain_from_dict(data)


def load_path(path: str) -> tuple[list, tuple]:
    """Continuity path file: {"path": [[z, w], ...], "limit": [z0, w0]}."""
    try:
        with open(path) as fh:
            data = json.load(fh)
        pairs = [(decode_point(z), decode_point(w)) for z, w in data["path"]]
        limit = (decode_point(data["limit"][0]), decode_point(data["limit"][1]))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed path file {path!r}: {exc}") from exc
    return pairs, limit


def load_sequences(path: str) -> list[dict]:
    """Sequence file: {"sequences": [{"tag": ..., "points": [w, ...], "angle": optional}]}."""
    try:
        with open(path) as fh:
            data = json.load(fh)
        out = []
        for s in data["sequences"]:
            out.append({"tag": str(s.get("tag", len(out))), "points": [decode_point(p) for p in s["points"]], "angle": s.get("angle")})
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed sequence file {path!r}: {exc}") from exc
    return out


def jsonable(obj):
    """Recursively encode floats (inf/nan as strings), complex numbers and arrays."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return encode_real(float(obj))
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2)


def rows_to_csv(header: list[str], rows: list[list]) -> str:
    buf = _io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()
