"""JSON readers and writers for spaces, groups, triples and reports.

Every file carries ``"format": 1``. Numbers are plain JSON decimals; in exact
mode strings of the form ``"p/q"`` are also accepted and rationals are
written back as such strings.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .metric import FiniteMetricSpace, IsometryGroup, StructuralError, isometry_group
from .triples import ApproxTriple

FORMAT = 1


class SchemaError(ValueError):
    pass


def num_out(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def jsonable(v):
    if isinstance(v, dict):
        return {str(k): jsonable(w) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(w) for w in v]
    if isinstance(v, np.ndarray):
        return jsonable(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if hasattr(v, "to_dict"):
        return v.to_dict()
    return num_out(v)


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2) + "\n"


def write_json(obj, path=None) -> str:
    text = dumps(obj)
    if path is None or str(path) == "-":
        print(text, end="")
    else:
        Path(path).write_text(text)
    return text


def _load(ref, base: Path | None):
    if isinstance(ref, dict):
        return ref, base
    path = Path(ref)
    if base is not None and not path.is_absolute():
        path = base / path
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: top level must be an object")
    return data, path.parent


def _check_format(data):
    fmt = data.get("format", FORMAT)
    if fmt != FORMAT:
        raise SchemaError(f"unsupported format {fmt!r}")


def space_from_dict(data, exact=False) -> FiniteMetricSpace:
    _check_format(data)
    if "dist" not in data:
        raise SchemaError("space needs a 'dist' table")
    try:
        return FiniteMetricSpace.from_table(data["dist"], data.get("labels"), exact=exact)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad distance table: {exc}") from None


def load_space(ref, exact=False, base=None) -> FiniteMetricSpace:
    data, _ = _load(ref, base)
    return space_from_dict(data, exact)


def load_group(ref, exact=False, base=None) -> IsometryGroup:
    """Read a group file, or a bare space file (which gets its full isometry group).

    A group file names its space inline or by path, and lists either all
    ``perms`` or ``generators`` (permutations) whose closure is taken.
    """
    data, base = _load(ref, base)
    _check_format(data)
    if "space" not in data:
        return isometry_group(space_from_dict(data, exact))
    space = load_space(data["space"], exact, base)
    try:
        if "perms" in data:
            return IsometryGroup(space, data["perms"])
        if "generators" in data:
            return _generated(space, data["generators"])
        return isometry_group(space)
    except StructuralError as exc:
        raise SchemaError(str(exc)) from None


def _generated(space, generators) -> IsometryGroup:
    gens = [tuple(int(v) for v in g) for g in generators]
    ident = tuple(range(space.n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(p[i] for i in g)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return IsometryGroup(space, sorted(seen))


def space_to_dict(space: FiniteMetricSpace) -> dict:
    return {"format": FORMAT, "labels": list(space.labels),
            "dist": [[num_out(v) for v in row] for row in space.dist.tolist()]}


def group_to_dict(group: IsometryGroup) -> dict:
    return {"format": FORMAT, "space": space_to_dict(group.space),
            "perms": group.perms.tolist()}


def triple_to_dict(t: ApproxTriple, inline=True) -> dict:
    out = {"format": FORMAT}
    if inline:
        out.update(source=group_to_dict(t.source), target=group_to_dict(t.target))
    out.update(f=t.f.tolist(), theta=t.theta.tolist(), psi=t.psi.tolist())
    return out


def load_triple(ref, exact=False, base=None) -> ApproxTriple:
    data, base = _load(ref, base)
    _check_format(data)
    missing = [k for k in ("source", "target", "f", "theta", "psi") if k not in data]
    if missing:
        raise SchemaError(f"triple is missing {missing}")
    src = load_group(data["source"], exact, base)
    dst = load_group(data["target"], exact, base)
    try:
        return ApproxTriple(src, dst, data["f"], data["theta"], data["psi"])
    except StructuralError as exc:
        raise SchemaError(str(exc)) from None
