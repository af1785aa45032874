"""JSON encodings of vectors, steps, stacks and layouts.

    AtomicVector  {"atoms": [...]}            (optional "layout")
    DyadicStep    {"k": int, "level": int, "values": [...]}
    LevelStack    {"k": int, "N": int, "levels": [[...], ...]}
    BlockLayout   {"N": int, "m": [...]}

Floats are written with 17 significant digits.
"""
import json
import math

from .core import AtomicVector, DyadicStep
from .embeddings import BlockLayout, LevelStack


class InputError(ValueError):
    """Malformed or inconsistent input document."""


def dumps(obj, indent=None):
    return _dump(obj, indent, 0)


def _dump(obj, indent, depth):
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return "%.17g" % obj
    if isinstance(obj, str):
        return json.dumps(obj)
    if hasattr(obj, "tolist"):
        return _dump(obj.tolist(), indent, depth)
    if isinstance(obj, dict):
        items = [f"{json.dumps(str(k))}: {_dump(v, indent, depth + 1)}" for k, v in obj.items()]
        return _join(items, "{", "}", indent, depth)
    if isinstance(obj, (list, tuple)):
        items = [_dump(v, indent, depth + 1) for v in obj]
        flat = all(not isinstance(v, (dict, list, tuple)) for v in obj)
        return _join(items, "[", "]", None if flat else indent, depth)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _join(items, open_, close, indent, depth):
    if not items:
        return open_ + close
    if indent is None:
        return open_ + ", ".join(items) + close
    pad = " " * (indent * (depth + 1))
    return open_ + "\n" + ",\n".join(pad + s for s in items) + "\n" + " " * (indent * depth) + close


def encode(obj):
    if isinstance(obj, AtomicVector):
        return {"atoms": obj.atoms}
    if isinstance(obj, DyadicStep):
        return {"k": obj.k, "level": obj.level, "values": obj.values}
    if isinstance(obj, LevelStack):
        return {"k": obj.k, "N": obj.N, "levels": list(obj.levels)}
    if isinstance(obj, BlockLayout):
        return {"N": obj.N, "m": list(obj.m)}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def _field(doc, name, kind):
    if name not in doc:
        raise InputError(f"missing field {name!r}")
    value = doc[name]
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise InputError(f"field {name!r} must be an integer")
    elif kind is list:
        if not isinstance(value, list):
            raise InputError(f"field {name!r} must be a list")
    return value


def _numbers(values, name):
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InputError(f"field {name!r}: entry {i} is not a number")
    return [float(v) for v in values]


def _build(make, name):
    try:
        return make()
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"field {name!r}: {exc}") from None


def decode_layout(doc):
    if not isinstance(doc, dict):
        raise InputError("field 'layout' must be an object")
    N = _field(doc, "N", int)
    m = _field(doc, "m", list)
    for i, v in enumerate(m):
        if isinstance(v, bool) or not isinstance(v, int):
            raise InputError(f"field 'm': entry {i} is not an integer")
    return _build(lambda: BlockLayout(N, tuple(m)), "m")


def decode(doc):
    """Build an object from a parsed JSON document, dispatching on its keys."""
    if not isinstance(doc, dict):
        raise InputError("input must be a JSON object")
    if "atoms" in doc:
        atoms = _numbers(_field(doc, "atoms", list), "atoms")
        return _build(lambda: AtomicVector(atoms), "atoms")
    if "levels" in doc:
        k = _field(doc, "k", int)
        N = _field(doc, "N", int)
        raw = _field(doc, "levels", list)
        if len(raw) != N + 1:
            raise InputError(f"field 'levels' must hold N+1 = {N + 1} arrays, got {len(raw)}")
        levels = []
        for n, lev in enumerate(raw):
            if not isinstance(lev, list):
                raise InputError(f"field 'levels': level {n} must be a list")
            levels.append(_numbers(lev, f"levels[{n}]"))
        return _build(lambda: LevelStack(k, tuple(levels)), "levels")
    if "values" in doc:
        k = _field(doc, "k", int)
        level = _field(doc, "level", int)
        values = _numbers(_field(doc, "values", list), "values")
        return _build(lambda: DyadicStep(k, level, values), "values")
    if "m" in doc:
        return decode_layout(doc)
    raise InputError("unrecognized object: expected one of the fields 'atoms', 'values', 'levels', 'm'")


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    return doc
