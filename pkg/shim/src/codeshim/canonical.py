"""Canonical value encoding, shim side.

Mirrors the supervisor's wire format byte for byte: a JSON two-element
array ``[tag, payload]``. Scalars inline; floats ``nan``/``inf``/``-inf``
as strings; integers beyond 53-bit magnitude as decimal strings; sets and
dict pairs sorted by element/key encoding so equal values encode to equal
bytes. Values outside the comparable universe become the ``Uncanonical``
exception marker.

Deliberately self-contained: the shim depends on nothing but the runtime.
"""

from __future__ import annotations

import json
import math

HASHABLE_TAGS = frozenset({"int", "float", "bool", "str", "none", "tuple", "frozenset"})

_INT_INLINE_LIMIT = 1 << 53


class WireError(ValueError):
    pass


def canonicalize(obj) -> list:
    """Runtime value -> wire structure (the JSON-ready [tag, payload])."""
    if obj is None:
        return ["none", None]
    if isinstance(obj, bool):
        return ["bool", obj]
    if isinstance(obj, int):
        return ["int", obj if abs(obj) < _INT_INLINE_LIMIT else str(obj)]
    if isinstance(obj, float):
        if math.isnan(obj):
            return ["float", "nan"]
        if math.isinf(obj):
            return ["float", "inf" if obj > 0 else "-inf"]
        return ["float", obj]
    if isinstance(obj, str):
        return ["str", obj]
    if isinstance(obj, (list, tuple)):
        tag = "list" if isinstance(obj, list) else "tuple"
        return [tag, [canonicalize(v) for v in obj]]
    if isinstance(obj, (set, frozenset)):
        tag = "set" if isinstance(obj, set) else "frozenset"
        members = [canonicalize(v) for v in obj]
        if any(m[0] not in HASHABLE_TAGS for m in members):
            return uncanonical(obj)
        unique = {_dumps(m): m for m in members}
        return [tag, [unique[k] for k in sorted(unique)]]
    if isinstance(obj, dict):
        pairs = {}
        for key, value in obj.items():
            wire_key = canonicalize(key)
            if wire_key[0] not in HASHABLE_TAGS:
                return uncanonical(obj)
            pairs[_dumps(wire_key)] = [wire_key, canonicalize(value)]
        return ["dict", [pairs[k] for k in sorted(pairs)]]
    if isinstance(obj, BaseException):
        return exception_wire(type(obj).__name__, str(obj))
    return uncanonical(obj)


def exception_wire(type_name: str, message: str) -> list:
    return ["exception", {"type_name": type_name, "message": str(message)}]


def uncanonical(obj) -> list:
    return exception_wire("Uncanonical", f"unsupported type {type(obj).__name__}")


def realize(data) -> object:
    """Wire structure -> runtime value (inputs arriving from the host)."""
    if not isinstance(data, list) or len(data) != 2:
        raise WireError(f"malformed canonical value: {data!r}")
    tag, payload = data
    if tag == "none":
        return None
    if tag == "bool":
        if not isinstance(payload, bool):
            raise WireError("bad bool payload")
        return payload
    if tag == "int":
        if isinstance(payload, str):
            return int(payload)
        if isinstance(payload, bool) or not isinstance(payload, int):
            raise WireError("bad int payload")
        return payload
    if tag == "float":
        if payload == "nan":
            return math.nan
        if payload == "inf":
            return math.inf
        if payload == "-inf":
            return -math.inf
        if isinstance(payload, bool) or not isinstance(payload, (int, float)):
            raise WireError("bad float payload")
        return float(payload)
    if tag == "str":
        if not isinstance(payload, str):
            raise WireError("bad str payload")
        return payload
    if tag == "list":
        return [realize(v) for v in payload]
    if tag == "tuple":
        return tuple(realize(v) for v in payload)
    if tag == "set":
        return {realize(v) for v in payload}
    if tag == "frozenset":
        return frozenset(realize(v) for v in payload)
    if tag == "dict":
        return {realize(k): realize(v) for k, v in payload}
    raise WireError(f"cannot realize tag {tag!r}")


def encode_bytes(wire: list) -> bytes:
    return _dumps(wire).encode("utf-8")


def _dumps(wire) -> str:
    return json.dumps(wire, separators=(",", ":"), ensure_ascii=False)
