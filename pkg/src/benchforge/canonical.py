"""Type-tagged, language-neutral value trees.

This is the one representation of runtime values that crosses the sandbox
boundary, lands in problem files, and is fed to the judge. A value is a
``(tag, payload)`` pair; containers hold canonical values recursively.

Wire encoding is a compact JSON two-element array ``[tag, payload]``:

* scalars inline; ``bool`` is distinct from ``int``
* ``float`` specials as the strings ``"nan"`` / ``"inf"`` / ``"-inf"``
* ``int`` beyond 53-bit magnitude as a decimal string (JSON numbers are
  doubles on most consumers)
* ``set`` / ``frozenset`` payloads sorted by element encoding, no duplicates
* ``dict`` payload is a list of ``[key, value]`` pairs sorted by key encoding
* ``exception`` payload is ``{"type_name": ..., "message": ...}``

Sorting containers at construction time makes encoding a pure function of
the value, so byte equality is canonical equality.
"""

from __future__ import annotations

import ast
import json
import math
from typing import Any, Iterable

from .errors import ProtocolError

TAGS = (
    "int", "float", "bool", "str", "none",
    "list", "tuple", "set", "frozenset", "dict", "exception",
)

# Tags whose values may appear as dict keys or set members.
HASHABLE_TAGS = frozenset({"int", "float", "bool", "str", "none", "tuple", "frozenset"})

_INT_INLINE_LIMIT = 1 << 53


class CanonicalValue:
    """Immutable tagged value; equality and hashing follow the encoding."""

    __slots__ = ("tag", "payload", "_encoded")

    def __init__(self, tag: str, payload: Any):
        if tag not in TAGS:
            raise ProtocolError(f"unknown canonical tag {tag!r}")
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "payload", payload)
        object.__setattr__(self, "_encoded", None)

    def __setattr__(self, name, value):
        raise AttributeError("CanonicalValue is immutable")

    def encode(self) -> bytes:
        cached = object.__getattribute__(self, "_encoded")
        if cached is None:
            cached = json.dumps(
                to_jsonable(self), separators=(",", ":"), ensure_ascii=False
            ).encode("utf-8")
            object.__setattr__(self, "_encoded", cached)
        return cached

    def __eq__(self, other) -> bool:
        if not isinstance(other, CanonicalValue):
            return NotImplemented
        return self.encode() == other.encode()

    def __hash__(self) -> int:
        return hash(self.encode())

    def __repr__(self) -> str:
        return f"CanonicalValue({self.tag!r}, {self.payload!r})"

    @property
    def is_exception(self) -> bool:
        return self.tag == "exception"


def exception_value(type_name: str, message: str = "") -> CanonicalValue:
    return CanonicalValue("exception", (type_name, str(message)))


def uncanonical(obj: Any) -> CanonicalValue:
    """Marker for values outside the comparable universe.

    Mirrors wrong-output semantics: an uncanonical result can never equal a
    canonical expected output.
    """
    return exception_value("Uncanonical", f"unsupported type {type(obj).__name__}")


def from_python(obj: Any) -> CanonicalValue:
    """Canonicalize a runtime value; unsupported types become `Uncanonical`."""
    # bool first: it is an int subclass but gets its own tag
    if obj is None:
        return CanonicalValue("none", None)
    if isinstance(obj, bool):
        return CanonicalValue("bool", obj)
    if isinstance(obj, int):
        return CanonicalValue("int", obj)
    if isinstance(obj, float):
        return CanonicalValue("float", obj)
    if isinstance(obj, str):
        return CanonicalValue("str", obj)
    if isinstance(obj, (list, tuple)):
        tag = "list" if isinstance(obj, list) else "tuple"
        return CanonicalValue(tag, tuple(from_python(x) for x in obj))
    if isinstance(obj, (set, frozenset)):
        tag = "set" if isinstance(obj, set) else "frozenset"
        members = [from_python(x) for x in obj]
        if any(m.tag not in HASHABLE_TAGS for m in members):
            return uncanonical(obj)
        return CanonicalValue(tag, _dedupe_sorted(members))
    if isinstance(obj, dict):
        pairs = []
        for key, value in obj.items():
            ck = from_python(key)
            if ck.tag not in HASHABLE_TAGS:
                return uncanonical(obj)
            pairs.append((ck, from_python(value)))
        return CanonicalValue("dict", _sort_pairs(pairs))
    if isinstance(obj, BaseException):
        return exception_value(type(obj).__name__, str(obj))
    return uncanonical(obj)


def to_python(value: CanonicalValue) -> Any:
    """Realize a canonical value in the host runtime.

    Exception markers are not realizable and raise ProtocolError.
    """
    tag, payload = value.tag, value.payload
    if tag in ("none",):
        return None
    if tag in ("int", "float", "bool", "str"):
        return payload
    if tag == "list":
        return [to_python(v) for v in payload]
    if tag == "tuple":
        return tuple(to_python(v) for v in payload)
    if tag == "set":
        return {to_python(v) for v in payload}
    if tag == "frozenset":
        return frozenset(to_python(v) for v in payload)
    if tag == "dict":
        return {to_python(k): to_python(v) for k, v in payload}
    raise ProtocolError(f"cannot realize a {tag!r} value")


def to_jsonable(value: CanonicalValue) -> list:
    """JSON-ready ``[tag, payload]`` form used on the wire and in files."""
    tag, payload = value.tag, value.payload
    if tag == "int":
        return [tag, payload if abs(payload) < _INT_INLINE_LIMIT else str(payload)]
    if tag == "float":
        if math.isnan(payload):
            return [tag, "nan"]
        if math.isinf(payload):
            return [tag, "inf" if payload > 0 else "-inf"]
        return [tag, payload]
    if tag in ("bool", "str", "none"):
        return [tag, payload]
    if tag in ("list", "tuple", "set", "frozenset"):
        return [tag, [to_jsonable(v) for v in payload]]
    if tag == "dict":
        return [tag, [[to_jsonable(k), to_jsonable(v)] for k, v in payload]]
    type_name, message = payload
    return [tag, {"type_name": type_name, "message": message}]


def from_jsonable(data: Any) -> CanonicalValue:
    """Parse the wire form; re-normalizes container ordering and duplicates."""
    if not isinstance(data, list) or len(data) != 2:
        raise ProtocolError(f"malformed canonical value: {data!r}")
    tag, payload = data
    if tag == "int":
        if isinstance(payload, str):
            return CanonicalValue("int", int(payload))
        if isinstance(payload, bool) or not isinstance(payload, int):
            raise ProtocolError(f"bad int payload: {payload!r}")
        return CanonicalValue("int", payload)
    if tag == "float":
        if payload == "nan":
            return CanonicalValue("float", math.nan)
        if payload == "inf":
            return CanonicalValue("float", math.inf)
        if payload == "-inf":
            return CanonicalValue("float", -math.inf)
        if isinstance(payload, bool) or not isinstance(payload, (int, float)):
            raise ProtocolError(f"bad float payload: {payload!r}")
        return CanonicalValue("float", float(payload))
    if tag == "bool":
        if not isinstance(payload, bool):
            raise ProtocolError(f"bad bool payload: {payload!r}")
        return CanonicalValue("bool", payload)
    if tag == "str":
        if not isinstance(payload, str):
            raise ProtocolError(f"bad str payload: {payload!r}")
        return CanonicalValue("str", payload)
    if tag == "none":
        if payload is not None:
            raise ProtocolError(f"bad none payload: {payload!r}")
        return CanonicalValue("none", None)
    if tag in ("list", "tuple"):
        _require_list(payload, tag)
        return CanonicalValue(tag, tuple(from_jsonable(v) for v in payload))
    if tag in ("set", "frozenset"):
        _require_list(payload, tag)
        members = [from_jsonable(v) for v in payload]
        if any(m.tag not in HASHABLE_TAGS for m in members):
            raise ProtocolError(f"unhashable member tag in {tag}")
        return CanonicalValue(tag, _dedupe_sorted(members))
    if tag == "dict":
        _require_list(payload, tag)
        pairs = []
        for item in payload:
            if not isinstance(item, list) or len(item) != 2:
                raise ProtocolError(f"bad dict pair: {item!r}")
            key = from_jsonable(item[0])
            if key.tag not in HASHABLE_TAGS:
                raise ProtocolError("unhashable dict key tag")
            pairs.append((key, from_jsonable(item[1])))
        return CanonicalValue("dict", _sort_pairs(pairs))
    if tag == "exception":
        if (
            not isinstance(payload, dict)
            or set(payload) != {"type_name", "message"}
            or not isinstance(payload["type_name"], str)
            or not isinstance(payload["message"], str)
        ):
            raise ProtocolError(f"bad exception payload: {payload!r}")
        return CanonicalValue("exception", (payload["type_name"], payload["message"]))
    raise ProtocolError(f"unknown canonical tag {tag!r}")


def encode(value: CanonicalValue) -> bytes:
    return value.encode()


def decode(data: bytes | str) -> CanonicalValue:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        parsed = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"undecodable canonical value: {exc}") from exc
    return from_jsonable(parsed)


def from_literal(text: str) -> CanonicalValue:
    """Canonicalize a source-code literal (docstring examples, assertions)."""
    try:
        obj = ast.literal_eval(text.strip())
    except (ValueError, SyntaxError) as exc:
        raise ProtocolError(f"not a literal: {text!r}") from exc
    return from_python(obj)


# --- argument tuples --------------------------------------------------------

Args = tuple[CanonicalValue, ...]


def args_from_python(values: Iterable[Any]) -> Args:
    return tuple(from_python(v) for v in values)


def args_to_jsonable(args: Args) -> list:
    return [to_jsonable(v) for v in args]


def args_from_jsonable(data: Any) -> Args:
    if not isinstance(data, list):
        raise ProtocolError(f"malformed argument tuple: {data!r}")
    return tuple(from_jsonable(v) for v in data)


def _dedupe_sorted(members: list[CanonicalValue]) -> tuple[CanonicalValue, ...]:
    unique: dict[bytes, CanonicalValue] = {}
    for m in members:
        unique.setdefault(m.encode(), m)
    return tuple(sorted(unique.values(), key=lambda m: m.encode()))


def _sort_pairs(
    pairs: list[tuple[CanonicalValue, CanonicalValue]],
) -> tuple[tuple[CanonicalValue, CanonicalValue], ...]:
    last: dict[bytes, tuple[CanonicalValue, CanonicalValue]] = {}
    for key, value in pairs:
        last[key.encode()] = (key, value)
    return tuple(sorted(last.values(), key=lambda kv: kv[0].encode()))


def _require_list(payload: Any, tag: str) -> None:
    if not isinstance(payload, list):
        raise ProtocolError(f"bad {tag} payload: {payload!r}")
