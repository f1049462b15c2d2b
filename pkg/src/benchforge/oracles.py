"""Output comparison: the default differential-testing oracle and variants.

The default oracle requires matching type tags and recurses structurally;
floats are equal within an absolute tolerance (1e-6 unless overridden),
``nan`` equals ``nan`` and infinities compare by sign. ``bool`` never equals
``int``: the tags differ, which is deliberately stricter than the subject
runtime's coercion.

Custom oracles are registry-dispatched for problems where several outputs
are acceptable; they receive both canonical values plus the OracleSpec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .canonical import CanonicalValue
from .errors import InvariantViolation, UnknownCustomOracle

DEFAULT_EPSILON = 1e-6

ORACLE_KINDS = ("default", "float_tol", "unordered", "custom")


@dataclass(frozen=True)
class OracleSpec:
    kind: str = "default"
    epsilon: float = DEFAULT_EPSILON
    custom_id: str | None = None

    def __post_init__(self):
        if self.kind not in ORACLE_KINDS:
            raise InvariantViolation("oracle-kind", f"unknown kind {self.kind!r}")
        if not self.epsilon > 0:
            raise InvariantViolation("oracle-epsilon", "epsilon must be positive")
        if (self.custom_id is not None) != (self.kind == "custom"):
            raise InvariantViolation(
                "oracle-custom-id", "custom_id present iff kind == custom"
            )

    def to_record(self) -> dict:
        return {"kind": self.kind, "epsilon": self.epsilon, "custom_id": self.custom_id}

    @classmethod
    def from_record(cls, data: dict) -> "OracleSpec":
        return cls(
            kind=data.get("kind", "default"),
            epsilon=data.get("epsilon", DEFAULT_EPSILON),
            custom_id=data.get("custom_id"),
        )


DEFAULT_ORACLE = OracleSpec()

OracleFn = Callable[[CanonicalValue, CanonicalValue, OracleSpec], bool]

_REGISTRY: dict[str, OracleFn] = {}


def register_oracle(custom_id: str, fn: OracleFn) -> None:
    _REGISTRY[custom_id] = fn


def judge(
    expected: CanonicalValue, actual: CanonicalValue, oracle: OracleSpec = DEFAULT_ORACLE
) -> bool:
    """Decide whether `actual` is an acceptable output for `expected`."""
    if oracle.kind in ("default", "float_tol"):
        return values_equal(expected, actual, oracle.epsilon)
    if oracle.kind == "unordered":
        return _unordered_sequences(expected, actual, oracle.epsilon)
    fn = _REGISTRY.get(oracle.custom_id or "")
    if fn is None:
        raise UnknownCustomOracle(oracle.custom_id or "<missing>")
    return fn(expected, actual, oracle)


def values_equal(a: CanonicalValue, b: CanonicalValue, epsilon: float) -> bool:
    """Recursive tag-checked comparison with absolute float tolerance."""
    if a.tag != b.tag:
        return False
    tag = a.tag
    if tag == "float":
        return _floats_equal(a.payload, b.payload, epsilon)
    if tag in ("int", "bool", "str", "none"):
        return a.payload == b.payload
    if tag in ("list", "tuple"):
        if len(a.payload) != len(b.payload):
            return False
        return all(values_equal(x, y, epsilon) for x, y in zip(a.payload, b.payload))
    if tag in ("set", "frozenset"):
        return _match_multiset(
            a.payload, b.payload, lambda x, y: values_equal(x, y, epsilon)
        )
    if tag == "dict":
        # length first, then key/value matching (keys also under tolerance)
        if len(a.payload) != len(b.payload):
            return False
        return _match_multiset(
            a.payload,
            b.payload,
            lambda p, q: values_equal(p[0], q[0], epsilon)
            and values_equal(p[1], q[1], epsilon),
        )
    # exception markers: the type identifies the failure; messages vary by runtime
    return a.payload[0] == b.payload[0]


def _floats_equal(x: float, y: float, epsilon: float) -> bool:
    if math.isnan(x) or math.isnan(y):
        return math.isnan(x) and math.isnan(y)
    if math.isinf(x) or math.isinf(y):
        return x == y
    return abs(x - y) <= epsilon


def _match_multiset(xs: Sequence, ys: Sequence, eq: Callable) -> bool:
    """Perfect matching between two element sequences (order-insensitive).

    Backtracking rather than greedy: tolerance equality is not transitive,
    so a greedy pass can strand a matchable pairing.
    """
    if len(xs) != len(ys):
        return False
    used = [False] * len(ys)

    def place(i: int) -> bool:
        if i == len(xs):
            return True
        for j in range(len(ys)):
            if not used[j] and eq(xs[i], ys[j]):
                used[j] = True
                if place(i + 1):
                    return True
                used[j] = False
        return False

    return place(0)


def _unordered_sequences(
    expected: CanonicalValue, actual: CanonicalValue, epsilon: float
) -> bool:
    """Top-level lists/tuples compared as multisets; everything else default."""
    if (
        expected.tag in ("list", "tuple")
        and actual.tag == expected.tag
    ):
        return _match_multiset(
            expected.payload,
            actual.payload,
            lambda x, y: values_equal(x, y, epsilon),
        )
    return values_equal(expected, actual, epsilon)


def _oracle_unordered(e: CanonicalValue, a: CanonicalValue, spec: OracleSpec) -> bool:
    return _unordered_sequences(e, a, spec.epsilon)


def _oracle_sorted(e: CanonicalValue, a: CanonicalValue, spec: OracleSpec) -> bool:
    def sort_top(v: CanonicalValue) -> CanonicalValue:
        if v.tag in ("list", "tuple"):
            ordered = tuple(sorted(v.payload, key=lambda m: m.encode()))
            return CanonicalValue(v.tag, ordered)
        return v

    return values_equal(sort_top(e), sort_top(a), spec.epsilon)


def _oracle_epsilon_override(
    e: CanonicalValue, a: CanonicalValue, spec: OracleSpec
) -> bool:
    return values_equal(e, a, spec.epsilon)


register_oracle("unordered-sequence", _oracle_unordered)
register_oracle("sorted-before-compare", _oracle_sorted)
register_oracle("epsilon-override", _oracle_epsilon_override)
