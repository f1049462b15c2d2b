from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from benchforge import canonical
from benchforge.canonical import CanonicalValue, decode, encode, from_python, to_python
from benchforge.errors import ProtocolError


def test_scalar_tags():
    assert from_python(5).tag == "int"
    assert from_python(True).tag == "bool"  # bool is not int
    assert from_python(1.5).tag == "float"
    assert from_python("x").tag == "str"
    assert from_python(None).tag == "none"


def test_container_tags_distinct():
    assert from_python([1]).tag == "list"
    assert from_python((1,)).tag == "tuple"
    assert from_python({1}).tag == "set"
    assert from_python(frozenset({1})).tag == "frozenset"
    assert from_python({1: 2}).tag == "dict"


def test_float_specials_encode_as_strings():
    assert encode(from_python(math.nan)) == b'["float","nan"]'
    assert encode(from_python(math.inf)) == b'["float","inf"]'
    assert encode(from_python(-math.inf)) == b'["float","-inf"]'


def test_big_int_encodes_as_decimal_string():
    big = 2**70 + 3
    enc = encode(from_python(big))
    assert str(big).encode() in enc
    assert to_python(decode(enc)) == big
    # 53-bit-safe ints stay numeric
    assert encode(from_python(7)) == b'["int",7]'


def test_dict_payload_is_sorted_pairs():
    a = from_python({"b": 2, "a": 1})
    b = from_python({"a": 1, "b": 2})
    assert encode(a) == encode(b)
    assert encode(a) == b'["dict",[[["str","a"],["int",1]],[["str","b"],["int",2]]]]'


def test_set_sorted_and_deduped():
    v = from_python({3, 1, 2})
    assert encode(v) == b'["set",[["int",1],["int",2],["int",3]]]'
    # duplicates under canonical equality collapse on decode
    raw = b'["set",[["int",1],["int",1],["int",2]]]'
    assert encode(decode(raw)) == b'["set",[["int",1],["int",2]]]'


def test_exception_payload():
    v = canonical.exception_value("ValueError", "bad input")
    enc = encode(v)
    assert decode(enc) == v
    assert decode(enc).payload == ("ValueError", "bad input")


def test_caught_exception_canonicalizes():
    try:
        1 // 0
    except ZeroDivisionError as exc:
        v = from_python(exc)
    assert v.tag == "exception"
    assert v.payload[0] == "ZeroDivisionError"


def test_unsupported_type_is_uncanonical():
    v = from_python(object())
    assert v.tag == "exception"
    assert v.payload[0] == "Uncanonical"
    assert from_python(lambda: None).payload[0] == "Uncanonical"


def test_dict_with_unhashable_canonical_key_is_uncanonical():
    class Weird:
        def __hash__(self):
            return 0

    assert from_python({Weird(): 1}).payload[0] == "Uncanonical"


def test_to_python_rejects_exception_markers():
    with pytest.raises(ProtocolError):
        to_python(canonical.exception_value("ValueError", "x"))


def test_decode_rejects_malformed():
    for raw in (b"[]", b'["int","x",3]', b'["nosuch",1]', b'["bool",1]', b"{1:",
                b'["dict",[["int",1]]]', b'["set",[["list",[]]]]'):
        with pytest.raises(ProtocolError):
            decode(raw)


def test_nan_equality_via_encoding():
    assert from_python(math.nan) == from_python(math.nan)
    assert from_python([math.nan]) == from_python([math.nan])


def test_negative_zero_distinct_exactly():
    # exact canonical equality separates -0.0; the judge treats them equal
    assert from_python(-0.0) != from_python(0.0)


def test_from_literal():
    v = canonical.from_literal("[1, (2, 'a'), {3: 4.5}]")
    assert to_python(v) == [1, (2, "a"), {3: 4.5}]
    with pytest.raises(ProtocolError):
        canonical.from_literal("f(1)")


# --- property: round-trip over random nested values ---------------------------

_scalars = st.one_of(
    st.integers(min_value=-(2**80), max_value=2**80),
    st.booleans(),
    st.none(),
    st.text(max_size=8),
    st.floats(allow_nan=True, allow_infinity=True, width=64),
)

_hashable = st.one_of(
    st.integers(), st.booleans(), st.none(), st.text(max_size=6),
    st.floats(allow_nan=False, allow_infinity=True),
)


def _values(depth: int = 3):
    if depth == 0:
        return _scalars
    child = _values(depth - 1)
    return st.one_of(
        _scalars,
        st.lists(child, max_size=4),
        st.lists(child, max_size=4).map(tuple),
        st.sets(_hashable, max_size=4),
        st.sets(_hashable, max_size=4).map(frozenset),
        st.dictionaries(_hashable, child, max_size=4),
    )


@settings(max_examples=200, deadline=None)
@given(_values())
def test_roundtrip_encode_decode_encode(value):
    cv = from_python(value)
    enc = encode(cv)
    again = decode(enc)
    assert encode(again) == enc
    assert again == cv


@settings(max_examples=100, deadline=None)
@given(_values())
def test_python_roundtrip_where_realizable(value):
    cv = from_python(value)
    if cv.tag == "exception":
        return
    back = to_python(cv)
    assert encode(from_python(back)) == encode(cv)
