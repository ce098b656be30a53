"""Canonical JSON: the serialization that makes content addressing work."""

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterlens.canonical import canonical_bytes, canonical_json, content_id


def test_keys_sorted_no_whitespace():
    doc = {"zeta": 1, "alpha": [1, 2], "mid": {"b": 2, "a": 1}}
    assert canonical_json(doc) == '{"alpha":[1,2],"mid":{"a":1,"b":2},"zeta":1}'


def test_float_formatting_17g():
    # 17 significant digits: enough to round-trip any float64
    assert canonical_json(0.1) == "0.10000000000000001"
    assert canonical_json(1.0) == "1"
    assert canonical_json(-2.5) == "-2.5"


def test_booleans_and_null():
    assert canonical_json({"t": True, "f": False, "n": None}) == (
        '{"f":false,"n":null,"t":true}'
    )


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        canonical_json(float("nan"))
    with pytest.raises(ValueError):
        canonical_json({"x": float("inf")})


def test_non_string_keys_rejected():
    with pytest.raises(TypeError):
        canonical_json({1: "a"})


def test_content_id_is_sha256_hex():
    cid = content_id({"a": 1})
    assert len(cid) == 64
    assert all(c in "0123456789abcdef" for c in cid)


def test_content_id_stable_under_key_order():
    assert content_id({"a": 1, "b": 2}) == content_id({"b": 2, "a": 1})


def test_unicode_preserved():
    s = canonical_json({"name": "café"})
    assert "café" in s
    assert json.loads(s) == {"name": "café"}


# A float strategy that avoids NaN/inf (rejected by design) but covers
# subnormals, huge magnitudes, and negative zero.
finite_floats = st.floats(allow_nan=False, allow_infinity=False)

json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | finite_floats | st.text(),
    lambda children: st.lists(children, max_size=4)
    | st.dictionaries(st.text(max_size=8), children, max_size=4),
    max_leaves=20,
)


@given(json_values)
@settings(max_examples=200, deadline=None)
def test_output_parses_back_equal(value):
    """Canonical text is valid JSON and parses to an equal value.

    Float equality here is exact: 17 significant digits round-trip
    float64, so parse(render(x)) == x bit-for-bit (modulo -0.0 == 0.0,
    which Python's == already treats as equal).
    """
    text = canonical_json(value)
    assert json.loads(text) == value


@given(json_values)
@settings(max_examples=200, deadline=None)
def test_serialize_parse_serialize_is_fixed_point(value):
    """Re-serializing a parsed canonical document reproduces the bytes.

    This is the property content addressing depends on: ids computed
    before storage and after reload agree.
    """
    first = canonical_bytes(value)
    again = canonical_bytes(json.loads(first))
    assert first == again


@given(finite_floats)
@settings(max_examples=500, deadline=None)
def test_float_round_trip_exact(x):
    parsed = json.loads(canonical_json(x))
    assert parsed == x or (math.isnan(parsed) and math.isnan(x))
    # bit-level check, except -0.0 (JSON has no signed-zero guarantee)
    if x != 0:
        assert math.copysign(1.0, parsed) == math.copysign(1.0, x)
