"""Canonical JSON serialization and content addressing.

Artifacts (datasets, projections, models, reports) are stored and
transmitted as canonical JSON: object keys sorted, no whitespace, floats
rendered with 17 significant digits. 17 digits round-trip any float64
exactly, so parse -> re-serialize is a fixed point and the content hash
of an artifact is stable across processes and restarts.
"""

from __future__ import annotations

import hashlib
import json
import math


def _render(value, out):
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite float in canonical JSON: %r" % value)
        if value == 0.0:
            # normalize -0.0: "-0" would re-parse as int 0 and re-render
            # as "0", breaking the serialize->parse->serialize fixed point
            out.append("0")
        else:
            out.append(format(value, ".17g"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _render(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise TypeError("canonical JSON object keys must be str, got %r" % (key,))
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _render(value[key], out)
        out.append("}")
    else:
        raise TypeError("type %s is not canonical-JSON serializable" % type(value).__name__)


def canonical_json(value) -> str:
    """Serialize ``value`` to its canonical JSON string."""
    out = []
    _render(value, out)
    return "".join(out)


def canonical_bytes(value) -> bytes:
    return canonical_json(value).encode("utf-8")


def content_id(value) -> str:
    """SHA-256 hex digest of the canonical JSON encoding of ``value``."""
    return hashlib.sha256(canonical_bytes(value)).hexdigest()
