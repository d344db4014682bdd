"""Canonical, diff-stable serialization of run artifacts.

Exact scalars travel as strings ("2/3", "cyc7:0,1,0") so that a report can be
parsed back into the originating field without precision loss; floats use
repr, which round-trips.  JSON is emitted with sorted keys and fixed
separators so identical runs produce identical bytes.
"""

from __future__ import annotations

import hashlib
import json


def scalar_str(ctx, value) -> str:
    return ctx.serialize(ctx.coerce(value))


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def section_hash(data) -> str:
    """Short content hash used to bind certificates to their instance."""
    blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]
