"""Exact best-subset search behind a single entry point.

The compiled kernel is used when it imported and the scaled integers fit in
64 bits; otherwise the pure-Python implementation runs.  Set
``UFPMAZE_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

from . import _search_py

try:
    if os.environ.get("UFPMAZE_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _search as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"
_INT64_SAFE = 1 << 62


def _scale(values):
    """Common positive integer multiple making every value integral."""
    lcm = 1
    for v in values:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    return lcm


def best_subset(weights, demands, sum_rows, sum_caps, count_rows=(), count_cap=0, backend=None):
    """Bitmask of the best subset of items ``0..n-1``.

    ``weights``, ``demands`` and ``sum_caps`` may be rationals; they are
    rescaled to integers before the search.  ``backend`` forces
    ``"python"`` or ``"compiled"``.
    """
    weights = [Fraction(w) for w in weights]
    demands = [Fraction(d) for d in demands]
    sum_caps = [Fraction(u) for u in sum_caps]
    n = len(weights)
    if n == 0:
        return 0
    sw = _scale(weights)
    sd = _scale(demands + sum_caps)
    iw = [int(w * sw) for w in weights]
    idem = [int(d * sd) for d in demands]
    icap = [math.floor(u * sd) for u in sum_caps]
    rows = [int(r) for r in sum_rows]
    crows = [int(r) for r in count_rows]
    cap = int(count_cap)

    use = backend or BACKEND
    if use == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel unavailable")
        fits = (
            n <= 63
            and sum(iw) < _INT64_SAFE
            and sum(idem) < _INT64_SAFE
            and all(abs(u) < _INT64_SAFE for u in icap)
        )
        if fits:
            return _compiled.best_subset(iw, idem, rows, icap, crows, cap)
        if backend == "compiled":
            raise OverflowError("values exceed int64 range")
    return _search_py.best_subset(iw, idem, rows, icap, crows, cap)
