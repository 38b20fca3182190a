"""Selects the simplex pivot kernel at import time.

The compiled Cython kernel is preferred; the numpy implementation is the
drop-in fallback.  Set ``FEDENVELOPE_PURE_PYTHON=1`` to force the fallback
(used by the benchmark and the kernel-parity tests).
"""

import os

from . import _simplex_py

if os.environ.get("FEDENVELOPE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _simplex_py
    USING_COMPILED_KERNEL = False
else:
    try:
        from . import _simplex_c as _impl  # type: ignore[no-redef]

        USING_COMPILED_KERNEL = True
    except ImportError:
        _impl = _simplex_py
        USING_COMPILED_KERNEL = False

run_pivots = _impl.run_pivots
OPTIMAL = _simplex_py.OPTIMAL
UNBOUNDED = _simplex_py.UNBOUNDED
MAX_ITER = _simplex_py.MAX_ITER
