"""Pick the raster kernel backend at import time.

The compiled extension is used when it was built; otherwise the pure-Python
twin is.  Set ``STRUCTPROMPT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import logging
import os

from structprompt import _pykernels

log = logging.getLogger(__name__)


def _load():
    if os.environ.get("STRUCTPROMPT_PURE_PYTHON", "").strip() not in ("", "0"):
        return _pykernels
    try:
        from structprompt import _ckernels
    except ImportError:
        log.debug("compiled kernels unavailable, using pure-Python fallback")
        return _pykernels
    return _ckernels


_impl = _load()
BACKEND: str = _impl.BACKEND

fill_square = _impl.fill_square
fill_circle = _impl.fill_circle
fill_triangle = _impl.fill_triangle
label_components = _impl.label_components


def backends() -> dict:
    """Every importable backend keyed by name (for tests and benchmarks)."""
    found = {"python": _pykernels}
    try:
        from structprompt import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
