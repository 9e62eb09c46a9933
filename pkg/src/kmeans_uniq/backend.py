"""Kernel backend selection.

The env var ``KMU_BACKEND`` picks the implementation of the hot numeric
kernels: ``numba`` (default when numba imports cleanly) or ``numpy`` (pure
fallback). ``benchmarks/bench_backends.py`` compares the two.
"""

from __future__ import annotations

import os

_requested = os.environ.get("KMU_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ImportError(f"KMU_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numpy":
    from . import _kernels_numpy as _impl
else:
    try:
        from . import _kernels_numba as _impl
    except ImportError:
        if _requested == "numba":
            raise
        from . import _kernels_numpy as _impl

BACKEND = _impl.BACKEND_NAME

min_sqdist = _impl.min_sqdist
assign = _impl.assign
lloyd = _impl.lloyd
hartigan = _impl.hartigan
gh_min_distortion = _impl.gh_min_distortion
