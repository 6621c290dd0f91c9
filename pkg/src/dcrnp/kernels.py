"""Kernel backend selection.

The compiled extension is preferred; the pure-Python fallback is used when it
is missing or when the DCRNP_PURE environment variable is set to a non-empty
value.  Both backends produce bit-identical arrays.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("DCRNP_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
INF: int = _impl.INF
SINK: int = _kernels_py.SINK
SENSOR: int = _kernels_py.SENSOR
CANDIDATE: int = _kernels_py.CANDIDATE

build_adjacency = _impl.build_adjacency
bfs = _impl.bfs

assert INF == _kernels_py.INF
