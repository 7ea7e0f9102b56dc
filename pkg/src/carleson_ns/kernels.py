"""Backend selection for the dyadic aggregation kernel.

The compiled extension is used when it was built; otherwise the numpy
fallback.  Setting ``CARLESON_NS_PURE=1`` forces the fallback.
``CARLESON_NS_THREADS`` caps the number of worker threads used to split the
root cubes (the compiled kernel releases the GIL).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("CARLESON_NS_PURE", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"

_MIN_ROOTS_PER_THREAD = 64


def worker_count() -> int:
    raw = os.environ.get("CARLESON_NS_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = os.cpu_count() or 1
    return max(1, cap)


def _impl(backend: str | None):
    backend = backend or BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled.subcube_reduce
    if backend == "python":
        return _kernels_py.subcube_reduce
    raise ValueError(f"unknown backend {backend!r}")


def subcube_reduce(j, k, w, root_j, root_k, use_max: bool = False, backend: str | None = None) -> np.ndarray:
    """Per-root sum (or max) of ``w`` over entries ``(j, k)`` inside root cube ``(root_j, root_k)``.

    Containment of ``Q_{j,k}`` in ``Q_{j0,k0}`` is ``j >= j0`` and
    ``k >> (j - j0) == k0`` coordinatewise (arithmetic shift is the floor).
    """
    j = np.ascontiguousarray(j, dtype=np.int64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    root_j = np.ascontiguousarray(root_j, dtype=np.int64)
    root_k = np.ascontiguousarray(root_k, dtype=np.int64).reshape(len(root_j), -1)
    k = np.ascontiguousarray(k, dtype=np.int64).reshape(len(j), root_k.shape[1])
    fn = _impl(backend)
    threads = min(worker_count(), max(1, len(root_j) // _MIN_ROOTS_PER_THREAD))
    if threads == 1:
        return np.asarray(fn(j, k, w, root_j, root_k, use_max))
    chunks = np.array_split(np.arange(len(root_j)), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(
            lambda idx: np.asarray(fn(j, k, w, root_j[idx].copy(), root_k[idx].copy(), use_max)),
            chunks,
        )
        return np.concatenate(list(parts))
