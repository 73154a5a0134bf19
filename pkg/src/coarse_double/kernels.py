"""Min-plus matrix product.

``minplus(A, B)[i, j] = min_k A[i, k] + B[k, j]``. The compiled kernel walks
64x64 tiles of (row, middle) indices; rows can be split across threads. Both
min and + are evaluated identically in every schedule, so the threaded result
is bit-identical to the sequential one.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numba
import numpy as np

TILE = 64


@numba.njit(cache=True, nogil=True)
def _minplus_rows(A, B, out, r0, r1):
    m = A.shape[1]
    p = B.shape[1]
    for i0 in range(r0, r1, TILE):
        i1 = min(i0 + TILE, r1)
        for k0 in range(0, m, TILE):
            k1 = min(k0 + TILE, m)
            for i in range(i0, i1):
                for k in range(k0, k1):
                    a = A[i, k]
                    for j in range(p):
                        v = a + B[k, j]
                        if v < out[i, j]:
                            out[i, j] = v


def worker_count() -> int:
    """Worker cap from ``COARSE_DOUBLE_THREADS``, else available parallelism."""
    env = os.environ.get("COARSE_DOUBLE_THREADS")
    if env:
        return max(1, int(env))
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover - non-linux
        return os.cpu_count() or 1


def _prepare(A, B):
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise ValueError(f"incompatible shapes {A.shape} and {B.shape}")
    return A, B, np.full((A.shape[0], B.shape[1]), np.inf)


def minplus(A, B, threads: int | None = 1) -> np.ndarray:
    """Min-plus product. ``threads=None`` uses :func:`worker_count`."""
    A, B, out = _prepare(A, B)
    n = A.shape[0]
    if threads is None:
        threads = worker_count()
    if threads <= 1 or n <= TILE:
        _minplus_rows(A, B, out, 0, n)
        return out
    # whole tiles per worker keep the per-row schedule identical
    blocks = [(r, min(r + TILE, n)) for r in range(0, n, TILE)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(lambda rb: _minplus_rows(A, B, out, rb[0], rb[1]), blocks))
    return out


def minplus_reference(A, B, chunk: int = 32) -> np.ndarray:
    """Brute-force broadcast implementation; test oracle only."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    out = np.empty((A.shape[0], B.shape[1]))
    for r in range(0, A.shape[0], chunk):
        out[r : r + chunk] = (A[r : r + chunk, :, None] + B[None, :, :]).min(axis=1)
    return out
