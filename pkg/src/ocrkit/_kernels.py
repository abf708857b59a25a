"""Edit-distance kernels over integer token codes.

The inner DP loop dominates corpus scoring, so it is JIT-compiled with numba
by default. A pure-numpy anti-diagonal implementation serves as the fallback;
set ``OCRKIT_NO_NUMBA=1`` to force it (or it is picked automatically when
numba is unavailable). ``benchmarks/bench_edit_distance.py`` compares both.
"""

from __future__ import annotations

import os

import numpy as np


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes")


def levenshtein_py(a: np.ndarray, b: np.ndarray) -> int:
    """Two-row Levenshtein DP in plain Python (reference, also numba source)."""
    n = a.size
    m = b.size
    if n == 0:
        return m
    if m == 0:
        return n
    prev = np.arange(m + 1)
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            dele = prev[j] + 1
            if dele < best:
                best = dele
            ins = cur[j - 1] + 1
            if ins < best:
                best = ins
            cur[j] = best
        prev, cur = cur, prev
    return int(prev[m])


def levenshtein_numpy(a: np.ndarray, b: np.ndarray) -> int:
    """Levenshtein DP vectorized over anti-diagonals.

    Cells on diagonal k = i + j depend only on diagonals k-1 and k-2, so each
    wavefront is one vectorized minimum. The popular single-pass row
    relaxation is not exact (the deletion term needs a prefix scan); this
    formulation has no intra-step dependency and is.
    """
    n = int(a.size)
    m = int(b.size)
    if n == 0:
        return m
    if m == 0:
        return n
    prev2 = np.zeros(1, dtype=np.int64)  # diagonal k-2, i ascending
    prev1 = np.ones(2, dtype=np.int64)   # diagonal k-1
    for k in range(2, n + m + 1):
        i_lo = max(0, k - m)
        i_hi = min(n, k)
        i = np.arange(i_lo, i_hi + 1, dtype=np.int64)
        cur = np.empty(i.size, dtype=np.int64)
        p1_lo = max(0, k - 1 - m)
        p2_lo = max(0, k - 2 - m)
        inner = (i >= 1) & (i <= n) & (k - i >= 1) & (k - i <= m)
        ii = i[inner]
        up = prev1[ii - 1 - p1_lo] + 1
        left = prev1[ii - p1_lo] + 1
        sub = prev2[ii - 1 - p2_lo] + (a[ii - 1] != b[k - ii - 1])
        cur[inner] = np.minimum(np.minimum(up, left), sub)
        if i_lo == 0:
            cur[0] = k
        if i_hi == k:
            cur[-1] = k
        prev2, prev1 = prev1, cur
    return int(prev1[0])


_FORCE_NUMPY = _env_flag("OCRKIT_NO_NUMBA")

levenshtein_numba = None
if not _FORCE_NUMPY:
    try:
        from numba import njit

        levenshtein_numba = njit(cache=True, nogil=True)(levenshtein_py)
    except ImportError:
        levenshtein_numba = None

if levenshtein_numba is not None:
    BACKEND = "numba"
    _active = levenshtein_numba
else:
    BACKEND = "numpy"
    _active = levenshtein_numpy


def levenshtein(a: np.ndarray, b: np.ndarray) -> int:
    """Unit-cost edit distance between two int64 code arrays."""
    return int(_active(a, b))
