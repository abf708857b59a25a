#!/usr/bin/env python3
"""Benchmark the edit-distance kernels: numba @njit vs pure-numpy wavefront
(vs the plain Python loop, optionally).

Run after installing the package:

    python benchmarks/bench_edit_distance.py
    python benchmarks/bench_edit_distance.py --sizes 200,1000,4000 --repeats 5
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ocrkit import _kernels


def time_one(fn, a, b, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(a, b)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="100,500,2000", help="comma list of sequence lengths")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--alphabet", type=int, default=64, help="distinct token codes")
    parser.add_argument("--python", action="store_true", help="also time the plain Python loop")
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    backends = [("numpy", _kernels.levenshtein_numpy)]
    if _kernels.levenshtein_numba is not None:
        warm = rng.integers(0, args.alphabet, 16)
        _kernels.levenshtein_numba(warm, warm)  # compile outside the timing
        backends.insert(0, ("numba", _kernels.levenshtein_numba))
    else:
        print("numba backend unavailable (OCRKIT_NO_NUMBA set or numba missing)")
    if args.python:
        backends.append(("python", _kernels.levenshtein_py))

    print(f"active backend: {_kernels.BACKEND}")
    header = "size".rjust(8) + "".join(name.rjust(14) for name, _ in backends)
    print(header)
    for size in sizes:
        a = rng.integers(0, args.alphabet, size)
        b = rng.integers(0, args.alphabet, size)
        results = [next(f for n, f in backends if n == name)(a, b) for name, _ in backends]
        if len(set(results)) != 1:
            raise SystemExit(f"backends disagree at size {size}: {results}")
        row = f"{size:>8}"
        for _, fn in backends:
            row += f"{time_one(fn, a, b, args.repeats) * 1000:>12.2f}ms"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
