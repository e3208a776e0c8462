"""Compare the numba and numpy backends on the three hot paths.

    python benchmarks/bench_kernels.py [--count 200] [--repeat 3]

Each workload runs once per backend to warm up (JIT compilation is excluded
from the timings), then ``--repeat`` times; the best time is reported.
Results from both backends are compared for equality.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from troprank import _kernels
from troprank.corpus import corpus
from troprank.obstruct import certify_lower_bound
from troprank.tropical import TropMatrix, _subset_arrays, find_witness, witness_cells


def _perm_workload(mats):
    out = []
    for B in mats:
        M, _ = B.as_integers()
        for k in (2, 3, 4, 5):
            if k <= min(B.shape):
                rows, cols = _subset_arrays(B.rows, B.cols, k)
                mins, counts = _kernels.perm_stats(M, rows, cols)
                out.append((np.asarray(mins).tolist(), np.asarray(counts).tolist()))
    return out


def _witness_workload(mats):
    out = []
    for B in mats:
        w = find_witness(B)
        out.append(None if w is None else w.lam)
        out.append(len(witness_cells(B, (0, 1, 2, 3), limit=8)))
    return out


def _obstruction_workload(mats):
    return [certify_lower_bound(B, 3, f).verdict for B in mats for f in ("GF4", "F5")] + [
        certify_lower_bound(TropMatrix(_B), 3, "F3", method="enumerate").verdict
    ]


_B = [[1, 0, 0, 0, 1], [0, 1, 0, 0, 1], [0, 0, 1, 0, 1], [0, 0, 0, 0, 1], [1, 1, 1, 1, 0]]

WORKLOADS = {
    "tropical permanents": _perm_workload,
    "witness closure": _witness_workload,
    "obstruction search": _obstruction_workload,
}


def _best(fn, arg, repeat):
    result, best = None, float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn(arg)
        best = min(best, time.perf_counter() - t)
    return result, best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200, help="corpus size")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    mats = list(corpus(args.count, args.seed))
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    print(f"{'workload':<22}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}  agree")
    for name, fn in WORKLOADS.items():
        times, results = {}, {}
        for b in backends:
            prev = _kernels.set_backend(b)
            try:
                fn(mats[:2])  # warm-up / JIT
                results[b], times[b] = _best(fn, mats, args.repeat)
            finally:
                _kernels.set_backend(prev)
        speed = times["numpy"] / times["numba"] if "numba" in times else float("nan")
        agree = len({repr(r) for r in results.values()}) == 1
        cells = "".join(f"{times[b]:>11.3f}s" for b in backends)
        print(f"{name:<22}{cells}{speed:>9.1f}x  {agree}")


if __name__ == "__main__":
    main()
