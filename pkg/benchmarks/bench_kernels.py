#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-NumPy fallback.

Measures the hot operations (rank profiling, pair scoring, and a full
pairwise compactness pass over a 9-vector set) on both backends and
prints a timing table.

    python benchmarks/bench_kernels.py --dims 300 --pairs 2000
"""

import argparse
import time

import numpy as np

from ranksim import _pykernels

try:
    from ranksim import _ckernels
except ImportError:
    _ckernels = None


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(dims: int, n_pairs: int, set_size: int, seed: int) -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(seed)
    vectors = rng.standard_normal((n_pairs + 1, dims))
    profiles = [_pykernels.rank_profile(v) for v in vectors]
    cluster = rng.standard_normal((set_size, dims))
    cluster_profiles = [_pykernels.rank_profile(v) for v in cluster]

    def rank_all(mod):
        for v in vectors:
            mod.rank_profile(v)

    def apsynp_pairs(mod):
        for i in range(n_pairs):
            mod.apsynp(profiles[i], profiles[i + 1], 0.1)

    def apsyn_pairs(mod):
        for i in range(n_pairs):
            mod.apsyn(profiles[i], profiles[i + 1], float(dims))

    def cosine_pairs(mod):
        for i in range(n_pairs):
            mod.cosine(vectors[i], vectors[i + 1])

    def pairwise_compactness(mod):
        m = len(cluster_profiles)
        for i in range(m):
            for j in range(i + 1, m):
                mod.apsynp(cluster_profiles[i], cluster_profiles[j], 0.1)

    cases = [
        (f"rank_profile x{n_pairs + 1}", rank_all),
        (f"apsynp x{n_pairs}", apsynp_pairs),
        (f"apsyn x{n_pairs}", apsyn_pairs),
        (f"cosine x{n_pairs}", cosine_pairs),
        (f"pairwise set of {set_size}", pairwise_compactness),
    ]
    rows = []
    for label, fn in cases:
        t_py = _time(lambda: fn(_pykernels))
        t_c = _time(lambda: fn(_ckernels)) if _ckernels is not None else float("nan")
        rows.append((label, t_py, t_c))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, default=300)
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--set-size", type=int, default=9)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    if _ckernels is None:
        print("note: compiled backend not built; showing python timings only\n")
    rows = bench(args.dims, args.pairs, args.set_size, args.seed)
    print(f"{'operation':<28} {'python [ms]':>12} {'c [ms]':>12} {'speedup':>8}")
    for label, t_py, t_c in rows:
        speedup = t_py / t_c if t_c == t_c and t_c > 0 else float("nan")
        print(f"{label:<28} {1e3 * t_py:>12.3f} {1e3 * t_c:>12.3f} {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
