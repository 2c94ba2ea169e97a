"""Benchmark the numba kernels against the pure-numpy fallback.

Times the three hot paths on the heaviest catalog workload (the boolean
lattice with 3 atoms at side size 4): batch triangle validation, canonical
labeling, and the full amalgamation scan.  The numba path is warmed up first
so JIT compilation is reported separately from steady-state timings.

Run:  python3 benchmarks/bench_backends.py
"""

import random
import time
from itertools import permutations

import numpy as np

from latum import kernels
from latum.homogeneity import check_amalgamation_property, enumerate_valid_spaces
from latum.lattice import catalog


def _random_mats(lat, n, count, rng):
    values = [x for x in range(lat.n) if x != lat.bottom]
    mats = np.zeros((count, n, n), dtype=np.int64)
    for b in range(count):
        for i in range(n):
            for j in range(i + 1, n):
                v = rng.choice(values)
                mats[b, i, j] = mats[b, j, i] = v
    return mats


def timed(fn, repeat=5):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    lat = catalog("boolean 3")
    leq, _, join = lat.tables64()
    rng = random.Random(0)
    mats = _random_mats(lat, 6, 200_000, rng)
    checks = kernels.triangle_checks(6)
    perms = np.asarray(
        [[0, 1] + list(p) for p in permutations([2, 3, 4, 5])], dtype=np.int64)

    print(f"workload: boolean 3 ({lat.n} elements), {mats.shape[0]:,} candidate 6-point matrices")
    print()

    # JIT warmup (compiles and caches all three kernels)
    kernels.set_backend("numba")
    t0 = time.perf_counter()
    kernels.triangle_mask(mats[:10], checks, leq, join)
    kernels.canonical_mask(mats[:10], perms)
    check_amalgamation_property(catalog("chain 2"), 3)
    print(f"numba warmup (JIT compile or cache load): {time.perf_counter() - t0:.2f}s")
    print()

    rows = []
    for label, fn in [
        ("triangle_mask (200k x 6pt)", lambda: kernels.triangle_mask(mats, checks, leq, join)),
        ("canonical_mask (200k x 24 perms)", lambda: kernels.canonical_mask(mats, perms)),
        ("enumerate 4-point spaces", lambda: enumerate_valid_spaces(lat, 4)),
        ("amalgamation scan (sides <= 4)", lambda: check_amalgamation_property(lat, 4)),
    ]:
        times = {}
        outputs = {}
        for backend in ("numpy", "numba"):
            kernels.set_backend(backend)
            times[backend], outputs[backend] = timed(fn, repeat=3)
        if isinstance(outputs["numpy"], np.ndarray):
            assert np.array_equal(outputs["numpy"], outputs["numba"]), label
        rows.append((label, times["numpy"], times["numba"]))
    kernels.set_backend(None)

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for label, t_np, t_nb in rows:
        print(f"{label:<{width}}  {t_np * 1e3:>8.2f}ms  {t_nb * 1e3:>8.2f}ms  {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
