#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_backends.py
"""

import random
import time

import numpy as np

from magpos import _fallback

try:
    from magpos import _kernels
except ImportError:
    _kernels = None


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_relax(impl, size=64, sweeps=50, seed=0):
    rng = np.random.default_rng(seed)
    angles = np.ascontiguousarray(rng.uniform(0, 2 * np.pi, (size, size)))
    pinned = np.zeros((size, size), dtype=np.uint8)
    cells = list(range(size * size))
    shuffler = random.Random(seed)

    def work():
        for _ in range(sweeps):
            shuffler.shuffle(cells)
            impl.relax_sweep(angles, pinned, np.array(cells, dtype=np.int64))

    return timeit(work, repeats=3)


def bench_choose(impl, calls=20000, peers=16, seed=0):
    rng = random.Random(seed)
    views = [
        (
            np.array([rng.randint(1, 50) for _ in range(peers)], dtype=np.int64),
            np.array([rng.randint(0, 3) for _ in range(peers)], dtype=np.int64),
            rng.randint(1, 50),
            rng.randint(0, 3),
        )
        for _ in range(200)
    ]

    def work():
        for i in range(calls):
            stakes, forks, self_stake, current = views[i % len(views)]
            impl.choose_fork_paper(self_stake, current, stakes, forks)

    return timeit(work, repeats=3)


def main():
    if _kernels is None:
        print("compiled kernels not built; only the fallback is available")
        return
    rows = [
        ("relax_sweep 64x64 x50", bench_relax(_kernels), bench_relax(_fallback)),
        ("choose_fork x20000 (k=16)", bench_choose(_kernels), bench_choose(_fallback)),
    ]
    print(f"{'benchmark':<28}{'compiled':>12}{'python':>12}{'speedup':>10}")
    for name, compiled, python in rows:
        print(f"{name:<28}{compiled:>10.3f} s{python:>10.3f} s{python / compiled:>9.1f}x")


if __name__ == "__main__":
    main()
