#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Sizes default to a realistic corpus pairing: ~600 targets x ~500 sources
at 768 dimensions, plus the score-weighting stage over a small catalog.

    python3 benchmarks/bench_kernels.py [--targets N] [--sources N] [--dim N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ccemap.transfer import _kernels_py


def load_backends():
    backends = [("python", _kernels_py)]
    try:
        from ccemap.transfer import _kernels

        backends.append(("compiled", _kernels))
    except ImportError:
        print("compiled kernels not built; benchmarking the fallback only")
    return backends


def timeit(fn, repeats: int = 5) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--targets", type=int, default=612)
    parser.add_argument("--sources", type=int, default=500)
    parser.add_argument("--dim", type=int, default=768)
    parser.add_argument("--requirements", type=int, default=40)
    parser.add_argument("--p", type=float, default=5.5)
    args = parser.parse_args()

    rng = np.random.default_rng(1)
    x = np.ascontiguousarray(rng.normal(size=(args.targets, args.dim)))
    y = np.ascontiguousarray(rng.normal(size=(args.sources, args.dim)))
    labels = np.ascontiguousarray(
        (rng.random((args.sources, args.requirements)) < 0.3).astype(np.float64)
    )

    backends = load_backends()
    dist = {name: None for name, _ in backends}
    print(
        f"\n{args.targets} targets x {args.sources} sources, dim {args.dim}, "
        f"R={args.requirements}, p={args.p}\n"
    )
    print(f"{'kernel':<22}{'backend':<12}{'best (ms)':>12}")
    print("-" * 46)
    for name, mod in backends:
        t = timeit(lambda: mod.sq_euclidean(x, y))
        dist[name] = np.sqrt(mod.sq_euclidean(x, y))
        print(f"{'sq_euclidean':<22}{name:<12}{t * 1e3:>12.2f}")
    for name, mod in backends:
        t = timeit(lambda: mod.cosine_distance(x, y))
        print(f"{'cosine_distance':<22}{name:<12}{t * 1e3:>12.2f}")
    for name, mod in backends:
        d = dist[name]

        def stage():
            w, _ = mod.powered_weights(d, args.p, 1e-9)
            return w @ labels

        t = timeit(stage)
        print(f"{'weights+scores':<22}{name:<12}{t * 1e3:>12.2f}")

    if len(backends) == 2:
        a = dist["python"]
        b = dist["compiled"]
        err = float(np.max(np.abs(a - b)))
        print(f"\nmax |euclidean python - compiled| = {err:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
