#!/usr/bin/env python3
"""Time the compiled kernels against the NumPy fallback.

Runs each hot kernel on identical inputs through both implementations and
prints the per-call wall time plus the speedup.  Invoke from the package
root:

    python3 benchmarks/bench_kernels.py [--size 200] [--steps 100000]

The compiled extension must be built for the comparison to mean anything;
if it is missing the script says so and exits.
"""

import argparse
import importlib
import time

import numpy as np

from rovellalab._kernels import fallback

KIND_G0 = fallback.KIND_G0
ALPHA = 1.5


def _load_compiled():
    try:
        return importlib.import_module("rovellalab._kernels._core")
    except ImportError:
        return None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=200,
                        help="ensemble members per call (default 200)")
    parser.add_argument("--steps", type=int, default=100_000,
                        help="iterations per member (default 100000)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="repeats per measurement, best is kept")
    args = parser.parse_args()

    core = _load_compiled()
    if core is None:
        print("compiled extension not built; nothing to compare")
        return 1

    rng = np.random.default_rng(0)
    t0s = rng.uniform(-1.0, 1.0, size=args.size)
    checkpoints = np.array([args.steps // 10, args.steps], dtype=np.int64)

    cases = [
        ("orbit_array",
         lambda impl: impl.orbit_array(KIND_G0, ALPHA, 0.0, 0.3, args.steps)),
        ("cocycle_sums",
         lambda impl: impl.cocycle_sums(KIND_G0, ALPHA, 0.0, t0s, args.steps)),
        ("first_visit",
         lambda impl: impl.first_visit(KIND_G0, ALPHA, 0.0, t0s,
                                       -0.05, 0.05, args.steps)),
        ("basin_entry",
         lambda impl: impl.basin_entry(fallback.KIND_F0, 2.0, 0.0, t0s,
                                       -1.0, -0.9774, 10, args.steps)),
        ("neglog_sums",
         lambda impl: impl.neglog_sums(KIND_G0, ALPHA, 0.0, t0s,
                                       checkpoints)),
    ]

    print(f"members={args.size}  steps={args.steps}  "
          f"best of {args.repeats}\n")
    print(f"{'kernel':<14} {'compiled':>12} {'fallback':>12} {'speedup':>9}")
    for name, call in cases:
        tc = _time(lambda: call(core), args.repeats)
        tf = _time(lambda: call(fallback), args.repeats)
        print(f"{name:<14} {tc * 1e3:>10.1f}ms {tf * 1e3:>10.1f}ms "
              f"{tf / tc:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
