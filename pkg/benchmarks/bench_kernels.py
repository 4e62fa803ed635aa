#!/usr/bin/env python3
"""Benchmark the compiled bounding kernels against the numpy fallback.

Kernel-level timings run both implementations in-process; the end-to-end
comparison re-runs the exact solver in a subprocess with GEOCENSOR_PURE=1.

Usage: python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import os
import subprocess
import sys
import time

import numpy as np

from geocensor import _kernels_py

try:
    from geocensor import _kernels
except ImportError:
    _kernels = None

SIZES = ((16, 16), (32, 64), (64, 128), (128, 512))
CALLS = 300


def node_inputs(rng, n, m):
    contrib = np.ascontiguousarray(rng.normal(size=(m - 1, n)))
    order = np.ascontiguousarray(
        np.argsort(contrib, axis=1, kind="stable").astype(np.int32))
    state = rng.choice([0, 1, 2], size=n, p=[0.6, 0.2, 0.2]).astype(np.uint8)
    return contrib, order, state


def time_backend(impl, problems):
    out = np.empty(problems[0][0].shape[1], dtype=np.int32)
    start = time.perf_counter()
    for contrib, order, state in problems:
        m, totals = impl.min_free_deletions(contrib, order, state,
                                            contrib.shape[1])
        usable = np.nonzero((m > 0) & (m <= contrib.shape[1]))[0]
        if usable.size:
            ranked = usable[np.argsort(m[usable], kind="stable")].astype(np.int32)
            impl.probe_union(contrib, order, state, totals, ranked,
                             len(ranked), -1, out)
    return time.perf_counter() - start


def end_to_end(pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["GEOCENSOR_PURE"] = "1"
    else:
        env.pop("GEOCENSOR_PURE", None)
    code = (
        "import time, geocensor as gc\n"
        "inst = gc.gen_random(48, 64, 1.0, seed=3)\n"
        "t0 = time.perf_counter()\n"
        "r = gc.solve_bnb(inst, gc.ProblemSpec.topk(5))\n"
        "print(gc.KERNEL_BACKEND, time.perf_counter() - t0, r.nodes_explored)\n"
    )
    res = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    backend, elapsed, nodes = res.stdout.split()
    print(f"  solve_bnb N=48 M=64 top-5 [{backend}]: {float(elapsed):.2f}s "
          f"({nodes} nodes)")
    return float(elapsed)


def main() -> None:
    rng = np.random.default_rng(0)
    print(f"kernel benchmark: {CALLS} node evaluations per size")
    print(f"{'size':>12} {'python':>10} {'cython':>10} {'speedup':>9}")
    for n, m in SIZES:
        problems = [node_inputs(rng, n, m) for _ in range(CALLS)]
        py = time_backend(_kernels_py, problems)
        if _kernels is None:
            print(f"{n}x{m:>6} {py * 1e3:>9.1f}ms {'n/a':>10} {'n/a':>9}")
            continue
        cy = time_backend(_kernels, problems)
        print(f"{f'{n}x{m}':>12} {py * 1e3:>8.1f}ms {cy * 1e3:>8.1f}ms "
              f"{py / cy:>8.1f}x")

    print("end-to-end (subprocess per backend):")
    slow = end_to_end(pure=True)
    if _kernels is not None:
        fast = end_to_end(pure=False)
        print(f"  end-to-end speedup: {slow / fast:.1f}x")


if __name__ == "__main__":
    main()
