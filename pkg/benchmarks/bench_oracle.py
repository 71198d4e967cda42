"""Benchmark the dense-oracle stepping backends (numba loop vs numpy scan).

Usage: python benchmarks/bench_oracle.py [--h 1e-4] [--repeats 3]
"""

import argparse
import time

import numpy as np

from relaydde import ModelParams, integrate_dense, periodic_solution


def run(backend: str, params: ModelParams, h: float, repeats: int) -> tuple[float, object]:
    orb = periodic_solution(params)
    hist = orb.history_min_phase()
    horizon = 3 * orb.period
    integrate_dense(params, hist, horizon, h=h, backend=backend)  # warm-up/JIT
    best = float("inf")
    dense = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        dense = integrate_dense(params, hist, horizon, h=h, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, dense


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--h", type=float, default=1e-4)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    params = ModelParams(tau=1.0, beta_l=0.4, beta_u=0.8)
    results = {}
    for backend in ("numpy", "numba"):
        try:
            dt, dense = run(backend, params, args.h, args.repeats)
        except ImportError:
            print(f"{backend:>6}: unavailable")
            continue
        steps = dense.t.size - 1
        results[backend] = dense
        print(f"{backend:>6}: {dt * 1e3:8.2f} ms  ({steps / dt / 1e6:6.1f} Msteps/s, "
              f"{steps} steps, {dense.zeros.size} zeros)")
    if len(results) == 2:
        dev = float(np.max(np.abs(results["numba"].x - results["numpy"].x)))
        zdev = float(np.max(np.abs(results["numba"].zeros - results["numpy"].zeros)))
        print(f"backend agreement: max|dx| = {dev:.3e}, max zero-time dev = {zdev:.3e}")


if __name__ == "__main__":
    main()
