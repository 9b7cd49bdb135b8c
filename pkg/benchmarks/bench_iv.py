"""Time the IV unit kernel with the compiled and pure-Python backends.

    python3 benchmarks/bench_iv.py [--reps 1000] [--n-units 10001] [--repeat 3]
"""
import argparse
import time

import numpy as np

from hsecant import backend
from hsecant.occurrences import IVScenario, iv_simulate
from hsecant.rng import RngStream


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=1000)
    ap.add_argument("--n-units", type=int, default=10_001)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    s = IVScenario(rho_yd=0.6, n_units=args.n_units)
    rng = RngStream(1, 0)
    units = args.reps * args.n_units
    results = {}
    for which in backend.available():
        results[which] = iv_simulate(s, rng, args.reps, kernel=which)
        sec = best_of(lambda: iv_simulate(s, rng, args.reps, kernel=which), args.repeat)
        print(f"{which:>9}: {sec:8.3f} s  {1e9 * sec / units:6.1f} ns/unit")
    if len(results) == 2:
        a, b = results["compiled"].beta_iv.values, results["python"].beta_iv.values
        print(f"max relative difference: {np.max(np.abs(a - b) / np.abs(b)):.2e}")
    else:
        print("compiled kernels not built; only the fallback was timed")


if __name__ == "__main__":
    main()
