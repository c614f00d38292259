"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5] [--n-times 2000]

Both paths are called directly, so the ZENO_LAB_DISABLE_NUMBA flag does not
matter here.  The first numba call (compilation, or a cache load) is excluded.
"""
import argparse
import time

import numpy as np

from zenolab import kernels, model, spectral, evolution


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def max_diff(a, b):
    if isinstance(a, tuple):
        return max(max_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n-lambda", type=int, default=2000)
    ap.add_argument("--n-times", type=int, default=2000)
    ap.add_argument("--t-max", type=float, default=150.0)
    args = ap.parse_args(argv)

    p = model.ModelParams.reference()
    edges, xg, wg, sigma, mu, w0, wmax = model._kernel_args(p)
    lams = np.linspace(0.01, 9.9, args.n_lambda)
    energies, weights = evolution.spectral_weights(p, "A", args.t_max)
    times = np.linspace(0.0, args.t_max, args.n_times)
    offsets = energies - np.dot(weights, energies) / weights.sum()

    cases = [
        ("hilbert", f"{args.n_lambda} lambdas x {len(edges) - 1} panels",
         lambda: kernels.hilbert_numba(lams, edges, xg, wg, sigma, mu, w0, wmax),
         lambda: kernels.hilbert_numpy(lams, edges, xg, wg, sigma, mu, w0, wmax)),
        ("resolvent_sq", f"{args.n_lambda} lambdas below threshold",
         lambda: kernels.resolvent_sq_numba(-lams, edges, xg, wg, sigma, mu, w0, wmax),
         lambda: kernels.resolvent_sq_numpy(-lams, edges, xg, wg, sigma, mu, w0, wmax)),
        ("phase_sums", f"{args.n_times} times x {len(offsets)} nodes",
         lambda: kernels.phase_sums_numba(times, offsets, weights),
         lambda: kernels.phase_sums_numpy(times, offsets, weights)),
    ]

    print(f"{'kernel':<14}{'size':<34}{'numba [s]':>11}{'numpy [s]':>11}{'speedup':>9}{'max|diff|':>11}")
    for name, size, fast, slow in cases:
        fast()  # compile / load cache
        tf, a = best_of(fast, args.repeat)
        ts, b = best_of(slow, args.repeat)
        print(f"{name:<14}{size:<34}{tf:>11.4f}{ts:>11.4f}{ts / tf:>9.1f}{max_diff(a, b):>11.1e}")

    spectral.density_grid.cache_clear()
    t0 = time.perf_counter()
    spectral.density_grid(p)
    print(f"\ndensity grid build (active path, numba={kernels.USE_NUMBA}): {time.perf_counter() - t0:.3f} s")


if __name__ == "__main__":
    main()
