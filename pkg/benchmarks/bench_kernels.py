"""Compare the compiled kernel backend against the pure-Python fallback.

Runs identical Metropolis and walk workloads through both implementations,
checks that the trajectories match bit for bit, and reports steps/second.

Usage: python benchmarks/bench_kernels.py [--steps N]
"""

import argparse
import time

import numpy as np

from subcubes.energy import LandscapeParams, generate_landscape
from subcubes.instance import generate
from subcubes.kernels import _fallback

try:
    from subcubes.kernels import _core
except ImportError:
    _core = None


def bench_metropolis(impl, steps, masks, values, e0, n, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    var_choices = rng.integers(0, n, size=steps).astype(np.int64)
    u01 = rng.random(steps)
    out_energy = np.empty(steps, dtype=np.int64)
    out_state = np.empty(0, dtype=np.uint64)
    t0 = time.perf_counter()
    state, n_accept = impl.metropolis_chunk(0, masks, values, e0, 1.0,
                                            var_choices, u01,
                                            out_energy, out_state)
    dt = time.perf_counter() - t0
    return dt, (state, n_accept, out_energy.copy())


def bench_walk(impl, steps, masks, values, start, n, seed):
    rng = np.random.Generator(np.random.Philox(seed))
    var_choices = rng.integers(0, n, size=steps).astype(np.int64)
    out_state = np.empty(steps, dtype=np.uint64)
    t0 = time.perf_counter()
    state, n_accept = impl.walk_chunk(start, masks, values, var_choices,
                                      out_state)
    dt = time.perf_counter() - t0
    return dt, (state, n_accept, out_state.copy())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=200_000)
    args = ap.parse_args()

    n = 40
    params = LandscapeParams(a=-0.05, b=0.0, c=0.5, p=0.6)
    land = generate_landscape(params, n, seed=11)
    masks, values, e0 = land.arrays()
    print(f"landscape: n={n}, valleys={len(land.valleys)}")

    inst = generate(n=24, alpha=0.8, p=0.7, seed=12)
    imasks, ivalues = inst.mask_value_arrays()
    start = inst.clusters[0].frozen_values  # a solution by construction
    print(f"instance: n={inst.n}, M={inst.m}")

    backends = [("python", _fallback)]
    if _core is not None:
        backends.append(("cython", _core))
    else:
        print("compiled core not available; benchmarking fallback only")

    results = {}
    for name, impl in backends:
        dt, res = bench_metropolis(impl, args.steps, masks, values, e0, n, 5)
        results.setdefault("metropolis", []).append(res)
        print(f"metropolis {name:>7}: {args.steps / dt:12.0f} steps/s "
              f"({dt * 1e3:8.1f} ms)")
    for name, impl in backends:
        dt, res = bench_walk(impl, args.steps, imasks, ivalues, start,
                             inst.n, 6)
        results.setdefault("walk", []).append(res)
        print(f"walk       {name:>7}: {args.steps / dt:12.0f} steps/s "
              f"({dt * 1e3:8.1f} ms)")

    for kind, runs in results.items():
        if len(runs) == 2:
            (s1, a1, t1), (s2, a2, t2) = runs
            assert s1 == s2 and a1 == a2 and np.array_equal(t1, t2), \
                f"{kind}: backends disagree"
            print(f"{kind}: backends bit-identical")


if __name__ == "__main__":
    main()
