"""Benchmark the trajectory kernel: numba @njit vs. the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--trajectories N] [--steps K]

Runs the same state-count simulation on both backends (selection via the
LEAKRISK_NO_NUMBA env flag, checked per call), verifies the counts are
bit-identical, and reports best-of-N wall times.  The numba path is warmed
once before timing so JIT compilation is not billed to the kernel.
"""

import argparse
import os
import time

import numpy as np

from leakrisk._kernels import simulate_state_counts, use_numba
from leakrisk.evolution import transition_matrix_for_level
from leakrisk.scenarios import load_builtin


def run_all_levels(bundle, belief, steps, n_traj, seed):
    return [
        simulate_state_counts(
            transition_matrix_for_level(bundle.transitions, level).matrix,
            belief,
            steps,
            n_traj,
            seed,
        )
        for level in range(len(bundle.transitions.levels))
    ]


def best_time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trajectories", type=int, default=200_000)
    parser.add_argument("--steps", type=int, default=24)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    bundle = load_builtin()
    belief = np.array([0.94, 0.04, 0.02, 0.0])
    levels = len(bundle.transitions.levels)
    work = levels * args.trajectories * args.steps

    results = {}
    counts = {}
    for backend, flag in (("numba", "0"), ("numpy", "1")):
        os.environ["LEAKRISK_NO_NUMBA"] = flag
        if backend == "numba" and not use_numba():
            print("numba not importable; skipping the jit backend")
            continue
        fn = lambda: run_all_levels(bundle, belief, args.steps, args.trajectories, args.seed)
        counts[backend] = fn()  # warmup (and JIT compile on the numba path)
        results[backend] = best_time(fn, args.repeats)
    os.environ.pop("LEAKRISK_NO_NUMBA", None)

    if len(counts) == 2:
        for a, b in zip(counts["numba"], counts["numpy"]):
            assert (a == b).all(), "backends disagree; counts must be bit-identical"
        print(f"counts bit-identical across backends ({levels} levels)\n")

    print(f"{levels} levels x {args.trajectories} trajectories x {args.steps} steps")
    for backend, seconds in results.items():
        rate = work / seconds / 1e6
        print(f"  {backend:6s} {seconds * 1e3:9.1f} ms   {rate:8.1f} M transitions/s")
    if len(results) == 2:
        print(f"  speedup {results['numpy'] / results['numba']:.1f}x")


if __name__ == "__main__":
    main()
