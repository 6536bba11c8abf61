"""Compare the compiled and numpy ANOVA kernels.

    python benchmarks/bench_kernels.py [--reps 1000] [--cell-n 50] [--repeat 5]

Reports kernel-only throughput on a stack of 2x3 datasets and the wall time
of a one-condition simulation with each backend.
"""

import argparse
import timeit

import numpy as np

from bicbf import kernels
from bicbf.sim import SimulationConfig, run_simulation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=1000)
    ap.add_argument("--cell-n", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = kernels.available_backends()
    stack = np.random.default_rng(0).standard_normal((args.reps, 2, 3, args.cell_n))
    print(f"backends: {', '.join(backends)} (active: {kernels.BACKEND})")

    ref = None
    for name, mod in backends.items():
        batch = min(timeit.repeat(lambda: mod.anova_ss_batch(stack), number=1, repeat=args.repeat))
        loop = min(timeit.repeat(lambda: [mod.anova_ss(y) for y in stack], number=1, repeat=args.repeat))
        out = mod.anova_ss_batch(stack)
        diff = 0.0 if ref is None else float(np.max(np.abs(out - ref) / np.abs(ref)))
        ref = out if ref is None else ref
        print(f"{name:>7}: batch {batch * 1e3:8.2f} ms   per-dataset loop {loop * 1e3:8.2f} ms"
              f"   ({args.reps} datasets, max rel diff {diff:.1e})")

    config = SimulationConfig(cell_sizes=(args.cell_n,), effect_variances=(0.2,), replications=args.reps)
    for name, mod in backends.items():
        t = min(timeit.repeat(lambda: run_simulation(config, backend=mod), number=1, repeat=3))
        print(f"{name:>7}: run_simulation {t * 1e3:8.1f} ms")


if __name__ == "__main__":
    main()
