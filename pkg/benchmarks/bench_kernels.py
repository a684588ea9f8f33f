"""Compare the compiled and pure-Python kernel backends.

Run with ``python benchmarks/bench_kernels.py``. Reports the cost of one
objective evaluation per search space and the wall time of a full
multi-start generalized optimization under each backend.
"""

import argparse
import math
import time

import numpy as np

from povminfo import kernels
from povminfo.optimize import OptimizerConfig, optimize_generalized
from povminfo.states import make_state_pair


def time_objective(mod, kind, dim, n, repeats):
    rng = np.random.default_rng(0)
    points = [rng.normal(size=dim).tolist() for _ in range(repeats)]
    consts = (0.8, 0.5, n, 0.05)
    t0 = time.perf_counter()
    for x in points:
        mod.objective(kind, x, consts)
    return (time.perf_counter() - t0) / repeats


def time_optimize(name, restarts):
    pair = make_state_pair(math.pi / 4, 0.5)
    config = OptimizerConfig(restarts=restarts, seed=1)
    with kernels.use_backend(name):
        t0 = time.perf_counter()
        res = optimize_generalized(pair, 3, config)
        return time.perf_counter() - t0, res.chi_opt


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20000)
    parser.add_argument("--restarts", type=int, default=4)
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the Python kernels are available")
    cases = [
        ("projective", kernels.KIND_PROJECTIVE, 1, 1),
        ("generalized n=3", kernels.KIND_GENERALIZED, 11, 3),
        ("matrix n=3", kernels.KIND_MATRIX, 12, 3),
    ]
    print(f"{'objective':<18}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for label, kind, dim, n in cases:
        times = {name: time_objective(mod, kind, dim, n, args.repeats) for name, mod in backends.items()}
        row = f"{label:<18}" + "".join(f"{t * 1e6:>11.2f} us" for t in times.values())
        if len(times) == 2:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)

    print()
    results = {name: time_optimize(name, args.restarts) for name in backends}
    for name, (secs, chi) in results.items():
        print(f"optimize_generalized n=3, {args.restarts} restarts [{name}]: {secs:.3f} s, chi_opt {chi:.12f}")
    if len(results) == 2:
        print(f"speedup {results['python'][0] / results['cython'][0]:.1f}x")


if __name__ == "__main__":
    main()
