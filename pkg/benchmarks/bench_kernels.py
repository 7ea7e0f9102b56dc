"""Compare the compiled and numpy backends of the dyadic aggregation kernel.

Usage: python benchmarks/bench_kernels.py [--entries N] [--repeat R]
"""

import argparse
import time

import numpy as np

from carleson_ns import kernels
from carleson_ns.dyadic import CoefficientField, _root_arrays, hull_roots
from carleson_ns.meyer import WaveletIndex


def random_table(entries: int, seed: int) -> CoefficientField:
    rng = np.random.default_rng(seed)
    table = {}
    while len(table) < entries:
        j = int(rng.integers(0, 9))
        k = tuple(int(v) for v in rng.integers(0, 2**j, 2))
        table[WaveletIndex((1, 1), j, k)] = float(rng.normal())
    return CoefficientField(2, table)


def time_backend(backend, args, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = kernels.subcube_reduce(*args, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--entries", type=int, nargs="+", default=[500, 2000, 8000])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"default backend: {kernels.BACKEND}, threads: {kernels.worker_count()}")
    print(f"{'entries':>8} {'roots':>7} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for n_entries in args.entries:
        fld = random_table(n_entries, args.seed)
        roots = hull_roots(fld)
        j, k, a = fld.arrays()
        # gamma = -1, q = 2, n = 2: weight 2^{jq(gamma + n/2 - n/q)} |a|^q = 2^{-2j} a^2
        w = 2.0 ** (-2.0 * j) * a**2
        rj, rk = _root_arrays(roots, 2)
        call = (j, k, w, rj, rk)
        t_py, out_py = time_backend("python", call, args.repeat)
        if kernels.BACKEND == "compiled":
            t_c, out_c = time_backend("compiled", call, args.repeat)
            assert np.array_equal(out_py, out_c), "backends disagree"
            print(f"{n_entries:8d} {len(roots):7d} {t_py:10.4f} {t_c:11.4f} {t_py / t_c:7.1f}x")
        else:
            print(f"{n_entries:8d} {len(roots):7d} {t_py:10.4f} {'n/a':>11} {'n/a':>8}")


if __name__ == "__main__":
    main()
