"""Time the numba and numpy kernel implementations side by side.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from rieszprob import _kernels


def cases(rng: np.random.Generator):
    m = 200_000
    values = rng.normal(size=m)
    weights = rng.uniform(0.1, 2.0, size=m)
    block_of = rng.integers(0, 64, size=m)
    base = rng.uniform(0.0, 1.0, size=m)
    return {
        "block_average (m=2e5, 64 blocks)": ("block_average", (values, weights, block_of, 64)),
        "log_binomial_pmf (n=1e5)": ("log_binomial_pmf", (100_000, 0.3)),
        "log_binomial_pmf (n=1e3)": ("log_binomial_pmf", (1_000, 0.3)),
        "repeated_power (m=2e5, n=1024)": ("repeated_power", (base, 1024)),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    impls = {"numpy": _kernels.NUMPY_IMPL}
    if _kernels.HAVE_NUMBA:
        impls["numba"] = _kernels.NUMBA_IMPL
    else:
        print("numba not installed; timing the numpy fallback only")

    print(f"{'kernel':<34}" + "".join(f"{name:>14}" for name in impls) + f"{'speedup':>10}")
    for label, (kernel, argv) in cases(np.random.default_rng(0)).items():
        times = {}
        for name, table in impls.items():
            fn = table[kernel]
            fn(*argv)  # compile / warm caches
            times[name] = min(timeit.repeat(lambda: fn(*argv), number=1, repeat=args.repeat))
        row = f"{label:<34}" + "".join(f"{times[n] * 1e3:>12.3f}ms" for n in impls)
        if "numba" in times:
            row += f"{times['numpy'] / times['numba']:>9.2f}x"
        print(row)


if __name__ == "__main__":
    main()
