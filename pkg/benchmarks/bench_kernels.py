"""Time the numba kernels against their pure-numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call includes JIT compilation (or cache load) and is
reported separately.
"""

import argparse
import time

import numpy as np

from granular._kernels import numpy_impl

try:
    from granular._kernels import numba_impl
except ImportError:  # numba not installed
    numba_impl = None


def cases(rng):
    som_X = rng.uniform(size=(300, 14))
    som_W = rng.uniform(size=(20, 14))
    orders = np.stack([rng.permutation(300) for _ in range(100)]).astype(np.int64)
    alphas = np.linspace(0.5, 0.01, 100)
    radii = np.linspace(10.0, 0.0, 100)
    C = rng.integers(1, 4, size=(400, 13)).astype(np.int64)
    d = rng.integers(1, 4, size=400).astype(np.int64)
    clauses = np.unique(rng.integers(1, 1 << 16, size=60)).astype(np.int64)
    P = rng.uniform(size=(1500, 14))
    return {
        "som_train 300x14, 20 neurons, 100 epochs": (
            "som_train", lambda: (som_X, som_W.copy(), orders, alphas, radii)),
        "nearest 5000x14 vs 20": ("nearest", lambda: (rng.uniform(size=(5000, 14)), som_W)),
        "potentials 1500x14": ("potentials", lambda: (P, 16.0)),
        "discern_masks 400 objects x 13": ("discern_masks", lambda: (C, d)),
        "hitting_table 16 attributes": ("hitting_table", lambda: (clauses, 16)),
    }


def best_of(fn, make_args, repeat):
    times = []
    for _ in range(repeat):
        args = make_args()
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':44s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, (attr, make_args) in cases(rng).items():
        t_np = best_of(getattr(numpy_impl, attr), make_args, args.repeat)
        if numba_impl is None:
            print(f"{name:44s} {t_np * 1e3:10.2f} {'n/a':>10s}")
            continue
        fn = getattr(numba_impl, attr)
        t0 = time.perf_counter()
        fn(*make_args())
        warm = time.perf_counter() - t0
        t_nb = best_of(fn, make_args, args.repeat)
        print(f"{name:44s} {t_np * 1e3:10.2f} {t_nb * 1e3:10.2f} {t_np / t_nb:7.1f}x"
              f"   (first call {warm * 1e3:.0f} ms)")


if __name__ == "__main__":
    main()
