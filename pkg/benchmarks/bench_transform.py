"""Time the numba and numpy transform backends on the same inputs.

    python3 benchmarks/bench_transform.py [--repeat 5]

Prints one row per (group, backend) with the best wall time in ms and the
max deviation between backends.
"""

import argparse
import time

import numpy as np

from twisted_lab import _kernels
from twisted_lab.group import GroupFunction, fourier_forward, make_group
from twisted_lab.sampling import complex_gaussian

CASES = {
    "Delta_10": [2] * 10,
    "Delta_16": [2] * 16,
    "Delta_20": [2] * 20,
    "Z_729": [729],
    "Z_4xZ_9xZ_5": [4, 9, 5],
    "Z_39367": [39367],
    "Z_2^8xZ_3^5": [2] * 8 + [3] * 5,
}


def best_time(fn, repeat):
    fn()  # warm caches and jit
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'group':<14}{'size':>9}{'numba ms':>11}{'numpy ms':>11}{'speedup':>9}{'max diff':>11}")
    for name, orders in CASES.items():
        g = make_group(orders)
        f = GroupFunction(g, complex_gaussian(rng, g.size))
        out, ms = {}, {}
        for backend in _kernels.BACKENDS:
            with _kernels.use_backend(backend):
                ms[backend] = 1e3 * best_time(lambda: fourier_forward(f), args.repeat)
                out[backend] = fourier_forward(f).values
        diff = float(np.max(np.abs(out["numba"] - out["numpy"])))
        print(f"{name:<14}{g.size:>9}{ms['numba']:>11.3f}{ms['numpy']:>11.3f}{ms['numpy'] / ms['numba']:>9.2f}{diff:>11.1e}")


if __name__ == "__main__":
    main()
