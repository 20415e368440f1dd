"""Compare the compiled and numpy kernel backends.

Times each hot kernel on Example-1-sized inputs (145 panels x 33 samples,
series order 6) and the end-to-end FD solve, once per available backend.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from fdmethod import kernels
from fdmethod.fdcore import fd_solve
from fdmethod.problemfile import load_problem

K, BATCH = 6, 145 * 33


def cases(rng):
    a = np.ascontiguousarray(rng.uniform(-1, 1, (K + 1, BATCH)))
    b = np.ascontiguousarray(rng.uniform(-1, 1, (K + 1, BATCH)))
    b[0] += 3.0
    pos = a.copy()
    pos[0] = np.abs(pos[0]) + 1.0
    rows = np.ascontiguousarray(rng.uniform(-1, 1, (145, 33)))
    pf = load_problem("example1")
    return {
        "series_mul": lambda: kernels.series_mul(a, b),
        "series_div": lambda: kernels.series_div(a, b, a[0] / b[0]),
        "series_exp": lambda: kernels.series_exp(a, np.exp(a[0])),
        "series_log": lambda: kernels.series_log(pos, np.log(pos[0])),
        "series_sincos": lambda: kernels.series_sincos(a, np.sin(a[0]), np.cos(a[0])),
        "series_sqrt": lambda: kernels.series_sqrt(pos, np.sqrt(pos[0])),
        "series_compose": lambda: kernels.series_compose(a, b, K),
        "cumulative_simpson": lambda: kernels.cumulative_simpson(rows, 0.01),
        "fd_solve example1 m=3": lambda: fd_solve(pf.problem, pf.grid, 3, pf.quadrature),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.available_backends()
    previous = kernels.BACKEND
    timings = {}
    for name in backends:
        kernels.set_backend(name)
        for label, fn in cases(np.random.default_rng(0)).items():
            number = 3 if label.startswith("fd_solve") else 20
            best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            timings.setdefault(label, {})[name] = best
    kernels.set_backend(previous)

    head = f"{'kernel':<24}" + "".join(f"{b + ' [ms]':>16}" for b in backends)
    if len(backends) == 2:
        head += f"{'speedup':>10}"
    print(head)
    for label, t in timings.items():
        line = f"{label:<24}" + "".join(f"{1e3 * t[b]:>16.3f}" for b in backends)
        if len(backends) == 2:
            line += f"{t['python'] / t['cython']:>9.1f}x"
        print(line)
    if len(backends) == 1:
        print("compiled kernels not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
