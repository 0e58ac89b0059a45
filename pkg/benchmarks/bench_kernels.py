"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one row per (kernel, size) with the best-of-``repeat`` time per call
for each available backend and the speed-up.
"""

import argparse
import timeit

import numpy as np

from aimkp import _core
from aimkp.triples import make_rng


def cases(rng):
    for n in (3, 6, 10, 20):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        yield "lu_det", n, lambda mod, a=a: mod.lu_det(a)
    for n in (4, 8):
        stack = rng.standard_normal((1000, n, n)) + 1j * rng.standard_normal((1000, n, n))
        yield "det_batch[1000]", n, lambda mod, s=stack: mod.det_batch(s)
    for n in (8, 14, 20):
        w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        pair = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        yield "subset_sum", n, lambda mod, w=w, p=pair: mod.subset_sum(w, p)


def best_time(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    mods = _core.backends()
    names = sorted(mods)
    print(f"selected backend: {_core.BACKEND}")
    header = f"{'kernel':<16}{'n':>4}" + "".join(f"{name + ' (s)':>16}" for name in names)
    if len(names) == 2:
        header += f"{'speed-up':>10}"
    print(header)
    for kernel, n, fn in cases(make_rng(0)):
        times = {name: best_time(lambda: fn(mods[name]), args.repeat) for name in names}
        row = f"{kernel:<16}{n:>4}" + "".join(f"{times[name]:>16.3e}" for name in names)
        if len(names) == 2:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
