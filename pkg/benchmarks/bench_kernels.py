"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-N wall time for each backend and
the speed-up, after checking that both backends return the same numbers.
"""
import argparse
import timeit

import numpy as np

from pdemlab import kernels
from pdemlab.model import NATURAL, ExpDecreasing, Grid, InfiniteBox
from pdemlab.quantum import geometric_tridiagonal


def cases():
    grid = Grid(-1.0, 1.0, 1001)
    diag, off = geometric_tridiagonal(ExpDecreasing(1.0), InfiniteBox(1.0), NATURAL, grid)
    chi0 = np.sin(np.pi * (grid.points[1:-1] + 1.0) / 2.0).astype(complex)
    xs = np.linspace(-20.0, 20.0, 2000)
    ks = np.linspace(0.0, 40.0, 2000)
    return {
        "cn_propagate (999 nodes, 200 steps)": lambda m: m.cn_propagate(diag, off, chi0, 5e-4, 200, grid.spacing),
        "hermite_scaled (n=150, 2000 x)": lambda m: m.hermite_scaled(150, xs),
        "kummer_terminating (n=40, 2000 x)": lambda m: m.kummer_terminating(40, 4.0, ks),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=1e-12)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing repeats; the best is reported")
    args = ap.parse_args(argv)

    found = kernels.backends()
    print(f"backends: {', '.join(sorted(found))} (active: {kernels.BACKEND})")
    for name, fn in cases().items():
        times = {}
        for label, mod in sorted(found.items()):
            times[label] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        line = f"{name:<40}" + "".join(f"  {k} {v * 1e3:9.2f} ms" for k, v in sorted(times.items()))
        if "cython" in found:
            if not same(fn(found["python"]), fn(found["cython"])):
                raise SystemExit(f"backends disagree on {name}")
            line += f"  speed-up {times['python'] / times['cython']:6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
