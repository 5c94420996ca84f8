"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall times per kernel and checks that both backends agree.
"""
import argparse
import timeit

import numpy as np
from scipy.special import expit

from eraserlab import _kernels_py as py

try:
    from eraserlab import _kernels as cy
except ImportError:
    cy = None


def cases():
    rng = np.random.default_rng(0)
    e20 = np.concatenate([[0.0], np.sort(rng.uniform(0, 10, 20))])
    p20 = expit(-e20)
    e200 = np.concatenate([[0.0], np.geomspace(1e-3, 25, 200)])
    u = rng.random((100_000, e200.size))
    f = expit(-np.arange(2, 40) * 1.0)
    f = np.concatenate([[0.5], f])
    uf = rng.random((200_000, f.size))
    fl = expit(-np.arange(2, 3000) * 0.01)
    return [
        ("enumerate_paths (20 steps)", "enumerate_paths", (e20, p20)),
        ("sample_paths (1e5 x 200 steps)", "sample_paths", (e200, expit(-e200), u)),
        ("spinlabor_counts (2e5 x 39)", "spinlabor_counts", (f, uf)),
        ("bernoulli_pmf (3000 factors)", "bernoulli_pmf", (fl,)),
    ]


def _same(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.array_equal(x, y) for x, y in zip(a, b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if cy is None:
        print("compiled extension not built; only the fallback is available")
    print(f"{'kernel':34s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}  identical")
    for label, name, a in cases():
        t_py = min(timeit.repeat(lambda: getattr(py, name)(*a), number=1, repeat=args.repeat))
        if cy is None:
            print(f"{label:34s} {t_py:11.4f} {'-':>11s} {'-':>8s}")
            continue
        t_cy = min(timeit.repeat(lambda: getattr(cy, name)(*a), number=1, repeat=args.repeat))
        same = _same(getattr(py, name)(*a), getattr(cy, name)(*a))
        print(f"{label:34s} {t_py:11.4f} {t_cy:11.4f} {t_py / t_cy:8.1f}  {same}")


if __name__ == "__main__":
    main()
