"""Compare the compiled kernels with the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Times the dense simplex on margin-LP sized problems, the sign tally on
Monte-Carlo sized batches, and one end-to-end cell enumeration per backend.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from quantcap import _kernels_py

try:
    from quantcap import _core
except ImportError:  # extension not built
    _core = None


def margin_lp(rng, k, m=2, nf=64):
    """LP shaped like the per-cell margin program: k hyperplanes, nf ball facets."""
    u = rng.standard_normal((k, m))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    s = rng.choice([-1.0, 1.0], k)
    d = rng.standard_normal(k)
    ang = 2 * np.pi * np.arange(nf) / nf
    F = np.column_stack([np.cos(ang), np.sin(ang)])
    A = np.zeros((k + nf, 2 * m + 1))
    A[:k, :m] = -(s[:, None] * u)
    A[:k, m:2 * m] = s[:, None] * u
    A[:k, -1] = 1
    A[k:, :m] = F
    A[k:, m:2 * m] = -F
    e0 = max(0.0, float((s * d).max())) + 1
    b = np.concatenate([e0 - s * d, np.full(nf, 5.0)])
    c = np.zeros(2 * m + 1)
    c[-1] = 1
    return A, b, c


def bench(impl, repeat):
    rng = np.random.default_rng(0)
    lps = [margin_lp(rng, int(k)) for k in rng.integers(2, 9, 200)]
    t_lp = min(timeit.repeat(lambda: [impl.simplex_max(*lp) for lp in lps], number=1,
                             repeat=repeat)) / len(lps)
    Z = rng.standard_normal((100_000, 3))
    V = rng.standard_normal((4, 3))
    off = rng.standard_normal(4)
    t_tally = min(timeit.repeat(lambda: impl.sign_tally(Z, V, off), number=1, repeat=repeat))
    return t_lp, t_tally


def end_to_end(pure):
    """Enumeration time in a fresh interpreter so the backend choice takes effect."""
    code = (
        "import time, numpy as np\n"
        "from quantcap.geometry import HyperplaneArrangement, enumerate_cells, vertex_radius\n"
        "from quantcap import kernels\n"
        "rng = np.random.default_rng(1)\n"
        "arrs = [HyperplaneArrangement(rng.standard_normal((8, 3)), rng.standard_normal(8))"
        " for _ in range(20)]\n"
        "t = time.perf_counter()\n"
        "for a in arrs: enumerate_cells(a, vertex_radius(a) + 1)\n"
        "print(kernels.BACKEND, time.perf_counter() - t)\n"
    )
    env = dict(os.environ, QUANTCAP_PURE="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    return out[0], float(out[1])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()

    impls = [("python", _kernels_py)] + ([("cython", _core)] if _core else [])
    print(f"{'backend':<8} {'simplex (us/LP)':>16} {'tally 1e5x4 (ms)':>18}")
    results = {}
    for name, impl in impls:
        t_lp, t_tally = bench(impl, args.repeat)
        results[name] = (t_lp, t_tally)
        print(f"{name:<8} {t_lp * 1e6:>16.1f} {t_tally * 1e3:>18.2f}")
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        print(f"speedup  {py[0] / cy[0]:>16.1f}x {py[1] / cy[1]:>17.1f}x")

    print("\nend-to-end: 20 enumerations, 8 planes in R^3")
    for pure in (True, False):
        backend, t = end_to_end(pure)
        print(f"{backend:<8} {t:>8.2f} s")


if __name__ == "__main__":
    main()
