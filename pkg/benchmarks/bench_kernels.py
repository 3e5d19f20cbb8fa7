"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--threads K]

Prints one line per kernel: best-of-N wall time for each backend, the
speedup, and the largest difference between the two results.
"""
import argparse
import math
import time

import numpy as np

from zpc import _pykernels
from zpc._rscoef import psi_derivative_table, theta_coefficients

try:
    from zpc import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def best_of(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(threads):
    psi, tc = psi_derivative_table(), theta_coefficients()
    t = np.linspace(1e4, 1e4 + 2000, 20_000)
    rng = np.random.default_rng(0)
    g = np.sort(rng.uniform(10, 18_000, 20_000))
    w = np.ones_like(g)
    gi = np.sort(rng.uniform(10, 75_000, 100_000))
    mi = np.ones(gi.size, dtype=np.int_)
    delta = 2 * math.pi * 0.5 / math.log(75_000)
    return [
        ("rs_z_batch (20k heights near 1e4)",
         lambda k: k.rs_z_batch(t, psi, tc, threads)[0]),
        ("fejer_offdiag (20k ordinates)",
         lambda k: k.fejer_offdiag(g, w, math.log(18_000), threads)),
        ("window_pair_count (100k ordinates)",
         lambda k: k.window_pair_count(gi, mi, delta)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
    print(f"{'kernel':38s} {'python':>10s} {'cython':>10s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, run in cases(a.threads):
        tp, rp = best_of(lambda: run(_pykernels), a.repeat)
        if _ckernels is None:
            print(f"{name:38s} {tp:10.4f}")
            continue
        tc, rc = best_of(lambda: run(_ckernels), a.repeat)
        diff = float(np.max(np.abs(np.asarray(rp, dtype=float) - np.asarray(rc, dtype=float))))
        print(f"{name:38s} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x {diff:11.2e}")


if __name__ == "__main__":
    main()
