"""Pure-Python (numpy) versions of the hot loops in ``_ckernels``.

Used when the extension is not built or when ``ZPC_BACKEND=python``.  Each
function returns the same quantities as its compiled twin, up to floating
point reduction order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._rscoef import RS_ENVELOPE

EPS = 2.0 ** -52
_CHUNK = 4096


def _theta(t, tc):
    k_terms = len(tc) - 1
    inv = 1.0 / t
    th = 0.5 * t * np.log(t / (2 * np.pi)) - 0.5 * t - np.pi / 8
    tp = inv.copy()
    for k in range(k_terms):
        th = th + tc[k] * tp
        tp = tp * inv * inv
    return th, tc[k_terms] * tp * 2.0 ** (k_terms + 1)


def _horner(row, x):
    s = np.zeros_like(x)
    for c in row[::-1]:
        s = s * x + c
    return s


def rs_z_batch(t, psi, theta_coef, nthreads=1):
    """Z(t) by the Riemann-Siegel formula with corrections C0..C3.

    Returns ``(z, err)`` where ``err`` combines the truncation envelope
    ``max(3|C4 term|, 0.031 t^-9/4)`` with a rounding estimate.
    """
    t = np.ascontiguousarray(t, dtype=float)
    z = np.empty_like(t)
    e = np.empty_like(t)
    if t.size == 0:
        return z, e
    nmax = int(math.floor(math.sqrt(t.max() / (2 * math.pi)))) + 2
    ns = np.arange(1, nmax + 1, dtype=float)
    logn = np.log(ns)
    rsqrt = 1.0 / np.sqrt(ns)
    pi2 = math.pi ** 2
    for lo in range(0, t.size, _CHUNK):
        tt = t[lo:lo + _CHUNK]
        th, th_err = _theta(tt, theta_coef)
        r = np.sqrt(tt / (2 * np.pi))
        big_n = np.floor(r).astype(np.int64)
        x = (r - big_n) - 0.5
        a = 1.0 / r
        ncap = int(big_n.max())
        main = np.zeros_like(tt)
        ssum = np.zeros_like(tt)
        for n0 in range(0, ncap, 128):
            cols = slice(n0, min(ncap, n0 + 128))
            active = big_n[:, None] > np.arange(cols.start, cols.stop)[None, :]
            ang = th[:, None] - tt[:, None] * logn[None, cols]
            main += np.sum(np.where(active, np.cos(ang) * rsqrt[None, cols], 0.0), axis=1)
            ssum += np.sum(np.where(active, rsqrt[None, cols], 0.0), axis=1)
        main *= 2.0
        ssum *= 2.0
        d = {k: _horner(psi[k], x) for k in (0, 1, 2, 3, 4, 5, 6, 8, 9, 12)}
        c1 = -d[3] / (96 * pi2)
        c2 = d[2] / (64 * pi2) + d[6] / (18432 * pi2 ** 2)
        c3 = -d[1] / (64 * pi2) - d[5] / (3840 * pi2 ** 2) - d[9] / (5308416 * pi2 ** 3)
        c4 = (d[0] / (128 * pi2) + 19 * d[4] / (24576 * pi2 ** 2)
              + 11 * d[8] / (5898240 * pi2 ** 3) + d[12] / (2038431744 * pi2 ** 4))
        scale = np.where((big_n - 1) % 2 == 1, -1.0, 1.0) / np.sqrt(r)
        corr = scale * (d[0] + a * (c1 + a * (c2 + a * c3)))
        trunc = np.maximum(3.0 * np.abs(scale * c4) * a ** 4, RS_ENVELOPE * tt ** -2.25)
        phase = np.abs(th) + tt * np.log(big_n) + 1.0
        z[lo:lo + _CHUNK] = main + corr
        e[lo:lo + _CHUNK] = trunc + (8 * EPS * phase + th_err) * ssum + 16 * EPS * np.abs(corr)
    return z, e


def _fejer_rows(g, m, half_l, i0, i1):
    d = (g[i0:i1, None] - g[None, i0:]) * half_l
    cols = np.arange(i0, g.size)[None, :]
    rows = np.arange(i0, i1)[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(np.abs(d) < 1e-8, 1.0, (np.sin(d) / d) ** 2)
    k = np.where(cols > rows, k, 0.0)
    return float(np.sum(m[i0:i1, None] * (k * m[None, i0:])))


def fejer_offdiag(g, m, log_t, nthreads=1, block=256):
    """Sum over ordered pairs i != j of m_i m_j K((g_i - g_j) log_t).

    Rows are cut into fixed blocks whose partial sums are combined with
    ``math.fsum``, so the result does not depend on ``nthreads``.
    """
    g = np.ascontiguousarray(g, dtype=float)
    m = np.ascontiguousarray(m, dtype=float)
    half_l = 0.5 * log_t
    starts = list(range(0, g.size, block))
    job = lambda i0: _fejer_rows(g, m, half_l, i0, min(g.size, i0 + block))  # noqa: E731
    if nthreads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            partial = list(ex.map(job, starts))
    else:
        partial = [job(i0) for i0 in starts]
    return 2.0 * math.fsum(partial)


def window_pair_count(g, m, delta):
    """Ordered pairs (with multiplicity, diagonal included) with |g_i - g_j| <= delta."""
    g = np.asarray(g, dtype=float)
    m = np.asarray(m, dtype=np.int64)
    n = g.size
    if n == 0:
        return 0
    hi = np.searchsorted(g, g + delta, side="right")
    # searchsorted compares g_j <= g_i + delta; the contract is g_j - g_i <= delta
    idx = np.arange(n)
    for _ in range(64):
        up = (hi < n) & (g[np.minimum(hi, n - 1)] - g <= delta)
        down = (hi > idx + 1) & (g[np.maximum(hi - 1, 0)] - g > delta)
        if not up.any() and not down.any():
            break
        hi = hi + up - down
    cum = np.concatenate(([0], np.cumsum(m)))
    cross = m * (cum[hi] - cum[idx + 1])
    return int(np.sum(m * m) + 2 * int(np.sum(cross)))
