"""Locate zeros of Z(t) by sign changes seeded on Gram points and certify
the count against the theta-based counting formula.

Gram point g_n solves theta(g_n) = n pi; it is *good* when (-1)^n Z(g_n) > 0.
Between consecutive good Gram points g_j < g_k there should be exactly
k - j zeros; a shortfall triggers step halving before the scan gives up.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import lambertw

from .errors import CertificationFailed, DomainError
from .zero_store import CountCertificate, Source, ZeroRecord, ZeroSet
from .zeta_eval import theta_array, theta_prime_array, z_batch

log = logging.getLogger(__name__)

# theta(t) is increasing for t > ~6.29; g_{-1} ~ 9.667 is the first Gram
# point on that branch.
FIRST_GRAM_INDEX = -1
MIN_STEP_FRACTION = 1.0 / 64.0


@dataclass(frozen=True)
class ScanConfig:
    t_min: float
    t_max: float
    initial_step: Optional[float] = None  # default: quarter of 2 pi / log t
    refine_tol: float = 1e-9
    max_bisections: int = 200
    threads: int = 1

    def __post_init__(self):
        if not self.t_min >= 10:
            raise DomainError(f"t_min must be >= 10, got {self.t_min}")
        if not self.t_min < self.t_max:
            raise DomainError("t_min must be below t_max")
        if self.initial_step is not None and not self.initial_step > 0:
            raise DomainError("initial_step must be positive")
        if not self.refine_tol > 0:
            raise DomainError("refine_tol must be positive")


def average_spacing_at(t):
    return 2 * np.pi / np.log(t)


# ---------------------------------------------------------------- Gram points

def gram_point(n) -> np.ndarray:
    """g_n for integer n >= -1 (vectorised), Newton on theta from a Lambert-W guess."""
    n = np.atleast_1d(np.asarray(n, dtype=float))
    if (n < FIRST_GRAM_INDEX).any():
        raise DomainError("Gram points are indexed from -1")
    # theta(t) ~ (t/2) log(t / 2 pi e) - pi/8  =>  t = 2 pi e^(1 + W((8n+1)/(8e)))
    t = 2 * np.pi * np.exp(1 + np.real(lambertw((8 * n + 1) / (8 * np.e))))
    t = np.maximum(t, 7.0)
    for _ in range(50):
        step = (theta_array(t) - n * np.pi) / theta_prime_array(t)
        t = t - step
        if np.all(np.abs(step) <= 1e-13 * np.maximum(t, 1.0)):
            break
    return t


def gram_points(t_min: float, t_max: float) -> np.ndarray:
    """All Gram points in [t_min, t_max], strictly increasing."""
    if t_min < 10:
        raise DomainError(f"gram_points needs t_min >= 10, got {t_min}")
    if t_max < t_min:
        return np.empty(0)
    n_lo = math.ceil(float(theta_array(t_min)) / math.pi - 1e-12)
    n_hi = math.floor(float(theta_array(t_max)) / math.pi + 1e-12)
    if n_hi < n_lo:
        return np.empty(0)
    g = gram_point(np.arange(n_lo, n_hi + 1))
    return g[(g >= t_min) & (g <= t_max)]


def _gram_index_floor(t: float) -> int:
    """Largest n >= -1 with g_n <= t (or -2 when t < g_{-1})."""
    if t < float(gram_point(-1)[0]):
        return FIRST_GRAM_INDEX - 1
    n = math.floor(float(theta_array(t)) / math.pi)
    while n >= FIRST_GRAM_INDEX and float(gram_point(n)[0]) > t:
        n -= 1
    while float(gram_point(n + 1)[0]) <= t:
        n += 1
    return max(n, FIRST_GRAM_INDEX)


def _is_good(n: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.where(n % 2 == 0, z > 0, z < 0)


def _good_gram_search(n_start: int, direction: int, nthreads: int, limit: Optional[int] = None):
    """First good Gram index from n_start moving in ``direction`` (+1 / -1)."""
    n = n_start
    while True:
        batch = np.arange(n, n + 16 * direction, direction)
        batch = batch[batch >= FIRST_GRAM_INDEX]
        if limit is not None:
            batch = batch[batch <= limit] if direction > 0 else batch[batch >= limit]
        if batch.size == 0:
            return None
        g = gram_point(batch)
        z, _ = z_batch(g, nthreads=nthreads)
        good = _is_good(batch, z)
        if good.any():
            i = int(np.argmax(good))
            return int(batch[i]), float(g[i])
        n = int(batch[-1]) + direction


# ---------------------------------------------------------------- scanning

def _sample_grid(edges: np.ndarray, step_of) -> tuple[np.ndarray, np.ndarray]:
    """Subdivide each [edges[i], edges[i+1]] into equal steps no longer than
    step_of(edges[i]).  Returns the grid and the grid index of every edge."""
    lengths = np.diff(edges)
    k = np.maximum(1, np.ceil(lengths / step_of(edges[:-1])).astype(np.int64))
    offsets = np.concatenate(([0], np.cumsum(k)))
    total = int(offsets[-1]) + 1
    interval = np.repeat(np.arange(k.size), k)
    local = np.arange(total - 1) - offsets[:-1][interval]
    grid = np.empty(total)
    grid[:-1] = edges[:-1][interval] + lengths[interval] * (local / k[interval])
    grid[-1] = edges[-1]
    grid[offsets] = edges
    return grid, offsets


def _brackets(grid: np.ndarray, z: np.ndarray):
    neg = z < 0
    change = np.flatnonzero(neg[:-1] != neg[1:])
    return change


def _scan_block(lo: float, hi: float, expected: int, base_step: float, nthreads: int):
    """Resample [lo, hi] with halving steps until ``expected`` sign changes."""
    step = base_step
    avg = float(average_spacing_at(lo))
    while True:
        step /= 2
        k = max(2, int(math.ceil((hi - lo) / step)))
        grid = np.linspace(lo, hi, k + 1)
        z, _ = z_batch(grid, nthreads=nthreads)
        idx = _brackets(grid, z)
        if idx.size >= expected or step <= avg * MIN_STEP_FRACTION:
            return grid, z, idx


def _bisect(lo: np.ndarray, hi: np.ndarray, zlo: np.ndarray, tol: float, max_iter: int, nthreads: int):
    lo, hi = lo.copy(), hi.copy()
    neg_lo = zlo < 0
    for _ in range(max_iter):
        open_ = (hi - lo) > tol
        if not open_.any():
            break
        idx = np.flatnonzero(open_)
        mid = 0.5 * (lo[idx] + hi[idx])
        zm, _ = z_batch(mid, nthreads=nthreads)
        same = (zm < 0) == neg_lo[idx]
        lo[idx] = np.where(same, mid, lo[idx])
        hi[idx] = np.where(same, hi[idx], mid)
    return lo, hi


def scan_zeros(config: ScanConfig) -> ZeroSet:
    """All sign changes of Z in (t_min, t_max], refined by bisection.

    Records get beta = 1/2 and multiplicity 1.  Raises
    :class:`CertificationFailed` when a Gram block keeps a deficit after
    the step has been halved down to 1/64 of the average spacing.
    """
    a, b = float(config.t_min), float(config.t_max)
    nt = config.threads
    n_a = _gram_index_floor(a)
    lo_anchor = _good_gram_search(n_a, -1, nt)
    if lo_anchor is None:
        lo_anchor = (FIRST_GRAM_INDEX, float(gram_point(FIRST_GRAM_INDEX)[0]))
    hi_anchor = _good_gram_search(_gram_index_floor(b) + 1, +1, nt)
    idx = np.arange(lo_anchor[0], hi_anchor[0] + 1)
    gram = gram_point(idx)

    if config.initial_step is not None:
        step_of = lambda t: np.full(np.shape(t), config.initial_step)  # noqa: E731
    else:
        step_of = lambda t: 0.25 * average_spacing_at(t)  # noqa: E731
    grid, at_gram = _sample_grid(gram, step_of)
    z, _ = z_batch(grid, nthreads=nt)

    good = _is_good(idx, z[at_gram])
    good[0] = good[-1] = True  # anchors were chosen good
    anchor_pos = np.flatnonzero(good)

    changes = _brackets(grid, z)
    br_lo, br_hi, br_zlo = [grid[changes]], [grid[changes + 1]], [z[changes]]
    found_per = np.diff(np.searchsorted(changes, at_gram[anchor_pos]))
    expected_per = np.diff(idx[anchor_pos])
    bad = np.flatnonzero(found_per != expected_per)
    if bad.size:
        # drop the coarse brackets of failing blocks, redo them finer
        keep = np.ones(changes.size, dtype=bool)
        for j in bad:
            g0 = at_gram[anchor_pos[j]]
            g1 = at_gram[anchor_pos[j + 1]]
            keep &= ~((changes >= g0) & (changes < g1))
        br_lo, br_hi, br_zlo = [br_lo[0][keep]], [br_hi[0][keep]], [br_zlo[0][keep]]
        for j in bad:
            lo_t = gram[anchor_pos[j]]
            hi_t = gram[anchor_pos[j + 1]]
            expected = int(expected_per[j])
            sub, zs, ch = _scan_block(lo_t, hi_t, expected, float(step_of(np.array([lo_t]))[0]), nt)
            log.info("Gram block (%.6f, %.6f]: %d -> %d sign changes after refinement (expected %d)",
                     lo_t, hi_t, int(found_per[j]), ch.size, expected)
            if ch.size != expected:
                raise CertificationFailed(
                    f"Gram block ({lo_t:.9f}, {hi_t:.9f}] has {ch.size} sign changes, expected {expected}",
                    window=(lo_t, hi_t))
            br_lo.append(sub[ch])
            br_hi.append(sub[ch + 1])
            br_zlo.append(zs[ch])
    lo = np.concatenate(br_lo)
    hi = np.concatenate(br_hi)
    zlo = np.concatenate(br_zlo)
    order = np.argsort(lo)
    lo, hi, zlo = lo[order], hi[order], zlo[order]

    lo, hi = _bisect(lo, hi, zlo, config.refine_tol, config.max_bisections, nt)
    # a window edge inside a bracket: the sign of Z there decides the side,
    # matching the parity rule the certificate uses
    for edge in (a, b):
        for i in np.flatnonzero((lo < edge) & (edge < hi)):
            z_edge = float(z_batch(np.array([edge]), nthreads=nt)[0][0])
            if (z_edge < 0) == (zlo[i] < 0):
                lo[i] = edge
            else:
                hi[i] = edge
    gamma = 0.5 * (lo + hi)
    inside = (gamma > a) & (gamma <= b)
    gamma, half = gamma[inside], 0.5 * (hi - lo)[inside]

    # convert the Z error bound into an ordinate error via the local slope
    h = np.maximum(1e-4 * average_spacing_at(np.maximum(gamma, 10.0)), 10 * config.refine_tol)
    zp, ep = z_batch(gamma + h, nthreads=nt)
    zm, em = z_batch(gamma - h, nthreads=nt)
    slope = np.abs(zp - zm) / (2 * h)
    zerr = np.maximum(ep, em)
    abs_err = half + np.where(slope > 0, zerr / np.maximum(slope, 1e-300), np.inf)

    recs = tuple(ZeroRecord(float(g), 0.5, 1, float(e), Source.COMPUTED) for g, e in zip(gamma, abs_err))
    provisional = ZeroSet(recs, a, b, f"computed by sign-change scan of ({a}, {b}]", False, None)
    cert = certify_count(provisional, (a, b), nthreads=nt)
    if not cert.certified:
        raise CertificationFailed(
            f"count not certified on ({a}, {b}]: found {cert.found}, expected {cert.formula_count}",
            window=(a, b))
    return ZeroSet(recs, a, b, provisional.metadata, True, cert)


# ---------------------------------------------------------------- certification

def n_theta(t: float) -> float:
    """Smooth count theta(t)/pi + 1 (0 below the first Gram point)."""
    if t < float(gram_point(FIRST_GRAM_INDEX)[0]):
        return 0.0
    return float(theta_array(t)) / math.pi + 1.0


def _parity_expected(found: int, z_left: float, z_right: float) -> int:
    """Smallest count >= found whose parity matches the sign change of Z."""
    odd = (z_left < 0) != (z_right < 0)
    return found if (found % 2 == 1) == odd else found + 1


def certify_count(zeros: ZeroSet, window=None, nthreads: int = 1) -> CountCertificate:
    """Compare the zeros found in (a, b] with the Gram/theta expectation.

    Between the first good Gram point g_j >= a and the last good g_k <= b
    the expected count is k - j.  On each edge piece the expected count is
    the found count, raised by one if its parity disagrees with the signs of
    Z at the piece's ends.  ``certified`` holds iff nothing is missing or
    extra, i.e. ``|found - formula_count| < 1``.
    """
    a, b = window if window is not None else (zeros.t_min, zeros.t_max)
    a, b = float(a), float(b)
    g = zeros.gammas
    m = zeros.multiplicities
    inwin = (g > a) & (g <= b)
    found = int(m[inwin].sum())

    def count_in(lo, hi):
        sel = (g > lo) & (g <= hi)
        return int(m[sel].sum())

    def z_at(t):
        return float(z_batch(np.array([t]), nthreads=nthreads)[0][0])

    start = _gram_index_floor(a)
    if start < FIRST_GRAM_INDEX or float(gram_point(start)[0]) < a:
        start += 1
    start = max(start, FIRST_GRAM_INDEX)
    end = _gram_index_floor(b)
    lo_anchor = _good_gram_search(start, +1, nthreads, limit=end) if end >= start else None
    hi_anchor = _good_gram_search(end, -1, nthreads, limit=lo_anchor[0]) if lo_anchor else None

    za, zb = z_at(a), z_at(b)
    if lo_anchor is None:
        expected = _parity_expected(found, za, zb)
        anchors = None
    else:
        (j, gj), (k, gk) = lo_anchor, hi_anchor
        zj, zk = z_at(gj), z_at(gk)
        expected = (k - j)
        expected += _parity_expected(count_in(a, gj), za, zj)
        expected += _parity_expected(count_in(gk, b), zk, zb)
        anchors = (j, gj, k, gk)
    residual = found - expected
    return CountCertificate(
        window=(a, b),
        found=found,
        formula_count=float(expected),
        certified=abs(residual) < 1,
        residual=float(residual),
        theta_count=n_theta(b) - n_theta(a),
        anchors=anchors,
    )
