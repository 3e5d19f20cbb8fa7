"""Numerical evaluation of zeta(s), chi(s), theta(t) and Z(t).

Every value comes with an absolute error bound.  Routing between methods:

* ``eta_series``: Borwein's accelerated alternating series for
  ``(1 - 2^(1-s)) zeta(s)`` with ``0 < sigma`` and small ``|t|``;
* ``euler_maclaurin``: summation with the classical remainder bound, used
  everywhere else in ``sigma >= 0``;
* ``riemann_siegel``: ``zeta(1/2 + it) = exp(-i theta(t)) Z(t)`` for large ``t``;
* ``functional_equation``: ``zeta(s) = chi(s) zeta(1 - s)`` for ``sigma < 0``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.special import digamma, loggamma

from . import _backend
from ._rscoef import bernoulli, psi_derivative_table, theta_coefficients
from .errors import DomainError, OverflowDomain, PoleAtOne, PrecisionUnreachable

EPS = 2.0 ** -52
# Above this height double precision no longer pins the phase of theta(t).
MAX_HEIGHT = 1.0e7
THETA_ASYMPTOTIC_MIN = 10.0
_SQRT8 = 3.0 + math.sqrt(8.0)


class Method(str, Enum):
    ETA_SERIES = "eta_series"
    EULER_MACLAURIN = "euler_maclaurin"
    RIEMANN_SIEGEL = "riemann_siegel"
    FUNCTIONAL_EQUATION = "functional_equation"


@dataclass(frozen=True)
class ComplexPoint:
    """The point s = sigma + i t."""

    sigma: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise DomainError(f"non-finite point {self.sigma} + {self.t}i")

    @classmethod
    def of(cls, s) -> "ComplexPoint":
        if isinstance(s, ComplexPoint):
            return s
        s = complex(s)
        return cls(s.real, s.imag)

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    abs_error_bound: float
    method: Method


@dataclass(frozen=True)
class Routing:
    """Method thresholds (in |t|)."""

    eta_max_t: float = 10.0
    em_max_t: float = 30.0
    rs_min_t: float = 30.0
    target_floor: float = 1e-15


DEFAULT_ROUTING = Routing()


# ---------------------------------------------------------------- chi(s)

def _log_sin(z: complex) -> complex:
    """log sin(z) modulo 2 pi i, stable for large |Im z|."""
    if z.imag >= 0:
        return -1j * z + cmath.log((cmath.exp(2j * z) - 1) / 2j)
    return 1j * z + cmath.log((1 - cmath.exp(-2j * z)) / 2j)


def _log_chi(s: complex) -> tuple[complex, float]:
    """log chi(s) and an absolute error estimate for it."""
    if abs(s.imag) > MAX_HEIGHT:
        raise OverflowDomain(f"|t| = {abs(s.imag):g} beyond the log-space safe range")
    lg = complex(loggamma(1 - s))
    parts = (s * math.log(2), (s - 1) * math.log(math.pi), _log_sin(math.pi * s / 2), lg)
    err = 16 * EPS * (sum(abs(p) for p in parts) + 1.0)
    return sum(parts), err


def chi_with_bound(s) -> tuple[complex, float]:
    """chi(s) and an absolute error estimate."""
    s = ComplexPoint.of(s).s
    if s.imag == 0 and s.real >= 1 and s.real == int(s.real):
        k = int(s.real)
        if k % 2 == 1:
            raise DomainError(f"chi has a pole at s = {k}")
        # sin zero cancels the Gamma pole; use chi(s) chi(1-s) = 1
        v, e = chi_with_bound(1 - s)
        return 1.0 / v, e / abs(v) ** 2
    lc, lc_err = _log_chi(s)
    if lc.real > 700:
        raise OverflowDomain(f"|chi({s})| overflows")
    v = cmath.exp(lc)
    return v, 2 * lc_err * abs(v)


def chi_factor(s) -> complex:
    """chi(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s), computed in log space."""
    return chi_with_bound(s)[0]


# ---------------------------------------------------------------- theta(t)

def _theta_direct(t):
    t = np.asarray(t, dtype=float)
    return np.imag(loggamma(0.25 + 0.5j * t)) - 0.5 * t * math.log(math.pi)


def _theta_asymptotic(t):
    t = np.asarray(t, dtype=float)
    tc = theta_coefficients()
    k_terms = len(tc) - 1
    th = 0.5 * t * np.log(t / (2 * math.pi)) - 0.5 * t - math.pi / 8
    tp = 1.0 / t
    for k in range(k_terms):
        th = th + tc[k] * tp
        tp = tp / (t * t)
    # Stirling remainder near the imaginary axis: at most 2^(K+1) x next term
    return th, tc[k_terms] * tp * 2.0 ** (k_terms + 1)


def theta_array(t) -> np.ndarray:
    """Vectorised theta(t) for t >= 0 (asymptotic above 10, log-Gamma below)."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    big = t >= THETA_ASYMPTOTIC_MIN
    if big.any():
        out[big] = _theta_asymptotic(t[big])[0]
    if (~big).any():
        out[~big] = _theta_direct(t[~big])
    return out


def theta_prime_array(t) -> np.ndarray:
    """theta'(t) = Re digamma(1/4 + i t / 2) / 2 - log(pi) / 2."""
    t = np.asarray(t, dtype=float)
    return 0.5 * np.real(digamma(0.25 + 0.5j * t)) - 0.5 * math.log(math.pi)


def rs_theta(t: float) -> float:
    """Riemann-Siegel theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi.

    For t >= 10 the asymptotic series is used; :func:`rs_theta_bound` gives
    its remainder.  Negative t uses oddness.
    """
    t = float(t)
    if not math.isfinite(t):
        raise DomainError("theta of a non-finite height")
    if t < 0:
        return -rs_theta(-t)
    return float(theta_array(t))


def rs_theta_bound(t: float) -> float:
    t = abs(float(t))
    if t < THETA_ASYMPTOTIC_MIN:
        return 64 * EPS * (abs(float(_theta_direct(t))) + 1)
    return float(_theta_asymptotic(t)[1]) + 8 * EPS * t * math.log(t)


# ---------------------------------------------------------------- zeta(s)

@lru_cache(maxsize=None)
def _bern_float() -> np.ndarray:
    return np.array([float(b) for b in bernoulli()])


def _borwein_bound(s: complex, n: int, denom: float, lg_sigma: float, lg_s_re: float) -> float:
    # |P_n(-1)| >= (3 + sqrt 8)^n / 2 and the integral is at most Gamma(sigma)
    return 2.0 * math.exp(lg_sigma - lg_s_re - n * math.log(_SQRT8)) / denom


def _zeta_eta(s: complex, target: float) -> EvalResult:
    sigma, t = s.real, s.imag
    factor = 1 - 2 ** (1 - s)
    denom = abs(factor)
    lg_sigma = math.lgamma(sigma)
    lg_s_re = float(np.real(loggamma(s)))
    n = 4
    while _borwein_bound(s, n, denom, lg_sigma, lg_s_re) > target / 2 and n < 400:
        n += 2
    trunc = _borwein_bound(s, n, denom, lg_sigma, lg_s_re)
    # d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    terms = np.empty(n + 1)
    terms[0] = 1.0 / n
    for i in range(1, n + 1):
        terms[i] = terms[i - 1] * 4.0 * (n + i - 1) * (n - i + 1) / ((2 * i) * (2 * i - 1))
    d = n * np.cumsum(terms)
    k = np.arange(n)
    logk = np.log(k + 1.0)
    weights = ((-1.0) ** k) * (d[:n] - d[n])
    powers = np.exp(-s * logk)
    total = complex(np.sum(weights * powers))
    value = -total / (d[n] * factor)
    rounding = 8 * EPS * float(np.sum(np.abs(weights) * np.exp(-sigma * logk) * (1 + abs(t) * logk))) / (d[n] * denom)
    return EvalResult(value, trunc + rounding + 4 * EPS * abs(value), Method.ETA_SERIES)


def _em_log_bound(s: complex, n_cut: int, p: int, log_abs_poch: float) -> float:
    """log of |s(s+1)...(s+2p+1) B_{2p+2} N^(-sigma-2p-1) / ((2p+2)! (sigma+2p+1))|.

    ``log_abs_poch`` covers the factors up to s + 2p.
    """
    sigma = s.real
    b = abs(_bern_float()[2 * p + 2])
    return (log_abs_poch + math.log(abs(s + 2 * p + 1)) + math.log(b) - math.lgamma(2 * p + 3)
            - (sigma + 2 * p + 1) * math.log(n_cut) - math.log(sigma + 2 * p + 1))


def _zeta_em(s: complex, target: float, max_terms: int = 2_000_000) -> EvalResult:
    sigma, t = s.real, s.imag
    if sigma <= -1:
        raise DomainError("Euler-Maclaurin path used only for sigma > -1")
    log_target = math.log(target / 2)
    n_cut = max(4, int(abs(s) / (2 * math.pi)) + 2)
    chosen = None
    while chosen is None:
        log_poch = 0.0
        for p in range(0, 60):
            # running log |s (s+1) ... (s+2p)|
            if p == 0:
                log_poch = math.log(abs(s)) if s != 0 else -math.inf
            else:
                log_poch += math.log(abs(s + 2 * p - 1)) + math.log(abs(s + 2 * p))
            if log_poch == -math.inf:
                chosen = (n_cut, 0, 0.0)
                break
            lb = _em_log_bound(s, n_cut, p, log_poch)
            if lb <= log_target:
                chosen = (n_cut, p, math.exp(lb))
                break
        if chosen is None:
            n_cut = int(n_cut * 1.5) + 1
            if n_cut > max_terms:
                raise PrecisionUnreachable(f"Euler-Maclaurin cannot reach {target:g} at s={s}")
    n_cut, p, trunc = chosen
    n = np.arange(1, n_cut, dtype=float)
    logn = np.log(n)
    head = np.exp(-s * logn)
    total = complex(np.sum(head.real), np.sum(head.imag))
    big_n = float(n_cut)
    ln_n = math.log(big_n)
    total += cmath.exp((1 - s) * ln_n) / (s - 1) + 0.5 * cmath.exp(-s * ln_n)
    bern = _bern_float()
    poch = s
    tail = 0j
    for k in range(1, p + 1):
        if k > 1:
            poch *= (s + 2 * k - 3) * (s + 2 * k - 2)
        tail += bern[2 * k] / math.factorial(2 * k) * poch * cmath.exp((1 - s - 2 * k) * ln_n)
    total += tail
    rounding = 8 * EPS * (float(np.sum(np.exp(-sigma * logn) * (1 + abs(t) * logn)))
                          + abs(total) + big_n ** (1 - sigma) / max(abs(s - 1), 1e-300))
    return EvalResult(total, trunc + rounding, Method.EULER_MACLAURIN)


def _zeta_rs(t: float) -> EvalResult:
    z, zerr = z_with_bound(t)
    th = rs_theta(t)
    value = z * cmath.exp(-1j * th)
    return EvalResult(value, zerr + abs(z) * rs_theta_bound(t), Method.RIEMANN_SIEGEL)


def _zeta_upper(s: complex, target: float, routing: Routing) -> EvalResult:
    """zeta(s) for sigma >= 0, t >= 0."""
    sigma, t = s.real, s.imag
    if sigma == 0.5 and t >= routing.rs_min_t:
        res = _zeta_rs(t)
        if res.abs_error_bound <= target or t > 1e6:
            return res
    if 0 < sigma and t < routing.eta_max_t and abs(1 - 2 ** (1 - s)) >= 0.1:
        return _zeta_eta(s, target)
    return _zeta_em(s, target)


def zeta_eval(s, target_abs_error: float = 1e-8, routing: Routing = DEFAULT_ROUTING) -> EvalResult:
    """zeta(s) with a forwarded absolute error bound.

    Raises :class:`PoleAtOne` at s = 1 and :class:`PrecisionUnreachable` when
    the bound of the routed method exceeds ``target_abs_error``.
    """
    if not target_abs_error > 0:
        raise DomainError("target_abs_error must be positive")
    p = ComplexPoint.of(s)
    s = p.s
    if s == 1:
        raise PoleAtOne("zeta has a simple pole at s = 1")
    if abs(p.t) > MAX_HEIGHT:
        raise PrecisionUnreachable(f"height {abs(p.t):g} exceeds {MAX_HEIGHT:g}")
    if p.t < 0:
        r = zeta_eval(s.conjugate(), target_abs_error, routing)
        return EvalResult(r.value.conjugate(), r.abs_error_bound, r.method)
    target = max(target_abs_error, routing.target_floor)
    if p.sigma < 0:
        if p.t == 0 and p.sigma == int(p.sigma) and int(p.sigma) % 2 == 0:
            return EvalResult(0j, 0.0, Method.FUNCTIONAL_EQUATION)
        lc, lc_err = _log_chi(s)
        if lc.real > 700:
            raise OverflowDomain(f"|chi({s})| overflows")
        chi = cmath.exp(lc)
        inner = _zeta_upper(1 - s, target / (2 * max(abs(chi), 1e-300)), routing)
        value = chi * inner.value
        err = abs(chi) * inner.abs_error_bound + abs(value) * 2 * lc_err
        res = EvalResult(value, err, Method.FUNCTIONAL_EQUATION)
    else:
        res = _zeta_upper(s, target, routing)
    if res.abs_error_bound > target_abs_error and res.abs_error_bound > routing.target_floor:
        raise PrecisionUnreachable(
            f"bound {res.abs_error_bound:.3g} from {res.method.value} exceeds target {target_abs_error:.3g} at s={s}")
    return res


# ---------------------------------------------------------------- Z(t)

def _z_direct(t: float) -> tuple[float, float]:
    """Z(t) from zeta(1/2 + it) for small heights."""
    r = zeta_eval(complex(0.5, t), 1e-12)
    th = rs_theta(t)
    z = cmath.exp(1j * th) * r.value
    return float(z.real), r.abs_error_bound + abs(r.value) * rs_theta_bound(t)


def z_batch(t, routing: Routing = DEFAULT_ROUTING, nthreads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Z at many heights: Riemann-Siegel kernel for t >= rs_min_t, zeta_eval below."""
    t = np.ascontiguousarray(t, dtype=float)
    if t.size and float(np.max(np.abs(t))) > MAX_HEIGHT:
        raise PrecisionUnreachable(f"heights above {MAX_HEIGHT:g} lose theta phase accuracy")
    z = np.empty_like(t)
    e = np.empty_like(t)
    hi = t >= routing.rs_min_t
    if hi.any():
        z[hi], e[hi] = _backend.kernels.rs_z_batch(
            np.ascontiguousarray(t[hi]), psi_derivative_table(), theta_coefficients(), nthreads)
    for i in np.flatnonzero(~hi):
        ti = float(t[i])
        zi, ei = _z_direct(abs(ti))
        z[i], e[i] = zi, ei  # Z is even
    return z, e


def z_with_bound(t: float) -> tuple[float, float]:
    t = float(t)
    if abs(t) > MAX_HEIGHT:
        raise PrecisionUnreachable(f"height {abs(t):g} exceeds {MAX_HEIGHT:g}")
    if abs(t) < DEFAULT_ROUTING.rs_min_t:
        return _z_direct(abs(t))
    z, e = _backend.kernels.rs_z_batch(
        np.array([abs(t)]), psi_derivative_table(), theta_coefficients(), 1)
    return float(z[0]), float(e[0])


def riemann_siegel_z(t: float) -> float:
    """Z(t) = exp(i theta(t)) zeta(1/2 + it), a real number.

    Uses the Riemann-Siegel main sum with corrections C0..C3 from t = 30 on
    (error envelope in :func:`z_with_bound`); below that, zeta_eval.
    """
    return z_with_bound(t)[0]
