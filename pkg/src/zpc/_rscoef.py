"""Coefficient tables shared by the compiled and pure-Python kernels.

Everything here is computed once and cached: Bernoulli numbers, the
Stirling-type coefficients of the theta asymptotic series, and the Taylor
coefficients (with derivatives) of the Riemann-Siegel function
``Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)`` about ``p = 1/2``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

# Number of asymptotic terms kept in theta(t); the next one bounds the tail.
THETA_TERMS = 5
# Taylor length for Psi about p = 1/2; |x| <= 1/2 and the series is entire.
PSI_TERMS = 64
# Highest Psi derivative needed (C4 uses the 12th).
PSI_MAX_DERIV = 12


@lru_cache(maxsize=None)
def bernoulli(n_max: int = 130) -> tuple[Fraction, ...]:
    """B_0 .. B_n_max with the B_1 = -1/2 convention."""
    b = [Fraction(0)] * (n_max + 1)
    b[0] = Fraction(1)
    for m in range(1, n_max + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * b[k]
        b[m] = -acc / (m + 1)
    return tuple(b)


@lru_cache(maxsize=None)
def theta_coefficients() -> np.ndarray:
    """c_k with theta(t) ~ main + sum_k c_k t^(1-2k), k = 1..THETA_TERMS+1.

    c_k = (1 - 2^(1-2k)) |B_2k| / (4k (2k-1)); the last entry is the first
    omitted term and is only used for the remainder bound.
    """
    b = bernoulli()
    out = []
    for k in range(1, THETA_TERMS + 2):
        c = (1 - Fraction(1, 2 ** (2 * k - 1))) * abs(b[2 * k]) / (4 * k * (2 * k - 1))
        out.append(float(c))
    return np.array(out)


@lru_cache(maxsize=None)
def psi_taylor() -> list:
    """Taylor coefficients of Psi(1/2 + x) in x, computed at 60 digits."""
    import mpmath as mp

    with mp.workdps(60):
        pi = mp.pi
        n = PSI_TERMS
        num = [mp.mpf(0)] * n
        den = [mp.mpf(0)] * n
        c5, s5 = mp.cos(5 * pi / 8), mp.sin(5 * pi / 8)
        # Psi(1/2 + x) = -cos(2 pi x^2 - 5 pi / 8) / cos(2 pi x)
        for k in range(n):
            if 4 * k < n:
                num[4 * k] += -c5 * (-1) ** k * (2 * pi) ** (2 * k) / mp.factorial(2 * k)
            if 4 * k + 2 < n:
                num[4 * k + 2] += -s5 * (-1) ** k * (2 * pi) ** (2 * k + 1) / mp.factorial(2 * k + 1)
            if 2 * k < n:
                den[2 * k] = (-1) ** k * (2 * pi) ** (2 * k) / mp.factorial(2 * k)
        q = []
        for j in range(n):
            v = num[j] - mp.fsum(den[i] * q[j - i] for i in range(1, j + 1))
            q.append(v / den[0])
        return q


@lru_cache(maxsize=None)
def psi_derivative_table() -> np.ndarray:
    """Row k holds the Taylor coefficients of the k-th derivative of Psi.

    Shape (PSI_MAX_DERIV + 1, PSI_TERMS); row k, column j multiplies x**j.
    """
    q = psi_taylor()
    n = len(q)
    table = np.zeros((PSI_MAX_DERIV + 1, n))
    for k in range(PSI_MAX_DERIV + 1):
        for j in range(n - k):
            table[k, j] = float(q[j + k] * math.perm(j + k, k))
    return table


# Classical envelope for the remainder after the C3 correction, in t^(-9/4).
RS_ENVELOPE = 0.031
