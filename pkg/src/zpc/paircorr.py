"""Pair statistics of zero ordinates.

Pairs are always *ordered* and multiplicity-expanded: a pair of records
(r, r') stands for m * m' pairs of zeros, and a record paired with itself
for m * m pairs.  Nothing here duplicates records to express multiplicity.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _backend
from .errors import DomainError, IncompleteWindow, SymmetryViolation
from .quadrature import gauss_kronrod, gauss_legendre_nodes
from .zero_store import BETA_TOL, ZeroSet

PCC_QUAD_TOL = 1e-10


class Window(str, Enum):
    ZERO_TO_T = "zero_to_T"
    T_TO_2T = "T_to_2T"

    @classmethod
    def parse(cls, value) -> "Window":
        aliases = {"0T": cls.ZERO_TO_T, "T2T": cls.T_TO_2T}
        if isinstance(value, cls):
            return value
        return aliases.get(value) or cls(value)

    def bounds(self, T: float) -> tuple[float, float]:
        return (0.0, T) if self is Window.ZERO_TO_T else (T, 2 * T)


def normalizer(T: float) -> float:
    """(T / 2 pi) log T."""
    return T / (2 * math.pi) * math.log(T)


def nt_formula(T: float) -> float:
    """Main terms (T/2pi) log(T/2pi) - T/2pi of the zero-counting function."""
    if T < 10:
        raise DomainError(f"nt_formula needs T >= 10, got {T}")
    x = T / (2 * math.pi)
    return x * math.log(x) - x


def average_spacing(T: float) -> float:
    if T < 10:
        raise DomainError(f"average_spacing needs T >= 10, got {T}")
    return 2 * math.pi / math.log(T)


def _window_arrays(zeros: ZeroSet, lo: float, hi: float):
    if not zeros.covers(lo, hi):
        raise IncompleteWindow(
            f"zero set over ({zeros.t_min}, {zeros.t_max}] (complete={zeros.complete}) "
            f"does not cover ({lo}, {hi}]")
    g = zeros.gammas
    sel = (g > lo) & (g <= hi)
    return g[sel], zeros.multiplicities[sel]


# ---------------------------------------------------------------- Fejer

def fejer_kernel(w):
    """(sin(w/2) / (w/2))^2, equal to 1 at w = 0."""
    w = np.asarray(w, dtype=float)
    half = 0.5 * w
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(np.abs(half) < 1e-8, 1.0, (np.sin(half) / half) ** 2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FejerSumResult:
    total: float
    diagonal: float
    off_diagonal: float
    normalizer: float
    ratio: float
    T: float
    window: Window

    def to_dict(self) -> dict:
        return {"total": self.total, "diagonal": self.diagonal, "off_diagonal": self.off_diagonal,
                "normalizer": self.normalizer, "ratio": self.ratio, "T": self.T,
                "window": self.window.value}


def fejer_double_sum(zeros: ZeroSet, T: float, window=Window.ZERO_TO_T, threads: int = 1) -> FejerSumResult:
    """Sum of m m' K((gamma - gamma') log T) over ordered pairs in the window.

    The diagonal (a record with itself) contributes m^2 each; pairs of
    distinct records at the same ordinate land in ``off_diagonal`` with
    kernel value 1.
    """
    if T < 10:
        raise DomainError("T must be >= 10")
    window = Window.parse(window)
    g, m = _window_arrays(zeros, *window.bounds(T))
    diag = float(np.sum(m.astype(float) ** 2))
    off = _backend.kernels.fejer_offdiag(np.ascontiguousarray(g), m.astype(float), math.log(T), threads)
    total = diag + off
    norm = normalizer(T)
    return FejerSumResult(total, diag, off, norm, total / norm, T, window)


@dataclass(frozen=True)
class IntegralFormResult:
    value: float
    error_estimate: float
    nodes: int


def _exp_sum_sq(alpha: np.ndarray, freq: np.ndarray, m: np.ndarray, chunk: int = 2048) -> np.ndarray:
    out = np.empty_like(alpha)
    for lo in range(0, alpha.size, chunk):
        a = alpha[lo:lo + chunk]
        s = np.exp(1j * a[:, None] * freq[None, :]) @ m
        out[lo:lo + chunk] = s.real ** 2 + s.imag ** 2
    return out


def fejer_integral_form(zeros: ZeroSet, T: float, quad_points: int = 64,
                        window=Window.ZERO_TO_T) -> IntegralFormResult:
    """2 int_0^1 |sum m T^(i alpha gamma)|^2 (1 - alpha) d alpha.

    Composite 16-point Gauss-Legendre with at least ``quad_points`` nodes and
    enough panels that each spans at most half a period of the fastest
    oscillation; the rule is rerun on twice the panels and the difference
    is reported as the error estimate.
    """
    if quad_points < 64:
        raise DomainError("quad_points must be >= 64")
    window = Window.parse(window)
    g, m = _window_arrays(zeros, *window.bounds(T))
    if g.size == 0:
        return IntegralFormResult(0.0, 0.0, 0)
    L = math.log(T)
    freq = g * L
    span = float(g.max() - g.min()) * L
    panels = max(quad_points // 16, int(math.ceil(span / math.pi)) + 1)
    mf = m.astype(complex)

    def rule(p):
        x, w = gauss_legendre_nodes(0.0, 1.0, p)
        f = _exp_sum_sq(x, freq - freq.mean(), mf) * (1 - x)
        return 2.0 * math.fsum(w * f)

    coarse = rule(panels)
    fine = rule(2 * panels)
    return IntegralFormResult(fine, abs(fine - coarse), 2 * panels * 16)


# ---------------------------------------------------------------- horizontal pairs

def _groups(zeros: ZeroSet):
    return itertools.groupby(zeros.records, key=lambda r: r.gamma)


def same_ordinate_pair_count(zeros: ZeroSet) -> int:
    """Ordered multiplicity-expanded pairs with gamma = gamma'."""
    return sum(sum(r.multiplicity for r in grp) ** 2 for _, grp in _groups(zeros))


def lower_bound_chain(zeros: ZeroSet) -> tuple[int, int, int]:
    """(same-ordinate pairs, sum of m over zeros with multiplicity, plain count).

    Each entry is >= the next for every set.
    """
    return (same_ordinate_pair_count(zeros),
            sum(r.multiplicity ** 2 for r in zeros.records),
            zeros.weighted_count())


@dataclass(frozen=True)
class PairDecomposition:
    lhs_bruteforce: int
    diag: int
    sym_diag: int
    nonsym_horiz: int
    T: float

    @property
    def balanced(self) -> bool:
        return self.lhs_bruteforce == self.diag + self.sym_diag + self.nonsym_horiz

    def to_dict(self) -> dict:
        return {"lhs_bruteforce": self.lhs_bruteforce, "diag": self.diag, "sym_diag": self.sym_diag,
                "nonsym_horiz": self.nonsym_horiz, "T": self.T, "balanced": self.balanced}


def check_symmetry(zeros: ZeroSet) -> None:
    """Every off-line record needs a (1 - beta, gamma, m) partner."""
    for gamma, grp in _groups(zeros):
        grp = list(grp)
        for r in grp:
            if r.on_line:
                continue
            if not any(abs(q.beta - (1 - r.beta)) <= BETA_TOL and q.multiplicity == r.multiplicity
                       for q in grp):
                raise SymmetryViolation(
                    f"record (beta={r.beta}, gamma={gamma}, m={r.multiplicity}) has no partner at beta={1 - r.beta}")


def _bruteforce_same_ordinate(zeros: ZeroSet, block: int = 2048) -> int:
    g = zeros.gammas
    m = zeros.multiplicities
    total = 0
    for i0 in range(0, g.size, block):
        eq = g[i0:i0 + block, None] == g[None, :]
        total += int(np.sum(m[i0:i0 + block, None] * m[None, :] * eq))
    return total


def decompose_horizontal_pairs(zeros: ZeroSet) -> PairDecomposition:
    """Split the same-ordinate pairs into diagonal, symmetric and the rest.

    ``diag`` counts rho = rho' (m^2 per record), ``sym_diag`` the pairs
    (rho, 1 - conj(rho)) with beta != 1/2, and ``nonsym_horiz`` every other
    pair of distinct zeros on a common horizontal line.  ``lhs_bruteforce``
    is an independent all-pairs count.
    """
    check_symmetry(zeros)
    diag = sym = nonsym = 0
    for _, grp in _groups(zeros):
        grp = list(grp)
        for r in grp:
            diag += r.multiplicity ** 2
            if not r.on_line:
                sym += r.multiplicity ** 2
        for r, q in itertools.permutations(grp, 2):
            if abs(r.beta + q.beta - 1) > BETA_TOL:
                nonsym += r.multiplicity * q.multiplicity
    T = max(zeros.gammas) if len(zeros) else 0.0
    return PairDecomposition(_bruteforce_same_ordinate(zeros), diag, sym, nonsym, float(T))


# ---------------------------------------------------------------- close pairs

def es_pair_count(zeros: ZeroSet, T: float, lam: float) -> tuple[int, float]:
    """Ordered pairs (gamma = gamma' included) with |gamma - gamma'| <= 2 pi lam / log T.

    Returns the count and count / ((T / 2 pi) log T).
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    g, m = _window_arrays(zeros, 0.0, T)
    delta = 2 * math.pi * lam / math.log(T)
    count = int(_backend.kernels.window_pair_count(np.ascontiguousarray(g), np.ascontiguousarray(m, dtype=np.int_), delta))
    return count, count / normalizer(T)


def es_pair_count_bruteforce(zeros: ZeroSet, T: float, lam: float, block: int = 1024) -> int:
    g, m = _window_arrays(zeros, 0.0, T)
    delta = 2 * math.pi * lam / math.log(T)
    total = 0
    for i0 in range(0, g.size, block):
        close = np.abs(g[i0:i0 + block, None] - g[None, :]) <= delta
        total += int(np.sum(m[i0:i0 + block, None] * m[None, :] * close))
    return total


def _one_sided_pairs(g: np.ndarray, delta: float):
    """Index pairs i < j with 0 < g_j - g_i <= delta (g sorted)."""
    hi = np.searchsorted(g, g + delta * (1 + 1e-12), side="right")
    counts = hi - np.arange(g.size) - 1
    i = np.repeat(np.arange(g.size), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    j = i + 1 + (np.arange(i.size) - starts)
    d = g[j] - g[i]
    keep = (d > 0) & (d <= delta)
    return i[keep], j[keep], d[keep]


# ---------------------------------------------------------------- PCC

def _pcc_integrand(u):
    u = np.asarray(u, dtype=float)
    x = np.pi * u
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(np.abs(x) < 1e-8, 1.0, np.sin(x) / x)
    return 1.0 - s * s


def pcc_density_integral(lam: float) -> float:
    """int_0^lam (1 - (sin pi u / pi u)^2) du by adaptive Gauss-Kronrod."""
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    if lam == 0:
        return 0.0
    pieces = np.linspace(0.0, lam, int(math.ceil(lam)) + 1)
    n = len(pieces) - 1
    return math.fsum(gauss_kronrod(_pcc_integrand, a, b, PCC_QUAD_TOL / n)[0]
                     for a, b in zip(pieces[:-1], pieces[1:]))


@dataclass(frozen=True)
class PccHistogram:
    bin_edges: list
    empirical: list
    predicted: list
    lambda_max: float
    T: float
    raw_counts: list

    @property
    def mean_abs_deviation(self) -> float:
        return float(np.mean(np.abs(np.array(self.empirical) - np.array(self.predicted))))

    def to_dict(self) -> dict:
        return {"bin_edges": self.bin_edges, "empirical": self.empirical, "predicted": self.predicted,
                "raw_counts": self.raw_counts, "lambda_max": self.lambda_max, "T": self.T,
                "mean_abs_deviation": self.mean_abs_deviation}


def pcc_histogram(zeros: ZeroSet, lambda_max: float, bins: int, T: float | None = None) -> PccHistogram:
    """Histogram of u = (gamma - gamma') log T / 2 pi over 0 < u <= lambda_max.

    Only pairs with gamma > gamma' are counted.  T defaults to the largest
    ordinate, with the window taken as (0, T].
    """
    if bins < 4:
        raise DomainError("bins must be >= 4")
    if not lambda_max > 0:
        raise DomainError("lambda_max must be positive")
    if T is None:
        if len(zeros) == 0:
            raise DomainError("T is required for an empty set")
        T = float(zeros.gammas.max())
    g, m = _window_arrays(zeros, 0.0, T)
    L = math.log(T)
    edges = np.linspace(0.0, lambda_max, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    if g.size:
        i, j, d = _one_sided_pairs(g, 2 * math.pi * lambda_max / L)
        u = d * L / (2 * math.pi)
        sel = (u > 0) & (u <= lambda_max)
        counts, _ = np.histogram(u[sel], bins=edges, weights=(m[i] * m[j])[sel])
        counts = np.rint(counts).astype(np.int64)
    norm = normalizer(T)
    cum = [pcc_density_integral(float(e)) for e in edges]
    predicted = [cum[k + 1] - cum[k] for k in range(bins)]
    return PccHistogram(edges.tolist(), (counts / norm).tolist(), predicted, float(lambda_max), float(T),
                        counts.tolist())
