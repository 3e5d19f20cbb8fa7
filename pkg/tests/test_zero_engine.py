import math

import mpmath
import numpy as np
import pytest

from zpc import zero_engine
from zpc.errors import DomainError
from zpc.paircorr import nt_formula
from zpc.zero_engine import ScanConfig, certify_count, gram_point, gram_points, n_theta, scan_zeros
from zpc.zero_store import Source, ZeroSet
from zpc.zeta_eval import theta_array

mpmath.mp.dps = 25


def eta_z(t):
    """Z(t) through the alternating series, independent of the library."""
    s = mpmath.mpc(0.5, t)
    zeta = mpmath.altzeta(s) / (1 - mpmath.power(2, 1 - s))
    return float(mpmath.re(mpmath.expj(mpmath.siegeltheta(t)) * zeta))


def bisect(f, a, b, tol=1e-11):
    fa = f(a)
    while b - a > tol:
        c = 0.5 * (a + b)
        fc = f(c)
        if (fc < 0) == (fa < 0):
            a, fa = c, fc
        else:
            b = c
    return 0.5 * (a + b)


def test_first_zero_against_eta_oracle():
    zs = scan_zeros(ScanConfig(10.0, 15.0))
    assert len(zs) == 1
    ref = bisect(eta_z, 14.0, 14.3)
    assert abs(zs.records[0].gamma - ref) < 1e-9
    assert zs.records[0].abs_error < 1e-8


def test_below_first_zero():
    zs = scan_zeros(ScanConfig(10.0, 10.5))
    assert len(zs) == 0 and zs.certificate.certified


def test_first_29(computed_100):
    zs = computed_100
    assert len(zs) == 29
    assert zs.certificate.certified
    assert zs.complete
    assert all(r.source is Source.COMPUTED and r.on_line and r.multiplicity == 1 for r in zs)
    assert round(n_theta(100.0)) == 29


def test_fine_grid_rescan(computed_100):
    grid = np.arange(10.0, 100.0, 0.02)
    z = np.array([float(mpmath.siegelz(t)) for t in grid])
    changes = int(np.sum(np.signbit(z[1:]) != np.signbit(z[:-1])))
    assert changes == 29
    idx = np.flatnonzero(np.signbit(z[1:]) != np.signbit(z[:-1]))
    for i, r in zip(idx, computed_100):
        assert grid[i] < r.gamma <= grid[i + 1]


def test_gram_points_defining_equation():
    g = gram_points(10.0, 2000.0)
    n = np.arange(len(g)) + zero_engine._gram_index_floor(10.0) + 1
    assert np.all(np.abs(theta_array(g) / math.pi - n) < 1e-9)
    assert np.all(np.diff(g) > 0)


def test_first_gram_point():
    assert float(gram_point(0)[0]) == pytest.approx(17.8455995404, abs=1e-9)
    assert float(gram_point(-1)[0]) == pytest.approx(9.6669080561, abs=1e-9)


def test_gram_domain():
    with pytest.raises(DomainError):
        gram_points(5.0, 20.0)


def test_scan_config_validation():
    with pytest.raises(DomainError):
        ScanConfig(5.0, 20.0)
    with pytest.raises(DomainError):
        ScanConfig(20.0, 20.0)
    with pytest.raises(DomainError):
        ScanConfig(10.0, 20.0, refine_tol=0)


def test_window_edge_on_a_zero():
    # each side of the edge agrees with the sign of Z there
    first = 14.134725141734694
    upper = scan_zeros(ScanConfig(first, 22.0))
    lower = scan_zeros(ScanConfig(10.0, first))
    assert upper.certificate.certified and lower.certificate.certified
    assert len(upper) + len(lower) == 2


def test_thread_count_does_not_change_result():
    a = scan_zeros(ScanConfig(1000.0, 1500.0, threads=1))
    b = scan_zeros(ScanConfig(1000.0, 1500.0, threads=4))
    assert a.records == b.records


def test_certify_prefix_against_zero_window(computed_100):
    cert = certify_count(computed_100, (0.0, 100.0))
    assert cert.certified and cert.found == 29


def test_certify_detects_deletion(computed_100):
    recs = computed_100.records
    holed = ZeroSet(recs[:10] + recs[11:], 10.0, 100.0, complete=True)
    cert = certify_count(holed)
    assert not cert.certified
    assert cert.residual == pytest.approx(-1)


def test_certify_empty():
    cert = certify_count(ZeroSet((), 0.0, 10.0, complete=True))
    assert cert.certified and cert.formula_count < 1


def test_counts_track_smooth_formula(computed_1000):
    zs = computed_1000
    assert zs.certificate.certified
    assert abs(len(zs) - nt_formula(1000.0)) <= 2 * math.log(1000.0)
    assert abs(len(zs) - n_theta(1000.0)) <= 1
    assert np.all(np.diff(zs.gammas) > 0)


@pytest.mark.parametrize("n", [1, 7, 30, 200, 500, 649])
def test_abs_error_contains_true_ordinate(computed_1000, n):
    r = computed_1000.records[n - 1]
    true = float(mpmath.im(mpmath.zetazero(n)))
    assert abs(r.gamma - true) <= r.abs_error


def test_abs_error_shrinks_with_height(computed_1000):
    errs = np.array([r.abs_error for r in computed_1000])
    assert errs[computed_1000.gammas > 500].max() < 1e-7


@pytest.mark.parametrize("T", [50.0, 100.0, 500.0, 1000.0])
def test_count_within_log_band(computed_1000, T):
    assert abs(computed_1000.count(T) - nt_formula(T)) <= 2 * math.log(T)


def test_half_step_rescan_is_stable():
    base = scan_zeros(ScanConfig(200.0, 400.0))
    step = 0.25 * float(zero_engine.average_spacing_at(200.0))
    fine = scan_zeros(ScanConfig(200.0, 400.0, initial_step=step / 2))
    assert len(base) == len(fine)
    assert np.max(np.abs(base.gammas - fine.gammas)) <= 1e-9


def test_sign_change_at_each_refined_zero(computed_1000):
    from zpc.zeta_eval import z_batch
    g = computed_1000.gammas[computed_1000.gammas > 30]
    zl, _ = z_batch(g - 1e-9)
    zr, _ = z_batch(g + 1e-9)
    assert np.all(np.signbit(zl) != np.signbit(zr))
