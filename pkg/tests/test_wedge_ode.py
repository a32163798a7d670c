import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import wedgetug as wt
from wedgetug.odes import OdeConfig, aperture_from_profile, eval_slope

from conftest import g_exact_p2, k_exact_p2, theta_exact_p2

INF = math.inf


# -- slope function -------------------------------------------------------------

def test_slope_values():
    assert eval_slope(1.0, 1.0, 0.0, 2.0) == pytest.approx(12.0, abs=1e-14)
    assert eval_slope(INF, 1.0, 0.0, 2.0) == pytest.approx(8.0, abs=1e-14)
    assert eval_slope(INF, 0.5, 0.0, 2.0) == pytest.approx(16.0, abs=1e-14)


def test_slope_domain_errors():
    with pytest.raises(wt.DomainError):
        eval_slope(1.0, 0.0, 0.0, 2.0)
    with pytest.raises(wt.DomainError):
        eval_slope(1.0, 0.5, -0.1, 2.0)
    with pytest.raises(wt.DomainError):
        eval_slope(1.0, 0.5, 0.0, 1.0)
    with pytest.raises(wt.DomainError):
        eval_slope(-2.0, 0.5, 0.0, 2.0)


@settings(max_examples=200, deadline=None)
@given(
    a=st.one_of(st.floats(1e-3, 1e3), st.just(INF)),
    y=st.floats(1e-6, 1.0),
    w=st.floats(0.0, 1e6),
    p=st.floats(1.001, 50.0),
)
def test_slope_positive_everywhere(a, y, w, p):
    assert eval_slope(a, y, w, p) > 0.0


# -- profile solve ---------------------------------------------------------------

def test_profile_matches_exact_p2(gp_a1_p2):
    for u in (0.9, 0.6180339887, 0.3, 0.05, 1e-3, 1e-6):
        assert gp_a1_p2.eval(u) == pytest.approx(float(g_exact_p2(1.0, u)), rel=5e-9)


def test_limit_profile_matches_exact_p2(gk_p2):
    for u in (0.9, 0.5, 0.1, 1e-3, 1e-6):
        assert gk_p2.eval(u) == pytest.approx(float(k_exact_p2(u)), rel=5e-9)


def test_initial_slopes(gp_a1_p2, gk_p2):
    # G'(1) = -F(1, 0): -12 for a=1 and -8 in the limit family at p=2
    delta = 1e-7
    assert gp_a1_p2.eval(1.0 - delta) / delta == pytest.approx(12.0, rel=1e-4)
    assert gk_p2.eval(1.0 - delta) / delta == pytest.approx(8.0, rel=1e-4)


def test_adaptive_solve_vs_fixed_step_oracle():
    """Brute-force fixed-step RK4 at ~10x resolution reproduces G(0.5)."""
    a, p = 1.0, 2.0
    cfg = OdeConfig()
    gp = wt.solve_G(a, p, cfg)
    n_nodes = len(gp.samples)
    t_end = -math.log(0.5)
    n = 10 * max(n_nodes, 100)
    h = t_end / n
    g = 0.0
    t = 0.0
    for _ in range(n):
        k1 = math.exp(-t) * eval_slope(a, math.exp(-t), max(g, 0.0), p)
        k2 = math.exp(-(t + h / 2)) * eval_slope(a, math.exp(-(t + h / 2)), max(g + h / 2 * k1, 0.0), p)
        k3 = math.exp(-(t + h / 2)) * eval_slope(a, math.exp(-(t + h / 2)), max(g + h / 2 * k2, 0.0), p)
        k4 = math.exp(-(t + h)) * eval_slope(a, math.exp(-(t + h)), max(g + h * k3, 0.0), p)
        g += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    assert gp.eval(0.5) == pytest.approx(g, rel=100 * cfg.rel_tol)


def test_samples_strictly_decreasing(gp_a1_p2):
    ys = gp_a1_p2.samples[:, 0]
    gs = gp_a1_p2.samples[:, 1]
    assert np.all(np.diff(ys) > 0)
    assert np.all(np.diff(gs) < 0)
    assert gs[-1] == 0.0  # G(1) = 0 exactly


@pytest.mark.parametrize("a1,a2", [(0.5, 1.0), (1.0, 2.0), (2.0, 8.0)])
@pytest.mark.parametrize("p", [2.0, 3.0])
def test_monotone_in_shooting_parameter(a1, a2, p):
    g1 = wt.solve_G(a1, p)
    g2 = wt.solve_G(a2, p)
    us = np.geomspace(1e-5, 0.999, 40)
    v1 = g1.eval(us)
    v2 = g2.eval(us)
    assert np.all(v2 < v1)


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_limit_below_every_member(p):
    gk = wt.solve_G(INF, p)
    us = np.geomspace(1e-5, 0.999, 40)
    kv = gk.eval(us)
    for a in (0.5, 1.0, 2.0, 8.0):
        assert np.all(kv <= wt.solve_G(a, p).eval(us))


# -- blowup exponent ---------------------------------------------------------------

def test_exponent_ratio_carries_power_law_offset(gk_p2):
    # ratio = 2 + log(c) / (-log y) for the exact power-law constant c;
    # at p = 2 the limit profile has c = 4 exactly
    for ym in (1e-3, 1e-4, 1e-6):
        c = ym * ym * gk_p2.eval(ym)
        expected = 2.0 + math.log(c) / (-math.log(ym))
        got = wt.asymptotic_exponent_check(gk_p2, y_probe=ym)
        assert got == pytest.approx(expected, abs=1e-9)
        assert c == pytest.approx(4.0, rel=1e-5)
    # the offset decays: the ratio approaches the exponent 2 from above
    r3 = wt.asymptotic_exponent_check(gk_p2, y_probe=1e-3)
    r6 = wt.asymptotic_exponent_check(gk_p2, y_probe=1e-6)
    assert r3 > r6 > 2.0


def test_exponent_vs_loglog_regression_p3():
    gk = wt.solve_G(INF, 3.0, OdeConfig(y_min=1e-5))
    ratio = wt.asymptotic_exponent_check(gk, y_probe=1e-4)
    ys = np.geomspace(1e-4, 1e-3, 60)
    slope = -np.polyfit(np.log(ys), np.log(gk.eval(ys)), 1)[0]
    assert abs(slope - 2.0) < 0.02
    assert abs(ratio - slope) < 0.2  # finite-probe offset only


def test_exponent_check_preconditions(gp_a1_p2, gk_p2):
    with pytest.raises(wt.DomainError):
        wt.asymptotic_exponent_check(gp_a1_p2)  # finite a
    with pytest.raises(wt.DomainError):
        wt.asymptotic_exponent_check(gk_p2, y_probe=0.01)


# -- aperture -----------------------------------------------------------------------

def test_theta_matches_exact_p2():
    for a in (0.1, 1.0, 5.0):
        assert wt.theta_a(a, 2.0) == pytest.approx(theta_exact_p2(a), abs=1e-9)


def test_theta_increasing_and_bounded():
    crit = wt.critical_half_angle_closed(2.0)
    vals = [wt.theta_a(a, 2.0) for a in (0.1, 0.5, 1.0, 2.0, 5.0, 20.0)]
    assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))
    assert all(v < crit for v in vals)
    assert wt.theta_a(1e-3, 2.0) < wt.theta_a(1.0, 2.0)


def test_theta_vs_forward_march_oracle():
    """Independent route: march the angular law dtheta/dy = -1/sqrt(H) by
    fixed-step RK4 in y.  A fourth-order series in theta clears the
    square-root degeneracy at the axis; a flat-slope term closes the tail."""
    a, p = 1.0, 2.0
    gp = wt.solve_G(a, p)
    ypp0 = -p * (1.0 + 2.0 * a)
    _, hp_a = wt.eval_H(a, a, p, gp)
    _, hp_m = wt.eval_H(a, a - 1e-6, p, gp)
    hpp_a = (hp_a - hp_m) / 1e-6
    y4 = hpp_a * ypp0 / 2.0

    t0 = 0.05
    y0 = a + 0.5 * ypp0 * t0 * t0 + y4 * t0**4 / 24.0
    y_floor = 1e-7 * a
    n = 200000
    h = (y0 - y_floor) / n
    grid = y0 - 0.5 * h * np.arange(2 * n + 1)
    H_all, _ = wt.eval_H(a, np.maximum(grid, 0.0), p, gp)
    inv = 1.0 / np.sqrt(H_all)
    # RK4 for a pure-quadrature right-hand side reduces to Simpson's rule
    theta = t0 + float(np.sum((h / 6.0) * (inv[0:-2:2] + 4.0 * inv[1:-1:2] + inv[2::2])))
    theta += y_floor * inv[-1]  # flat-slope tail below the floor
    assert wt.theta_a(a, p) == pytest.approx(theta, abs=5e-7)


def test_theta_rejects_limit_parameter():
    with pytest.raises(wt.DomainError):
        wt.theta_a(INF, 2.0)


# -- critical angle -------------------------------------------------------------------

def test_closed_form_values():
    assert wt.critical_half_angle_closed(2.0) == math.pi / 4
    assert 2.0 * wt.critical_half_angle_closed(2.0) == math.pi / 2
    # extended-precision oracle for p = 10 (mpmath)
    from mpmath import mp, mpf, pi as mppi, sqrt as mpsqrt

    mp.dps = 40
    want = float((mppi / 2) * (1 - mpf(1) / 2 * mpsqrt(mpf(2) * 9 / 10)))
    assert wt.critical_half_angle_closed(10.0) == pytest.approx(want, abs=1e-15)


def test_rational_integrand_at_origin():
    p = 2.0
    z = 0.0
    val = (4.0 + (p - 1) * z * z) / (2 * (p - 1) * z**4 + 4 * (3 * p - 2) * z * z + 16 * p)
    assert val == 0.125


@pytest.mark.parametrize("p", [1.1, 1.5, 2.0, 3.0, 10.0])
def test_quadrature_route(p):
    closed = wt.critical_half_angle_closed(p)
    assert abs(wt.critical_half_angle_quadrature(p) - closed) <= 1e-10


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_limit_route(p):
    closed = wt.critical_half_angle_closed(p)
    assert abs(wt.k_route_half_angle(p) - closed) <= 1e-4


def test_limit_route_dominates_all_finite_members():
    lim = wt.k_route_half_angle(2.0)
    for a in (0.1, 1.0, 5.0, 20.0):
        assert wt.theta_a(a, 2.0) < lim


def test_aperture_quadrature_tolerance_guard(gp_a1_p2):
    val = aperture_from_profile(gp_a1_p2, quad_tol=1e-13)
    assert val == pytest.approx(theta_exact_p2(1.0), abs=1e-9)
