"""Shooting ODE family behind the wedge profiles.

A one-parameter family of decreasing profiles G_a on (0, 1], solved backwards
from G_a(1) = 0, controls the admissible wedge apertures: the half-aperture
produced by shooting parameter a is

    theta(a) = integral_0^1 du / (u sqrt(G_a(u))),

increasing in a, with supremum equal to the critical half-angle

    (pi/2) (1 - (1/2) sqrt(2(p-1)/p)).

The a -> infinity member K of the family is solved directly from its own
slope function; the critical half-angle is also evaluated by an independent
rational-integral quadrature so the two routes cross-check each other.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _rk
from ._quintic import hermite_quintic_coeffs, hermite_quintic_eval
from .errors import AccuracyError, DomainError


@dataclass(frozen=True)
class OdeConfig:
    """Accuracy knobs for the profile solves.

    y_min is the lower integration cutoff; below it profiles continue with
    their exact leading power law G ~ c / y^2, whose relative defect at y_min
    is O(y_min^2).
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    y_min: float = 1e-6
    max_steps: int = 200_000

    def __post_init__(self):
        if not (0.0 < self.y_min < 1.0):
            raise DomainError("y_min must lie in (0, 1)")
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise DomainError("tolerances must be positive")
        if self.max_steps < 1:
            raise DomainError("max_steps must be at least 1")


def _validate_pa(a, p):
    if not p > 1.0:
        raise DomainError(f"p must exceed 1 (got {p})")
    if not (a > 0.0 or math.isinf(a)):
        raise DomainError(f"shooting parameter must be positive or math.inf (got {a})")


def eval_slope(a, y, w, p):
    """Slope magnitude F_a(y, w) of the shooting ODE, G' = -F_a(y, G).

    a = math.inf selects the limit family.  Positive on the whole domain
    y > 0, w >= 0, p > 1.
    """
    _validate_pa(a, p)
    if y <= 0.0:
        raise DomainError("y must be positive")
    if w < 0.0:
        raise DomainError("w must be nonnegative")
    poly = 16.0 * p + 4.0 * (3.0 * p - 2.0) * w + 2.0 * (p - 1.0) * w * w
    if math.isinf(a):
        num = poly * y
    else:
        num = (8.0 * p + 2.0 * p * w) / a + poly * y
    return num / (y * y * (4.0 + (p - 1.0) * w))


def _slope_partials(a, y, w, p):
    """(F, dF/dy, dF/dw) at (y, w) for the slope function."""
    pm1 = p - 1.0
    poly = 16.0 * p + 4.0 * (3.0 * p - 2.0) * w + 2.0 * pm1 * w * w
    if math.isinf(a):
        n = poly * y
        n_w = (4.0 * (3.0 * p - 2.0) + 4.0 * pm1 * w) * y
    else:
        n = (8.0 * p + 2.0 * p * w) / a + poly * y
        n_w = 2.0 * p / a + (4.0 * (3.0 * p - 2.0) + 4.0 * pm1 * w) * y
    n_y = poly
    d = y * y * (4.0 + pm1 * w)
    d_y = 2.0 * y * (4.0 + pm1 * w)
    d_w = y * y * pm1
    F = n / d
    return F, (n_y * d - n * d_y) / (d * d), (n_w * d - n * d_w) / (d * d)


class GProfile:
    """Sampled profile G_a on [y_min, 1] with quintic dense output.

    Finite a gives the shooting profile with G(1) = 0; a = math.inf is the
    monotone limit of the family.  Nodes live in the stretched variable
    t = -log y, where the y^-2 blowup becomes a tame exponential; below y_min
    evaluation continues with the exact leading power law.
    """

    interp_order = 5

    def __init__(self, a, p, t_nodes, g_nodes, cfg):
        self.a = a
        self.p = p
        self.cfg = cfg
        self._t = np.asarray(t_nodes, dtype=float)
        self._g = np.asarray(g_nodes, dtype=float)
        d1 = np.empty_like(self._g)
        d2 = np.empty_like(self._g)
        for i, (t, g) in enumerate(zip(self._t, self._g)):
            y = math.exp(-t)
            F, F_y, F_w = _slope_partials(a, y, max(g, 0.0), p)
            r = y * F
            d1[i] = r
            # d/dt of y F(y, G): dy/dt = -y, dG/dt = y F
            d2[i] = -r - y * y * F_y + y * F_w * r
        self._coeffs = hermite_quintic_coeffs(self._t, self._g, d1, d2)
        # two-term blowup model below the cutoff: u^2 G(u) = c + d u + O(u^2),
        # with d pinned by the exact slope G' = -F at the cutoff
        ym = math.exp(-self._t[-1])
        g_m = float(self._g[-1])
        F_m = eval_slope(a, ym, max(g_m, 0.0), p)
        self._tail_d = 2.0 * ym * g_m - ym * ym * F_m
        self._tail_c = ym * ym * g_m - self._tail_d * ym

    @property
    def y_min(self):
        return math.exp(-self._t[-1])

    @property
    def samples(self):
        """(y, G) pairs ordered by increasing y on [y_min, 1]."""
        return np.column_stack((np.exp(-self._t[::-1]), self._g[::-1]))

    def eval(self, u):
        """G at u (scalar or array); below y_min the two-term blowup model
        (c + d u) / u^2 continues the profile with O(u^2) relative defect."""
        u_arr = np.asarray(u, dtype=float)
        scalar = u_arr.ndim == 0
        uu = np.atleast_1d(u_arr).copy()
        if np.any(uu <= 0.0) or np.any(uu > 1.0 + 1e-12):
            raise DomainError("profile argument must lie in (0, 1]")
        ym = self.y_min
        below = uu < ym
        uu_in = np.where(below, ym, uu)
        vals = hermite_quintic_eval(self._t, self._coeffs, -np.log(uu_in), 0)
        vals = np.atleast_1d(vals)
        if below.any():
            ub = uu[below]
            vals[below] = (self._tail_c + self._tail_d * ub) / (ub * ub)
        return float(vals[0]) if scalar else vals

    def blowup_coefficients(self):
        """(c, d) of the model u^2 G(u) -> c + d u valid below y_min."""
        return self._tail_c, self._tail_d

    def check_monotone(self):
        """True when node values strictly decrease in y (increase in t)."""
        return bool(np.all(np.diff(self._g) > 0.0))


def solve_G(a, p, cfg=None):
    """Integrate the profile backwards from (y, G) = (1, 0) down to y_min."""
    cfg = cfg or OdeConfig()
    _validate_pa(a, p)

    def rhs(t, g):
        y = math.exp(-t)
        return y * eval_slope(a, y, max(g, 0.0), p)

    t_end = -math.log(cfg.y_min)
    nodes_t, nodes_g, _ = _rk.integrate(
        rhs, 0.0, t_end, 0.0, cfg.rel_tol, cfg.abs_tol, cfg.max_steps
    )
    prof = GProfile(a, p, nodes_t, nodes_g, cfg)
    if not prof.check_monotone():
        raise AccuracyError("profile lost strict monotonicity; tighten tolerances")
    return prof


def asymptotic_exponent_check(profile, y_probe=None):
    """log G(y_probe) / (-log y_probe) for the limit profile.

    Tends to the blowup exponent 2 as the probe goes to 0; at finite probes it
    carries the offset log(c) / (-log y_probe) from the power-law constant c.
    """
    if not math.isinf(profile.a):
        raise DomainError("exponent check expects the limit profile (a = math.inf)")
    y_probe = profile.y_min if y_probe is None else y_probe
    if y_probe > 1e-3:
        raise DomainError("probe must satisfy y <= 1e-3")
    return math.log(profile.eval(y_probe)) / (-math.log(y_probe))


def aperture_from_profile(profile, quad_tol=1e-11):
    """Half-aperture integral_0^1 du / (u sqrt(G(u))) for a solved profile.

    The u = 1 endpoint is desingularized exactly with u = 1 - v^2 (the
    integrand behaves like (1-u)^(-1/2) there); below y_min the integrand is
    flat under the power law and contributes G(y_min)^(-1/2).
    """
    a, p = profile.a, profile.p
    ym = profile.y_min
    F1 = eval_slope(a, 1.0, 0.0, p)

    def f_mid(u):
        return 1.0 / (u * math.sqrt(profile.eval(u)))

    def f_top(v):
        u = 1.0 - v * v
        if u >= 1.0:
            return 2.0 / math.sqrt(F1)
        return 2.0 * v / (u * math.sqrt(profile.eval(u)))

    I1, e1 = quad(f_mid, ym, 0.5, epsabs=quad_tol, epsrel=quad_tol, limit=300)
    I2, e2 = quad(f_top, 0.0, math.sqrt(0.5), epsabs=quad_tol, epsrel=quad_tol, limit=300)
    if e1 + e2 > 1e4 * quad_tol:
        raise AccuracyError("aperture quadrature failed to converge at the endpoints")
    # below y_min the integrand is 1 / sqrt(c + d u): integrate in closed form
    c, d = profile.blowup_coefficients()
    if abs(d) * ym > 1e-14 * c:
        tail = 2.0 * (math.sqrt(c + d * ym) - math.sqrt(c)) / d
    else:
        tail = ym / math.sqrt(c)
    return I1 + I2 + tail


def theta_a(a, p, cfg=None):
    """Half-aperture produced by a finite shooting parameter (radians)."""
    if math.isinf(a):
        raise DomainError("theta_a expects finite a; use k_route_half_angle for the limit")
    return aperture_from_profile(solve_G(a, p, cfg))


def critical_half_angle_closed(p):
    """(pi/2) [1 - (1/2) sqrt(2(p-1)/p)], the critical half-angle."""
    if not p > 1.0:
        raise DomainError(f"p must exceed 1 (got {p})")
    return (math.pi / 2.0) * (1.0 - 0.5 * math.sqrt(2.0 * (p - 1.0) / p))


def critical_half_angle_quadrature(p, tol=1e-10):
    """Critical half-angle by adaptive quadrature of the rational integral

        2 * integral_0^inf (4 + (p-1) z^2) / (2(p-1) z^4 + 4(3p-2) z^2 + 16 p) dz

    with a three-term analytic tail beyond Z = 1e3.
    """
    if not p > 1.0:
        raise DomainError(f"p must exceed 1 (got {p})")
    pm1 = p - 1.0

    def f(z):
        z2 = z * z
        return (4.0 + pm1 * z2) / (2.0 * pm1 * z2 * z2 + 4.0 * (3.0 * p - 2.0) * z2 + 16.0 * p)

    Z = 1e3
    I1, e1 = quad(f, 0.0, 10.0, epsabs=0.01 * tol, epsrel=0.01 * tol, limit=300)
    I2, e2 = quad(f, 10.0, Z, epsabs=0.01 * tol, epsrel=0.01 * tol, limit=300)
    # large-z expansion: f = 1/(2 z^2) - (3p-4)/((p-1) z^4) + c4/(2 z^6) + O(z^-8)
    c4 = 4.0 * (7.0 * p * p - 16.0 * p + 8.0) / (pm1 * pm1)
    tail = 1.0 / (2.0 * Z) - (3.0 * p - 4.0) / (3.0 * pm1 * Z**3) + c4 / (10.0 * Z**5)
    tail_err = abs(c4) * 10.0 / (pm1 * Z**7)
    if 2.0 * (e1 + e2 + tail_err) > tol:
        raise AccuracyError("rational-integral quadrature cannot meet the tolerance")
    return 2.0 * (I1 + I2 + tail)


def k_route_half_angle(p, cfg=None):
    """Critical half-angle via the aperture integral of the limit profile."""
    return aperture_from_profile(solve_G(math.inf, p, cfg))


@dataclass(frozen=True)
class CriticalAngleResult:
    p: float
    half_angle_closed: float
    half_angle_quadrature: float
    discrepancy: float

    @classmethod
    def compute(cls, p, tol=1e-10):
        closed = critical_half_angle_closed(p)
        by_quad = critical_half_angle_quadrature(p, tol)
        return cls(p, closed, by_quad, abs(closed - by_quad))
