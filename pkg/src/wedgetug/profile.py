"""Angular profile construction.

Calibrates the shooting parameter to a target half-aperture and builds the
angular factor f = y(theta) together with its first two derivatives.  The
construction goes through H(y) = y^2 G(y/a) = (y')^2: the profile is marched
from theta = 0 (where the square-root law y' = -sqrt(H(y)) is degenerate and a
local series supplies the start) down to y = 0, then extended evenly.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _rk
from ._quintic import hermite_quintic_coeffs, hermite_quintic_eval
from .errors import AccuracyError, DegenerateStartError, DomainError, OutOfRangeError
from .odes import (
    OdeConfig,
    aperture_from_profile,
    critical_half_angle_closed,
    solve_G,
)


def residual_51(y, yp, ypp, p):
    """Left-hand side of the angular equation; identically zero on solutions.

        4 y^2 [1 + 2y + y''/p] + (y')^2 [1 + 2(3p-4) y / p + (p-1) y''/p]
    """
    y = np.asarray(y, dtype=float)
    yp = np.asarray(yp, dtype=float)
    ypp = np.asarray(ypp, dtype=float)
    out = 4.0 * y * y * (1.0 + 2.0 * y + ypp / p) + yp * yp * (
        1.0 + 2.0 * (3.0 * p - 4.0) / p * y + (p - 1.0) / p * ypp
    )
    return float(out) if out.ndim == 0 else out


def eval_H(a, y, p, g_profile):
    """(H, H') at y in [0, a], where H(y) = y^2 G(y/a).

    H' comes from the closed-form relation

        H' = -(8 p y^2 (1 + 2y) + (2p + 4(3p-4) y) H) / (4 y^2 + (p-1) H),

    never from numerical differentiation.  At y = a this gives -2p(1+2a); at
    y = 0 it tends to -2p/(p-1).
    """
    if g_profile.a != a or g_profile.p != p:
        raise DomainError("profile was solved for different (a, p)")
    y_arr = np.asarray(y, dtype=float)
    scalar = y_arr.ndim == 0
    yy = np.atleast_1d(y_arr)
    if np.any(yy < -1e-15) or np.any(yy > a * (1.0 + 1e-12)):
        raise DomainError("argument must lie in [0, a]")
    # H(0) = a^2 c from the blowup model u^2 G -> c + d u
    c, _ = g_profile.blowup_coefficients()
    u = np.clip(yy / a, 0.0, 1.0)
    pos = u > 0.0
    H = np.full_like(yy, a * a * c)
    if pos.any():
        H[pos] = yy[pos] * yy[pos] * g_profile.eval(u[pos])
    num = 8.0 * p * yy * yy * (1.0 + 2.0 * yy) + (2.0 * p + 4.0 * (3.0 * p - 4.0) * yy) * H
    den = 4.0 * yy * yy + (p - 1.0) * H
    Hp = -num / den
    if scalar:
        return float(H[0]), float(Hp[0])
    return H, Hp


def _H_second(a, y, p, g_profile):
    """d^2 H / dy^2 from differentiating the closed-form slope."""
    H, Hp = eval_H(a, y, p, g_profile)
    n = 8.0 * p * y * y * (1.0 + 2.0 * y) + (2.0 * p + 4.0 * (3.0 * p - 4.0) * y) * H
    d = 4.0 * y * y + (p - 1.0) * H
    n_y = 16.0 * p * y + 48.0 * p * y * y + 4.0 * (3.0 * p - 4.0) * H + (
        2.0 * p + 4.0 * (3.0 * p - 4.0) * y
    ) * Hp
    d_y = 8.0 * y + (p - 1.0) * Hp
    return -(n_y * d - n * d_y) / (d * d)


def calibrate_a(target_half_angle, p, tol=1e-10, cfg=None, margin=1e-9):
    """Shooting parameter whose half-aperture matches the target.

    Monotonicity of the aperture in a makes the root unique; the bracket is
    grown geometrically and refined with a log-variable root find.  Targets at
    or beyond the critical half-angle are unattainable by any finite a.
    """
    cfg = cfg or OdeConfig()
    crit = critical_half_angle_closed(p)
    if not (0.0 < target_half_angle < crit - margin):
        raise OutOfRangeError(
            f"target {target_half_angle:.12g} rad must lie in (0, {crit:.12g}) "
            f"(critical half-angle for p={p:g}); no finite shooting parameter exists"
        )

    def theta_of(a):
        return aperture_from_profile(solve_G(a, p, cfg))

    a_lo = a_hi = 1.0
    th = theta_of(1.0)
    if th < target_half_angle:
        for _ in range(80):
            a_hi *= 4.0
            if theta_of(a_hi) >= target_half_angle:
                break
            a_lo = a_hi
        else:
            raise OutOfRangeError("bracket growth failed; target too close to critical")
    else:
        for _ in range(80):
            a_lo /= 4.0
            if theta_of(a_lo) <= target_half_angle:
                break
            a_hi = a_lo
        else:
            raise OutOfRangeError("bracket shrink failed; target too close to zero")

    la = brentq(
        lambda t: theta_of(math.exp(t)) - target_half_angle,
        math.log(a_lo),
        math.log(a_hi),
        xtol=1e-13,
        rtol=8.9e-16,
    )
    a_star = math.exp(la)
    if abs(theta_of(a_star) - target_half_angle) > tol:
        raise AccuracyError("calibration did not reach the requested angular tolerance")
    return a_star


@dataclass
class AngularProfile:
    """Calibrated angular factor with derivatives on [0, theta_a].

    Values interpolate the marched grid; the derivatives evaluate through the
    square-root law, f' = -sqrt(H(f)) and f'' = H'(f)/2, which is exactly
    self-consistent and avoids the 1/h^2 roundoff amplification of
    differentiating an interpolant.  Evaluation applies the even extension
    f(-theta) = f(theta), so f' is odd and f'' even; arguments slightly
    beyond theta_a extrapolate to keep finite-difference stencils smooth.
    """

    a: float
    p: float
    theta_a: float
    theta: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    ypp: np.ndarray
    evenness: bool = True
    residual_max: float = 0.0
    endpoint_defect: float = 0.0
    y_min: float = 1e-6
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    _coeffs: np.ndarray = field(default=None, repr=False)
    _gp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._coeffs is None:
            self._coeffs = hermite_quintic_coeffs(self.theta, self.y, self.yp, self.ypp)

    def _shooting_profile(self):
        if self._gp is None:
            cfg = OdeConfig(
                rel_tol=self.rel_tol, abs_tol=self.abs_tol, y_min=self.y_min
            )
            self._gp = solve_G(self.a, self.p, cfg)
        return self._gp

    def _abs_theta(self, theta):
        th = np.abs(np.asarray(theta, dtype=float))
        if np.any(th > self.theta_a * 1.02 + 1e-12):
            raise DomainError("angle outside the profile aperture")
        return th

    def f(self, theta):
        return hermite_quintic_eval(self.theta, self._coeffs, self._abs_theta(theta), 0)

    def _H_of_theta(self, theta):
        yv = np.atleast_1d(hermite_quintic_eval(self.theta, self._coeffs, self._abs_theta(theta), 0))
        yv = np.clip(yv, 0.0, self.a)
        return eval_H(self.a, yv, self.p, self._shooting_profile())

    def fp(self, theta):
        th = np.asarray(theta, dtype=float)
        H, _ = self._H_of_theta(theta)
        val = -np.sqrt(np.maximum(H, 0.0)) * np.sign(th)
        return val if th.ndim else float(val[0] * 1.0)

    def fpp(self, theta):
        th = np.asarray(theta, dtype=float)
        _, Hp = self._H_of_theta(theta)
        val = 0.5 * Hp
        return val if th.ndim else float(val[0])

    def grid_residuals(self):
        return residual_51(self.y, self.yp, self.ypp, self.p)


def build_profile(a, p, n_nodes=801, cfg=None, handoff_theta=1e-3):
    """March y' = -sqrt(H(y)) from (theta, y) = (0, a) down to y = 0.

    The square-root law is degenerate at the start (H(a) = 0): a fourth-order
    local series opens the march and hands off to the adaptive integrator,
    with a consistency check at the handoff point.  The aperture comes from
    the quadrature route; the marched endpoint must agree with it, and the
    leftover mismatch is recorded as endpoint_defect (radians).
    """
    cfg = cfg or OdeConfig()
    if n_nodes < 16:
        raise DomainError("n_nodes must be at least 16")
    gp = solve_G(a, p, cfg)
    th_a = aperture_from_profile(gp)

    def H_of(y):
        return eval_H(a, min(max(y, 0.0), a), p, gp)

    ypp0 = -p * (1.0 + 2.0 * a)  # equals H'(a)/2
    h2a = _H_second(a, a, p, gp)
    y4 = h2a * ypp0 / 2.0  # fourth theta-derivative at the axis

    # mildly graded grid: small shooting parameters produce thin layers with
    # large high-order derivatives at both endpoints, so the ends are refined
    # ~12x against the bulk.  Stronger clustering would amplify nodal
    # roundoff by 1/h^2 in the interpolant's second derivative.
    sigma = np.linspace(0.0, 1.0, n_nodes)
    lam = 0.92
    thetas = th_a * (sigma - (lam / (2.0 * math.pi)) * np.sin(2.0 * math.pi * sigma))
    thetas[0], thetas[-1] = 0.0, th_a

    handoff = min(handoff_theta, th_a / 16.0)

    def taylor_y(t):
        return a + 0.5 * ypp0 * t * t + y4 * t**4 / 24.0

    def taylor_yp(t):
        return ypp0 * t + y4 * t**3 / 6.0

    y_start = taylor_y(handoff)
    H_h, _ = H_of(y_start)
    slope_sq = taylor_yp(handoff) ** 2
    scale = max(slope_sq, H_h, 1e-30)
    if abs(slope_sq - H_h) > 1e-5 * scale:
        raise DegenerateStartError(
            f"series start and square-root law disagree at handoff: "
            f"|y'^2 - H| = {abs(slope_sq - H_h):.3g} vs scale {scale:.3g}"
        )

    y_vals = np.empty(n_nodes)
    pre = thetas <= handoff
    y_vals[pre] = taylor_y(thetas[pre])

    targets = thetas[~pre]
    if targets.size:
        def rhs(t, y):
            H, _ = H_of(y)
            return -math.sqrt(max(H, 0.0))

        _, _, tgt_vals = _rk.integrate(
            rhs, handoff, th_a, y_start, cfg.rel_tol, cfg.abs_tol, cfg.max_steps,
            targets=list(targets),
        )
        y_vals[~pre] = tgt_vals

    H0, _ = H_of(0.0)
    endpoint_defect = abs(y_vals[-1]) / math.sqrt(H0)

    y_vals = np.maximum(y_vals, 0.0)
    y_vals[0], y_vals[-1] = a, 0.0
    H_grid, Hp_grid = eval_H(a, y_vals, p, gp)
    yp_vals = -np.sqrt(np.maximum(H_grid, 0.0))
    yp_vals[0] = 0.0
    ypp_vals = 0.5 * Hp_grid

    prof = AngularProfile(
        a=a,
        p=p,
        theta_a=th_a,
        theta=thetas,
        y=y_vals,
        yp=yp_vals,
        ypp=ypp_vals,
        endpoint_defect=endpoint_defect,
        y_min=cfg.y_min,
        rel_tol=cfg.rel_tol,
        abs_tol=cfg.abs_tol,
        _gp=gp,
    )
    prof.residual_max = float(np.max(np.abs(prof.grid_residuals())))
    if endpoint_defect > 1e-6:
        raise AccuracyError(
            f"marched aperture misses the quadrature aperture by {endpoint_defect:.3g} rad"
        )
    return prof


_META_KEYS = ("a", "p", "theta_a", "residual_max", "endpoint_defect", "y_min", "rel_tol", "abs_tol")


def export_csv(profile, path):
    """Write the grid as CSV (theta,y,yp,ypp) plus a key-value metadata sidecar."""
    with open(path, "w") as fh:
        fh.write("theta,y,yp,ypp\n")
        for t, y, yp, ypp in zip(profile.theta, profile.y, profile.yp, profile.ypp):
            fh.write(f"{t:.17g},{y:.17g},{yp:.17g},{ypp:.17g}\n")
    with open(str(path) + ".meta", "w") as fh:
        fh.write("format = wedgetug-profile-v1\n")
        for key in _META_KEYS:
            fh.write(f"{key} = {getattr(profile, key):.17g}\n")


def load_csv(path):
    """Rebuild an AngularProfile from export_csv output (bit-stable round trip)."""
    try:
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except Exception as exc:
        raise DomainError(f"malformed profile file {path}: {exc}") from exc
    if rows.shape[1] != 4 or rows.shape[0] < 2:
        raise DomainError(f"malformed profile file {path}: expected 4 columns")
    meta = {}
    try:
        with open(str(path) + ".meta") as fh:
            for line in fh:
                if "=" in line:
                    key, _, val = line.partition("=")
                    meta[key.strip()] = val.strip()
    except OSError as exc:
        raise DomainError(f"missing metadata sidecar for {path}: {exc}") from exc
    try:
        return AngularProfile(
            a=float(meta["a"]),
            p=float(meta["p"]),
            theta_a=float(meta["theta_a"]),
            theta=rows[:, 0],
            y=rows[:, 1],
            yp=rows[:, 2],
            ypp=rows[:, 3],
            residual_max=float(meta.get("residual_max", 0.0)),
            endpoint_defect=float(meta.get("endpoint_defect", 0.0)),
            y_min=float(meta.get("y_min", 1e-6)),
            rel_tol=float(meta.get("rel_tol", 1e-10)),
            abs_tol=float(meta.get("abs_tol", 1e-12)),
        )
    except KeyError as exc:
        raise DomainError(f"metadata sidecar for {path} lacks field {exc}") from exc
