"""Planar wedge solution u(x) = r^2 f(theta) with derivatives and verification.

Assembles the calibrated angular profile into a field on the wedge, provides
exact polar-to-Cartesian gradients and Hessians, and checks the degenerate
elliptic equation the field solves (value -1) by independent central
finite differences.  Also estimates the constants that control the one-step
drift bound of the inward-tug strategy.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CriticalPointError, DomainError, OutOfRangeError
from .odes import OdeConfig, critical_half_angle_closed
from .profile import build_profile, calibrate_a


@dataclass(frozen=True)
class QuadraticForm:
    """phi(x) = (x-center)^T A (x-center) + (xi, x-center)."""

    A: np.ndarray
    xi: np.ndarray
    center: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))
        center = np.zeros(2) if self.center is None else np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", center)
        if self.A.shape != (2, 2) or not np.allclose(self.A, self.A.T, atol=1e-14):
            raise DomainError("A must be a symmetric 2x2 matrix")

    def __call__(self, x):
        rel = np.asarray(x, dtype=float) - self.center
        return float(rel @ self.A @ rel + self.xi @ rel)


def deltap_quadratic(q_form, p):
    """Exact operator value on a quadratic form at its center:

        (2/p) tr A + (1/q - 1/p) * 2 xi^T A xi / |xi|^2.
    """
    if not p > 1.0:
        raise DomainError("p must exceed 1")
    xi = q_form.xi
    nrm2 = float(xi @ xi)
    if nrm2 == 0.0:
        raise CriticalPointError("operator undefined at zero gradient")
    q = p / (p - 1.0)
    A = q_form.A
    return (2.0 / p) * float(np.trace(A)) + (1.0 / q - 1.0 / p) * 2.0 * float(xi @ A @ xi) / nrm2


def fd_gradient(field, x, h):
    x = np.asarray(x, dtype=float)
    e = np.eye(2) * h
    return np.array(
        [(field(x + e[i]) - field(x - e[i])) / (2.0 * h) for i in range(2)]
    )


def fd_hessian(field, x, h):
    x = np.asarray(x, dtype=float)
    e = np.eye(2) * h
    f0 = field(x)
    H = np.empty((2, 2))
    for i in range(2):
        H[i, i] = (field(x + e[i]) - 2.0 * f0 + field(x - e[i])) / (h * h)
    cross = (
        field(x + e[0] + e[1])
        - field(x + e[0] - e[1])
        - field(x - e[0] + e[1])
        + field(x - e[0] - e[1])
    ) / (4.0 * h * h)
    H[0, 1] = H[1, 0] = cross
    return H


def game_p_laplacian_fd(field, x, h, p, grad_floor=1e-8):
    """O(h^2) finite-difference value of (1/p) Lap + (1/q - 1/p) Lap_inf.

    The gradient-direction term is undefined at critical points; gradients
    below grad_floor raise.
    """
    if not p > 1.0:
        raise DomainError("p must exceed 1")
    g = fd_gradient(field, x, h)
    nrm2 = float(g @ g)
    if nrm2 < grad_floor * grad_floor:
        raise CriticalPointError(f"|grad| < {grad_floor:g} at {x}")
    H = fd_hessian(field, x, h)
    lap = float(np.trace(H))
    lap_inf = float(g @ H @ g) / nrm2
    q = p / (p - 1.0)
    return lap / p + (1.0 / q - 1.0 / p) * lap_inf


class PSolution:
    """u(x) = r^2 f(theta) on a wedge, with the game geometry attached.

    The field is defined on the solution wedge of half-angle profile.theta_a
    (apex at the origin); the game is played on the wedge of half-angle
    wedge_half_angle translated along the axis by `translation`, which keeps
    the play region away from both the apex and the zero set of f.
    """

    def __init__(self, profile, wedge_half_angle, translation):
        if wedge_half_angle > profile.theta_a + 1e-12:
            raise DomainError("game wedge must fit inside the solution wedge")
        self.profile = profile
        self.p = profile.p
        self.wedge_half_angle = float(wedge_half_angle)
        self.translation = float(translation)

    @classmethod
    def build(cls, p, eta, enlargement=0.05, n_nodes=801, cfg=None, calib_tol=1e-10):
        """Calibrate a solution for the game wedge of full aperture eta.

        The angular profile is solved on a slightly larger wedge (controlled
        by `enlargement`, a fraction of the distance to critical) so that the
        derivative bounds stay finite on the translated play region.
        """
        cfg = cfg or OdeConfig()
        half = eta / 2.0
        crit = critical_half_angle_closed(p)
        if not (0.0 < half < crit):
            raise OutOfRangeError(
                f"aperture {eta:.12g} is not below the critical angle "
                f"{2.0 * crit:.12g} for p={p:g}"
            )
        half_solve = half + enlargement * (crit - half)
        if not half_solve < crit:
            raise OutOfRangeError("enlargement pushes the solve target past critical")
        a = calibrate_a(half_solve, p, tol=calib_tol, cfg=cfg)
        prof = build_profile(a, p, n_nodes=n_nodes, cfg=cfg)
        s = 1.0 / math.sqrt(p - 1.0)
        alpha = 1.0 + s
        return cls(prof, half, 2.0 * (alpha + 1.0))

    # -- evaluation ---------------------------------------------------------

    def _polar(self, x, check=True):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        r = np.sqrt(pts[:, 0] ** 2 + pts[:, 1] ** 2)
        th = np.arctan2(pts[:, 1], pts[:, 0])
        if check and np.any(np.abs(th) > self.profile.theta_a * (1.0 + 1e-9) + 1e-12):
            raise DomainError("point outside the closed solution wedge")
        return pts, r, th, single

    def u(self, x):
        pts, r, th, single = self._polar(x)
        prof = self.profile
        val = r * r * np.atleast_1d(prof.f(th))
        return float(val[0]) if single else val

    def grad(self, x):
        pts, r, th, single = self._polar(x)
        if np.any(r == 0.0):
            raise DomainError("gradient undefined at the apex")
        prof = self.profile
        f = np.atleast_1d(prof.f(th))
        fp = np.atleast_1d(prof.fp(th))
        g = np.column_stack(
            (2.0 * f * pts[:, 0] - fp * pts[:, 1], 2.0 * f * pts[:, 1] + fp * pts[:, 0])
        )
        return g[0] if single else g

    def hessian(self, x):
        pts, r, th, single = self._polar(x)
        if np.any(r == 0.0):
            raise DomainError("Hessian undefined at the apex")
        prof = self.profile
        f = np.atleast_1d(prof.f(th))
        fp = np.atleast_1d(prof.fp(th))
        fpp = np.atleast_1d(prof.fpp(th))
        c, s = pts[:, 0] / r, pts[:, 1] / r
        P = 2.0 * f * c - fp * s
        Q = 2.0 * f * s + fp * c
        Pp = fp * c - (2.0 * f + fpp) * s
        Qp = fp * s + (2.0 * f + fpp) * c
        H = np.empty((len(r), 2, 2))
        H[:, 0, 0] = P * c - Pp * s
        H[:, 0, 1] = H[:, 1, 0] = P * s + Pp * c
        H[:, 1, 1] = Q * s + Qp * c
        return H[0] if single else H

    def eval(self, x):
        """(u, grad, hess) in one call."""
        return self.u(x), self.grad(x), self.hessian(x)

    def as_field(self):
        """Scalar callable for finite-difference probes."""
        return lambda x: self.u(x)

    # -- game geometry helpers ---------------------------------------------

    def game_domain(self):
        from .game import Domain

        return Domain.wedge(2.0 * self.wedge_half_angle, translation=self.translation)

    def start_point(self, axis_distance=1.0):
        return np.array([self.translation + axis_distance, 0.0])


@dataclass(frozen=True)
class BoundConstants:
    """Sampled-supremum constants for the one-step drift bound.

    c1 = c_taylor + 18 beta^2 sup(|D2 u|^2 / |grad u|^2); the drift of the
    compensated value process under the inward-tug strategy is at most
    (c_taylor - c1) eps^3 < 0 per interior step for eps below beta/(2 c1).
    """

    beta: float
    alpha: float
    sup_d2: float
    sup_ratio: float
    sup_d3: float
    inf_grad: float
    c_taylor: float
    c1: float

    @property
    def eps_threshold(self):
        """Step size below which the drift bound has a positive margin."""
        return self.beta / (2.0 * self.c1)


def bound_constants(psol, n_radial=36, n_angular=61, r_max=12.0, safety=2.0):
    """Estimate the drift-bound constants by dense sampling on the play wedge.

    Second derivatives of u are homogeneous of degree zero and |grad u| grows
    linearly in r, so the suprema live near the translated apex; the radial
    grid therefore clusters there.  Third derivatives (for the Taylor
    constant) are sampled by differencing the exact Hessian.  A multiplicative
    safety factor covers the gap between sampled and true suprema.
    """
    t = psol.translation
    half = psol.wedge_half_angle
    p = psol.p
    s = 1.0 / math.sqrt(p - 1.0)
    alpha = 1.0 + s
    beta = p / (p - 1.0)

    rho = np.concatenate(([0.0], np.geomspace(1e-3, r_max, n_radial)))
    phi = np.linspace(-half, half, n_angular)
    R, PHI = np.meshgrid(rho, phi, indexing="ij")
    X = t + R * np.cos(PHI)
    Y = R * np.sin(PHI)
    pts = np.column_stack((X.ravel(), Y.ravel()))
    pts = np.unique(pts, axis=0)

    G = psol.grad(pts)
    gn = np.sqrt(np.sum(G * G, axis=1))
    H = psol.hessian(pts)
    # spectral norm of a symmetric 2x2
    tr_half = 0.5 * (H[:, 0, 0] + H[:, 1, 1])
    dev = np.sqrt(0.25 * (H[:, 0, 0] - H[:, 1, 1]) ** 2 + H[:, 0, 1] ** 2)
    d2 = np.maximum(np.abs(tr_half + dev), np.abs(tr_half - dev))

    sup_d2 = float(np.max(d2))
    sup_ratio = float(np.max((d2 / gn) ** 2))
    inf_grad = float(np.min(gn))

    # third derivatives: Frobenius norm of the differenced Hessian tensor
    hstep = 1e-5 * (1.0 + np.sqrt(np.sum(pts * pts, axis=1)))
    sup_d3 = 0.0
    e = np.eye(2)
    for k in range(2):
        dH = (
            psol.hessian(pts + hstep[:, None] * e[k])
            - psol.hessian(pts - hstep[:, None] * e[k])
        ) / (2.0 * hstep[:, None, None])
        sup_d3 = max(sup_d3, float(np.max(np.sqrt(np.sum(dH * dH, axis=(1, 2))))))

    c_taylor = safety * (alpha**3 / 6.0) * sup_d3
    c1 = c_taylor + 18.0 * beta * beta * safety * sup_ratio
    return BoundConstants(
        beta=beta,
        alpha=alpha,
        sup_d2=sup_d2,
        sup_ratio=sup_ratio,
        sup_d3=sup_d3,
        inf_grad=inf_grad,
        c_taylor=c_taylor,
        c1=c1,
    )
