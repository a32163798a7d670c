"""Tug game with axial two-point noise.

Each turn a fair coin picks the mover, who adds a control vector of length at
most eps; the position then receives a noise kick of length s |v| orthogonal
to the chosen control, with equiprobable sign.  Within distance
alpha * eps = (1 + s) eps of the boundary, the winner instead selects a
boundary point within alpha * eps and the game ends.

The noise normalization ties the game to the exponent p: with
s = 1/sqrt(p-1) the per-move covariance in the control frame is
|v|^2 diag(0, s^2), which fixes beta = q (the conjugate exponent) in the
quadratic-form identities implemented by psi_exact / psi_mc.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _geometry as geom
from .errors import DomainError, StrategyViolationError


@dataclass(frozen=True)
class GameParams:
    """Game constants for exponent p at step scale eps (canonical noise)."""

    p: float
    eps: float
    seed: int = 0
    q: float = field(init=False)
    beta: float = field(init=False)
    s: float = field(init=False)
    alpha: float = field(init=False)

    def __post_init__(self):
        if not self.p > 1.0:
            raise DomainError("p must exceed 1")
        if not self.eps > 0.0:
            raise DomainError("eps must be positive")
        q = self.p / (self.p - 1.0)
        s = 1.0 / math.sqrt(self.p - 1.0)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "beta", q)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "alpha", 1.0 + s)
        # conjugacy and covariance identities must hold exactly
        assert abs(1.0 / self.p + 1.0 / self.q - 1.0) < 1e-12
        assert abs(self.beta / self.p - s * s) < 1e-12 * max(1.0, s * s)
        assert abs(self.beta / self.q - 1.0) < 1e-12

    @property
    def boundary_radius(self):
        return self.alpha * self.eps


class Domain:
    """Planar game arena: wedge, half-plane, or power-curve strip."""

    WEDGE, HALF_PLANE, PARABOLA = geom.KIND_WEDGE, geom.KIND_HALF_PLANE, geom.KIND_PARABOLA

    def __init__(self, kind, params, label):
        self.kind = kind
        self.params = np.asarray(params, dtype=float)
        self.label = label

    @classmethod
    def wedge(cls, eta, translation=0.0):
        if not 0.0 < eta < 2.0 * math.pi:
            raise DomainError("wedge aperture must lie in (0, 2 pi)")
        d = cls(cls.WEDGE, geom.wedge_params(eta, translation), f"wedge(eta={eta:g})")
        d.eta = eta
        d.translation = translation
        return d

    @classmethod
    def half_plane(cls, translation=0.0):
        d = cls(cls.HALF_PLANE, geom.half_plane_params(translation), "half_plane")
        d.eta = math.pi
        d.translation = translation
        return d

    @classmethod
    def parabola(cls, amplitude, exponent):
        if not amplitude > 0.0:
            raise DomainError("amplitude must be positive")
        if not 0.0 < exponent < 1.0:
            raise DomainError("exponent must lie in (0, 1)")
        d = cls(
            cls.PARABOLA,
            geom.parabola_params(amplitude, exponent),
            f"parabola(A={amplitude:g},gamma={exponent:g})",
        )
        d.eta = float("nan")
        d.translation = 0.0
        return d

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = geom.contains(self.kind, self.params, x[..., 0], x[..., 1])
        return bool(out) if np.ndim(out) == 0 else out

    def dist_to_boundary(self, x):
        x = np.asarray(x, dtype=float)
        out = geom.dist(self.kind, self.params, x[..., 0], x[..., 1])
        return float(out) if np.ndim(out) == 0 else out

    def project_to_boundary(self, x, radius=None, direction=None):
        """Boundary point for a terminal move: nearest, or the admissible
        point maximizing (direction, b) when a pull direction is given."""
        x = np.asarray(x, dtype=float)
        if direction is None or radius is None:
            bx, by = geom.nearest_boundary(self.kind, self.params, x[0], x[1])
        else:
            bx, by = geom.directional_boundary(
                self.kind, self.params, x[0], x[1], radius, direction[0], direction[1]
            )
        return np.array([bx, by])


@dataclass
class GameState:
    position: np.ndarray
    step: int = 0
    terminal: bool = False
    exit_point: Optional[np.ndarray] = None

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)


@dataclass(frozen=True)
class Strategy:
    """Move rule for one player.

    kinds: 'null' (no tug), 'pull_axis' (fixed direction), 'pull_neg_grad_u' /
    'pull_pos_grad_u' (unit gradient of an attached solution), 'custom'
    (callback(x, params) -> v).  Boundary moves: axis pulls exit at the
    admissible boundary point maximizing their direction; everything else
    exits at the nearest boundary point.
    """

    kind: str
    direction: Optional[np.ndarray] = None
    solution: object = None
    move_fn: Optional[Callable] = None

    @classmethod
    def null_move(cls):
        return cls("null")

    @classmethod
    def pull_axis(cls, direction):
        d = np.asarray(direction, dtype=float)
        nrm = math.sqrt(float(d @ d))
        if nrm == 0.0:
            raise DomainError("pull direction must be nonzero")
        return cls("pull_axis", direction=d / nrm)

    @classmethod
    def pull_neg_grad_u(cls, solution):
        return cls("pull_neg_grad_u", solution=solution)

    @classmethod
    def pull_pos_grad_u(cls, solution):
        return cls("pull_pos_grad_u", solution=solution)

    @classmethod
    def custom(cls, move_fn):
        return cls("custom", move_fn=move_fn)

    def label(self):
        if self.kind == "pull_axis":
            return f"pull_axis({self.direction[0]:g};{self.direction[1]:g})"
        return self.kind if self.kind != "null" else "null_move"

    def move(self, x, params):
        """Control vector at x; |v| <= eps."""
        eps = params.eps
        if self.kind == "null":
            return np.zeros(2)
        if self.kind == "pull_axis":
            return eps * self.direction
        if self.kind in ("pull_neg_grad_u", "pull_pos_grad_u"):
            g = self.solution.grad(x)
            nrm = math.sqrt(float(g @ g))
            if nrm == 0.0:
                return np.zeros(2)
            sign = -1.0 if self.kind == "pull_neg_grad_u" else 1.0
            return (sign * eps / nrm) * g
        v = np.asarray(self.move_fn(x, params), dtype=float)
        if math.sqrt(float(v @ v)) > eps * (1.0 + 1e-12):
            raise StrategyViolationError(f"custom strategy returned |v| > eps at {x}")
        return v

    def boundary_direction(self):
        """Direction used for the terminal boundary choice, or None for nearest."""
        return self.direction if self.kind == "pull_axis" else None


def perp(v):
    """v rotated by +90 degrees."""
    return np.array([-v[1], v[0]])


def sample_noise(v, params, rng):
    """Noise kick for control v: +/- s * (v rotated 90 degrees), fair sign.

    Zero control yields zero noise (the kick scales with |v|).  The sign
    convention matches the engine bit stream: bit 0 -> +, bit 1 -> -.
    """
    v = np.asarray(v, dtype=float)
    bit = int(rng.integers(0, 2))
    sgn = 1.0 if bit == 0 else -1.0
    return params.s * sgn * perp(v)


def game_step(state, s_I, s_II, domain, params, rng):
    """One turn of the game; returns the successor state.

    The fair coin picks the mover (bit 1 -> player I); within alpha*eps of the
    boundary the winner selects a boundary point and the game ends, otherwise
    position += v + noise.  The step counter advances in both cases.
    """
    if state.terminal:
        raise DomainError("game already ended")
    x = state.position
    coin = int(rng.integers(0, 2))
    winner = s_I if coin == 1 else s_II
    d = domain.dist_to_boundary(x)
    radius = params.boundary_radius
    if d <= radius:
        bp = domain.project_to_boundary(x, radius=radius, direction=winner.boundary_direction())
        if math.sqrt(float((bp - x) @ (bp - x))) > radius * (1.0 + 1e-9):
            raise StrategyViolationError("boundary move left the admissible ball")
        return GameState(bp, state.step + 1, True, bp)
    v = winner.move(x, params)
    if math.sqrt(float(v @ v)) > params.eps * (1.0 + 1e-12):
        raise StrategyViolationError("strategy returned |v| > eps")
    z = sample_noise(v, params, rng)
    return GameState(x + v + z, state.step + 1, False, None)


# -- quadratic-form identities ------------------------------------------------

def noise_matrix(q_form, params):
    """B = (beta/q - beta/p) A + (beta/p) tr(A) I."""
    A = q_form.A
    b = params.beta
    return (b / params.q - b / params.p) * A + (b / params.p) * np.trace(A) * np.eye(2)


def psi_exact(q_form, v, params):
    """One-move conditional expectation of the quadratic form:
    (xi, v) + v^T B v."""
    v = np.asarray(v, dtype=float)
    B = noise_matrix(q_form, params)
    return float(q_form.xi @ v + v @ B @ v)


def psi_mc(q_form, v, params, n, rng):
    """Monte Carlo version of psi_exact from noise samples; (estimate, stderr)."""
    if n < 1000:
        raise DomainError("n must be at least 1e3")
    v = np.asarray(v, dtype=float)
    signs = np.where(rng.integers(0, 2, size=n) == 0, 1.0, -1.0)
    zx = -params.s * signs * v[1]
    zy = params.s * signs * v[0]
    px = v[0] + zx - q_form.center[0]
    py = v[1] + zy - q_form.center[1]
    A = q_form.A
    vals = (
        A[0, 0] * px * px
        + 2.0 * A[0, 1] * px * py
        + A[1, 1] * py * py
        + q_form.xi[0] * px
        + q_form.xi[1] * py
    )
    est = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return est, stderr


def delta_inf_psi0(q_form, params):
    """Gradient-direction second derivative of psi at the origin:
    2 xi^T B xi / |xi|^2."""
    xi = q_form.xi
    nrm2 = float(xi @ xi)
    if nrm2 == 0.0:
        raise DomainError("undefined for zero xi")
    B = noise_matrix(q_form, params)
    return 2.0 * float(xi @ B @ xi) / nrm2
