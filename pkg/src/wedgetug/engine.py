"""Backend selection and the batch-run surface of the game engine.

The compiled kernel is used when the extension built; otherwise the NumPy
fallback runs the same algorithm.  WEDGETUG_ENGINE=python|cython forces a
backend.  Both consume identical counter-based bit streams, so estimates do
not depend on the backend or the worker count.
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _engine_py
from ._quintic import hermite_cubic_coeffs
from .errors import DomainError

_FORCED = os.environ.get("WEDGETUG_ENGINE", "").strip().lower()
_cy = None
if _FORCED in ("", "cython"):
    try:
        from . import _engine as _cy  # compiled extension
    except ImportError:
        _cy = None
    if _FORCED == "cython" and _cy is None:
        raise ImportError("WEDGETUG_ENGINE=cython but the compiled kernel is unavailable")

BACKEND = "cython" if _cy is not None else "python"

_STRAT_CODES = {
    "null": _engine_py.STRAT_NULL,
    "pull_axis": _engine_py.STRAT_AXIS,
    "pull_neg_grad_u": _engine_py.STRAT_NEG_GRAD,
    "pull_pos_grad_u": _engine_py.STRAT_POS_GRAD,
}

_EMPTY_PACK = (0.0, 1.0, np.zeros((1, 4)))


def available_backends():
    return ("cython", "python") if _cy is not None else ("python",)


def profile_pack(profile, n_seg=2048):
    """In-kernel table for the angular factor, parametrized by w = sin^2(theta).

    The factor is even in theta, so f = F(w) with w = y^2/r^2 and
    f'(theta) = F'(w) sin(2 theta), sin(2 theta) = 2 x y / r^2: the kernels
    evaluate gradients with +,*,/ only, which keeps the compiled and NumPy
    backends bit-identical (library transcendentals differ by ulps).
    """
    w_max = math.sin(profile.theta_a) ** 2
    w = np.linspace(0.0, w_max, n_seg + 1)
    th = np.arcsin(np.sqrt(w))
    f = np.atleast_1d(profile.f(th))
    fp = np.atleast_1d(profile.fp(th))
    s2t = np.sin(2.0 * th)
    dfdw = np.empty_like(f)
    dfdw[0] = 0.5 * float(np.atleast_1d(profile.fpp(0.0))[0])  # limit of f'/sin(2 theta)
    dfdw[1:] = fp[1:] / s2t[1:]
    coef = np.ascontiguousarray(hermite_cubic_coeffs(w, f, dfdw))
    return (w_max, n_seg / w_max, coef)


@dataclass
class EngineSpec:
    """Plain-array description of one simulation cell."""

    dom_kind: int
    dom_par: np.ndarray
    eps: float
    s: float
    alpha: float
    kind_I: int
    move_I: tuple
    pack_I: tuple
    kind_II: int
    move_II: tuple
    pack_II: tuple
    start: tuple
    max_steps: int
    key0: int
    key1: int


def build_spec(domain, params, strategy_I, strategy_II, start, max_steps, seed, cell_index):
    """Translate API objects into the plain-array engine spec."""

    def one(strategy):
        if strategy.kind not in _STRAT_CODES:
            raise DomainError(f"strategy kind {strategy.kind!r} is not engine-capable")
        code = _STRAT_CODES[strategy.kind]
        if code == _engine_py.STRAT_AXIS:
            d = strategy.direction
            return code, (params.eps * d[0], params.eps * d[1]), _EMPTY_PACK
        if code in (_engine_py.STRAT_NEG_GRAD, _engine_py.STRAT_POS_GRAD):
            pack = getattr(strategy.solution, "_engine_pack", None)
            if pack is None:
                pack = profile_pack(strategy.solution.profile)
                strategy.solution._engine_pack = pack
            return code, (0.0, 0.0), pack
        return code, (0.0, 0.0), _EMPTY_PACK

    kind_I, move_I, pack_I = one(strategy_I)
    kind_II, move_II, pack_II = one(strategy_II)
    dom_par = np.ascontiguousarray(domain.params, dtype=float)
    return EngineSpec(
        dom_kind=domain.kind,
        dom_par=dom_par,
        eps=params.eps,
        s=params.s,
        alpha=params.alpha,
        kind_I=kind_I,
        move_I=move_I,
        pack_I=pack_I,
        kind_II=kind_II,
        move_II=move_II,
        pack_II=pack_II,
        start=(float(start[0]), float(start[1])),
        max_steps=int(max_steps),
        key0=int(seed) & 0xFFFFFFFFFFFFFFFF,
        key1=int(cell_index) & 0xFFFFFFFFFFFFFFFF,
    )


def run_batch(spec, traj_start, n, backend=None, out=None):
    """Run n trajectories starting at global index traj_start.

    Returns (steps, censored, exit_points); censored trajectories report
    max_steps and NaN exit points.  `out` may supply preallocated slices.
    """
    if out is None:
        steps = np.zeros(n, dtype=np.int64)
        censored = np.zeros(n, dtype=np.uint8)
        exit_xy = np.full((n, 2), np.nan)
    else:
        steps, censored, exit_xy = out
    use = backend or BACKEND
    if use == "cython" and _cy is None:
        raise DomainError("compiled backend requested but unavailable")
    if use == "cython":
        _cy.run(
            spec.dom_kind,
            spec.dom_par,
            spec.eps,
            spec.s,
            spec.alpha,
            spec.kind_I,
            spec.move_I[0],
            spec.move_I[1],
            spec.pack_I[0],
            spec.pack_I[1],
            spec.pack_I[2],
            spec.kind_II,
            spec.move_II[0],
            spec.move_II[1],
            spec.pack_II[0],
            spec.pack_II[1],
            spec.pack_II[2],
            spec.start[0],
            spec.start[1],
            n,
            traj_start,
            spec.max_steps,
            spec.key0,
            spec.key1,
            steps,
            censored,
            exit_xy,
        )
    elif use == "python":
        _engine_py.run(
            spec.dom_kind,
            spec.dom_par,
            spec.eps,
            spec.s,
            spec.alpha,
            spec.kind_I,
            spec.move_I,
            spec.pack_I,
            spec.kind_II,
            spec.move_II,
            spec.pack_II,
            spec.start,
            n,
            traj_start,
            spec.max_steps,
            spec.key0,
            spec.key1,
            steps,
            censored,
            exit_xy,
        )
    else:
        raise DomainError(f"unknown backend {use!r}")
    return steps, censored, exit_xy
