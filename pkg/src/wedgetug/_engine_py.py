"""Pure-Python (NumPy) game engine.

Vectorizes over the surviving trajectories of a batch, advancing all of them
in lockstep through the shared step index so each trajectory consumes its own
counter-based bit stream at fixed offsets.  Mirrors the compiled kernel
operation for operation; the two backends produce identical trajectories.
"""

import numpy as np

from . import _geometry as geom
from ._philox import philox_block

STRAT_NULL = 0
STRAT_AXIS = 1
STRAT_NEG_GRAD = 2
STRAT_POS_GRAD = 3

_U1 = np.uint64(1)
_U2 = np.uint64(2)


def _grad_field(pack, x, y):
    """(u_x, u_y) of the attached wedge solution at (x, y), vectorized.

    u_x = 2 f x - f' y, u_y = 2 f y + f' x, with the angular factor tabulated
    in w = sin^2(theta) = y^2/r^2 and f' = F'(w) * (2 x y / r^2).  Pure
    arithmetic: no transcendentals, so backends agree bit for bit.
    """
    w_max, inv_dw, coef = pack
    r2 = x * x + y * y
    w = (y * y) / r2
    w = np.minimum(w, w_max)
    s2t = 2.0 * x * y / r2
    pos = w * inv_dw
    i = pos.astype(np.int64)
    nseg = coef.shape[0]
    i = np.minimum(i, nseg - 1)
    xi = pos - i
    c = coef[i]
    f = ((c[:, 3] * xi + c[:, 2]) * xi + c[:, 1]) * xi + c[:, 0]
    dfdw = ((3.0 * c[:, 3] * xi + 2.0 * c[:, 2]) * xi + c[:, 1]) * inv_dw
    fp = dfdw * s2t
    gx = 2.0 * f * x - fp * y
    gy = 2.0 * f * y + fp * x
    return gx, gy


def _moves(kind, mvx, mvy, pack, eps, x, y):
    """Control vectors for one player at positions (x, y)."""
    if kind == STRAT_NULL:
        z = np.zeros_like(x)
        return z, z.copy()
    if kind == STRAT_AXIS:
        return np.full_like(x, mvx), np.full_like(x, mvy)
    gx, gy = _grad_field(pack, x, y)
    nrm = np.sqrt(gx * gx + gy * gy)
    nrm = np.where(nrm == 0.0, 1.0, nrm)
    scale = (eps / nrm) if kind == STRAT_POS_GRAD else (-eps / nrm)
    return gx * scale, gy * scale


def run(
    dom_kind,
    dom_par,
    eps,
    s,
    alpha,
    kind_I,
    move_I,
    pack_I,
    kind_II,
    move_II,
    pack_II,
    start,
    n,
    traj_start,
    max_steps,
    key0,
    key1,
    steps_out,
    censored_out,
    exit_out,
):
    """Run trajectories [traj_start, traj_start + n); fill the output slices."""
    ids = np.arange(traj_start, traj_start + n, dtype=np.uint64)
    gidx = np.arange(n)
    px = np.full(n, start[0])
    py = np.full(n, start[1])
    thresh = alpha * eps
    words = None
    k = 0
    exit_out[:, :] = np.nan

    dir_I = (move_I[0] / eps, move_I[1] / eps) if kind_I == STRAT_AXIS else None
    dir_II = (move_II[0] / eps, move_II[1] / eps) if kind_II == STRAT_AXIS else None

    while gidx.size and k < max_steps:
        if k % 128 == 0:
            blk = np.full(gidx.size, k >> 7, dtype=np.uint64)
            words = np.stack(philox_block(blk, ids, key0, key1), axis=1)
        word = words[:, (k >> 5) & 3]
        chunk = word >> np.uint64(2 * (k & 31))
        coin = (chunk & _U1).astype(bool)  # True -> player I moves
        sgn = np.where((chunk & _U2) != 0, -1.0, 1.0)

        d = geom.dist(dom_kind, dom_par, px, py)
        term = d <= thresh
        if term.any():
            for j in np.nonzero(term)[0]:
                if coin[j]:
                    w_kind, w_dir = kind_I, dir_I
                else:
                    w_kind, w_dir = kind_II, dir_II
                if w_kind == STRAT_AXIS:
                    bx, by = geom.directional_boundary(
                        dom_kind, dom_par, px[j], py[j], thresh, w_dir[0], w_dir[1]
                    )
                else:
                    bx, by = geom.nearest_boundary(dom_kind, dom_par, px[j], py[j])
                g = gidx[j]
                steps_out[g] = k + 1
                censored_out[g] = 0
                exit_out[g, 0] = bx
                exit_out[g, 1] = by
            live = ~term
            gidx = gidx[live]
            if gidx.size == 0:
                return
            ids = ids[live]
            px = px[live]
            py = py[live]
            words = words[live]
            coin = coin[live]
            sgn = sgn[live]

        vx = np.empty_like(px)
        vy = np.empty_like(py)
        if coin.any():
            mvx, mvy = _moves(kind_I, move_I[0], move_I[1], pack_I, eps, px[coin], py[coin])
            vx[coin], vy[coin] = mvx, mvy
        ncoin = ~coin
        if ncoin.any():
            mvx, mvy = _moves(kind_II, move_II[0], move_II[1], pack_II, eps, px[ncoin], py[ncoin])
            vx[ncoin], vy[ncoin] = mvx, mvy

        px = px + vx - sgn * s * vy
        py = py + vy + sgn * s * vx
        k += 1

    steps_out[gidx] = max_steps
    censored_out[gidx] = 1
    exit_out[gidx, 0] = px
    exit_out[gidx, 1] = py
