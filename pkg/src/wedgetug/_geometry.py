"""Domain geometry shared by the Domain API and the pure-Python engine.

Vectorized distance functions drive the per-step boundary test; scalar
boundary-point selectors handle the (rare) terminal moves.  The compiled
kernel mirrors these formulas operation for operation, so keep the floating
point order of every expression stable.
"""

import math

import numpy as np

KIND_WEDGE = 0
KIND_HALF_PLANE = 1
KIND_PARABOLA = 2

_GOLDEN_ITERS = 80


def wedge_params(eta, translation):
    """[apex_x, dlx, dly, dux, duy, half] for a wedge of aperture eta."""
    half = eta / 2.0
    return np.array(
        [translation, math.cos(-half), math.sin(-half), math.cos(half), math.sin(half), half]
    )


def half_plane_params(translation):
    return np.array([translation, 0.0, 0.0, 0.0, 0.0, 0.0])


def parabola_params(amplitude, exponent):
    return np.array([amplitude, exponent, 0.0, 0.0, 0.0, 0.0])


# -- distance to the boundary (vectorized) ----------------------------------

def wedge_dist(par, x, y):
    relx = x - par[0]
    rely = y
    t1 = relx * par[1] + rely * par[2]
    t1 = np.maximum(t1, 0.0)
    d1 = np.sqrt((relx - t1 * par[1]) ** 2 + (rely - t1 * par[2]) ** 2)
    t2 = relx * par[3] + rely * par[4]
    t2 = np.maximum(t2, 0.0)
    d2 = np.sqrt((relx - t2 * par[3]) ** 2 + (rely - t2 * par[4]) ** 2)
    return np.minimum(d1, d2)


def half_plane_dist(par, x, y):
    return x - par[0]


def _parabola_sq_dist(A, g, x, yabs, t):
    dx = x - t
    dy = yabs - A * np.power(t, g)
    return dx * dx + dy * dy


def parabola_dist(par, x, y):
    """Distance to |y| = A x^gamma by fixed-count golden-section search.

    The curve is concave, so interior points project uniquely; the bracket
    [max(0, x - d0), x + d0] always contains the minimizer, where d0 is the
    vertical gap to the curve.
    """
    A, g = par[0], par[1]
    x = np.asarray(x, dtype=float)
    yabs = np.abs(np.asarray(y, dtype=float))
    d0 = np.abs(A * np.power(np.maximum(x, 0.0), g) - yabs)
    lo = np.maximum(x - d0, 0.0)
    hi = x + d0
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    invphi2 = (3.0 - math.sqrt(5.0)) / 2.0
    h = hi - lo
    c = lo + invphi2 * h
    d = lo + invphi * h
    fc = _parabola_sq_dist(A, g, x, yabs, c)
    fd = _parabola_sq_dist(A, g, x, yabs, d)
    for _ in range(_GOLDEN_ITERS):
        take_c = fc < fd
        hi = np.where(take_c, d, hi)
        lo = np.where(take_c, lo, c)
        h = hi - lo
        c = lo + invphi2 * h
        d = lo + invphi * h
        fc = _parabola_sq_dist(A, g, x, yabs, c)
        fd = _parabola_sq_dist(A, g, x, yabs, d)
    tm = 0.5 * (lo + hi)
    return np.sqrt(_parabola_sq_dist(A, g, x, yabs, tm))


def dist(kind, par, x, y):
    if kind == KIND_WEDGE:
        return wedge_dist(par, x, y)
    if kind == KIND_HALF_PLANE:
        return half_plane_dist(par, x, y)
    return parabola_dist(par, x, y)


# -- membership --------------------------------------------------------------

def contains(kind, par, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if kind == KIND_WEDGE:
        relx = x - par[0]
        r = np.sqrt(relx * relx + y * y)
        ang = np.arctan2(y, relx)
        return (r > 0.0) & (np.abs(ang) < par[5])
    if kind == KIND_HALF_PLANE:
        return x > par[0]
    A, g = par[0], par[1]
    return (x > 0.0) & (np.abs(y) < A * np.power(np.maximum(x, 0.0), g))


# -- terminal boundary moves (scalar) ----------------------------------------

def _nearest_on_ray(apex_x, dx, dy, x, y):
    relx = x - apex_x
    rely = y
    t = relx * dx + rely * dy
    if t < 0.0:
        t = 0.0
    return apex_x + t * dx, t * dy


def nearest_boundary(kind, par, x, y):
    """Closest boundary point (scalar)."""
    if kind == KIND_WEDGE:
        b1x, b1y = _nearest_on_ray(par[0], par[1], par[2], x, y)
        b2x, b2y = _nearest_on_ray(par[0], par[3], par[4], x, y)
        d1 = (x - b1x) ** 2 + (y - b1y) ** 2
        d2 = (x - b2x) ** 2 + (y - b2y) ** 2
        return (b1x, b1y) if d1 <= d2 else (b2x, b2y)
    if kind == KIND_HALF_PLANE:
        return par[0], y
    A, g = par[0], par[1]
    yabs = abs(y)
    d0 = abs(A * math.pow(max(x, 0.0), g) - yabs)
    lo = max(x - d0, 0.0)
    hi = x + d0
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    invphi2 = (3.0 - math.sqrt(5.0)) / 2.0
    h = hi - lo
    c = lo + invphi2 * h
    d = lo + invphi * h
    fc = _parabola_sq_dist(A, g, x, yabs, c)
    fd = _parabola_sq_dist(A, g, x, yabs, d)
    for _ in range(_GOLDEN_ITERS):
        if fc < fd:
            hi = d
        else:
            lo = c
        h = hi - lo
        c = lo + invphi2 * h
        d = lo + invphi * h
        fc = _parabola_sq_dist(A, g, x, yabs, c)
        fd = _parabola_sq_dist(A, g, x, yabs, d)
    tm = 0.5 * (lo + hi)
    by = A * math.pow(tm, g)
    return tm, by if y >= 0.0 else -by


def directional_boundary(kind, par, x, y, radius, ux, uy):
    """Boundary point within `radius` of (x, y) maximizing the dot product
    with direction (ux, uy); falls back to the nearest point."""
    if kind == KIND_HALF_PLANE:
        h = x - par[0]
        under = radius * radius - h * h
        half = math.sqrt(under) if under > 0.0 else 0.0
        if uy > 0.0:
            return par[0], y + half
        if uy < 0.0:
            return par[0], y - half
        return par[0], y
    if kind == KIND_WEDGE:
        best = None
        best_score = -math.inf
        for dx, dy in ((par[1], par[2]), (par[3], par[4])):
            relx = x - par[0]
            rely = y
            t_star = relx * dx + rely * dy
            qx = relx - t_star * dx
            qy = rely - t_star * dy
            perp2 = qx * qx + qy * qy
            under = radius * radius - perp2
            if under < 0.0:
                continue
            halfw = math.sqrt(under)
            t_lo = t_star - halfw
            if t_lo < 0.0:
                t_lo = 0.0
            t_hi = t_star + halfw
            if t_hi < 0.0:
                continue
            for t in (t_lo, t_hi):
                bx = par[0] + t * dx
                by = t * dy
                score = ux * bx + uy * by
                if score > best_score:
                    best_score = score
                    best = (bx, by)
        if best is None:
            best = nearest_boundary(kind, par, x, y)
        return best
    return nearest_boundary(kind, par, x, y)
