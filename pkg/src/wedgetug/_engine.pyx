# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled game-stepping kernel.

Scalar per-trajectory mirror of the pure-Python engine: the same counter-based
bit stream, the same floating-point expression order (the build disables FMA
contraction), so both backends produce identical trajectories.  The hot loop
runs without the GIL; callers parallelize over disjoint trajectory ranges.
"""

from libc.math cimport sqrt, pow, fabs
from libc.stdint cimport uint64_t, int64_t, uint8_t

DEF KIND_WEDGE = 0
DEF KIND_HALF_PLANE = 1
DEF KIND_PARABOLA = 2

DEF STRAT_NULL = 0
DEF STRAT_AXIS = 1
DEF STRAT_NEG_GRAD = 2
DEF STRAT_POS_GRAD = 3

DEF GOLDEN_ITERS = 80

cdef uint64_t M0 = 0xD2E7470EE14C6C93ULL
cdef uint64_t M1 = 0xCA5A826395121157ULL
cdef uint64_t W0 = 0x9E3779B97F4A7C15ULL
cdef uint64_t W1 = 0xBB67AE8584CAA73BULL
cdef uint64_t MASK32 = 0xFFFFFFFFULL


cdef inline void _mulhilo(uint64_t a, uint64_t b, uint64_t* hi, uint64_t* lo) noexcept nogil:
    cdef uint64_t ah = a >> 32
    cdef uint64_t al = a & MASK32
    cdef uint64_t bh = b >> 32
    cdef uint64_t bl = b & MASK32
    cdef uint64_t t = al * bl
    cdef uint64_t w = ah * bl + (t >> 32)
    cdef uint64_t u = al * bh + (w & MASK32)
    lo[0] = a * b
    hi[0] = ah * bh + (w >> 32) + (u >> 32)


cdef inline void _philox_block(uint64_t block, uint64_t traj, uint64_t key0, uint64_t key1,
                               uint64_t* out) noexcept nogil:
    cdef uint64_t c0 = block, c1 = traj, c2 = 0, c3 = 0
    cdef uint64_t k0 = key0, k1 = key1
    cdef uint64_t hi0, lo0, hi1, lo1, n0, n1, n2, n3
    cdef int r
    for r in range(10):
        _mulhilo(M0, c0, &hi0, &lo0)
        _mulhilo(M1, c2, &hi1, &lo1)
        n0 = hi1 ^ c1 ^ k0
        n1 = lo1
        n2 = hi0 ^ c3 ^ k1
        n3 = lo0
        c0 = n0; c1 = n1; c2 = n2; c3 = n3
        k0 = k0 + W0
        k1 = k1 + W1
    out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3


# -- geometry (mirrors _geometry.py) -----------------------------------------

cdef inline double _parab_sq(double A, double g, double x, double yabs, double t) noexcept nogil:
    cdef double dx = x - t
    cdef double dy = yabs - A * pow(t, g)
    return dx * dx + dy * dy


cdef double _parabola_dist(double A, double g, double x, double y) noexcept nogil:
    cdef double yabs = fabs(y)
    cdef double xm = x if x > 0.0 else 0.0
    cdef double d0 = fabs(A * pow(xm, g) - yabs)
    cdef double lo = x - d0
    if lo < 0.0:
        lo = 0.0
    cdef double hi = x + d0
    cdef double invphi = (sqrt(5.0) - 1.0) / 2.0
    cdef double invphi2 = (3.0 - sqrt(5.0)) / 2.0
    cdef double h = hi - lo
    cdef double c = lo + invphi2 * h
    cdef double d = lo + invphi * h
    cdef double fc = _parab_sq(A, g, x, yabs, c)
    cdef double fd = _parab_sq(A, g, x, yabs, d)
    cdef int it
    for it in range(GOLDEN_ITERS):
        if fc < fd:
            hi = d
        else:
            lo = c
        h = hi - lo
        c = lo + invphi2 * h
        d = lo + invphi * h
        fc = _parab_sq(A, g, x, yabs, c)
        fd = _parab_sq(A, g, x, yabs, d)
    cdef double tm = 0.5 * (lo + hi)
    return sqrt(_parab_sq(A, g, x, yabs, tm))


cdef double _dist(int kind, double* par, double x, double y) noexcept nogil:
    cdef double relx, t1, t2, d1, d2, q
    if kind == KIND_WEDGE:
        relx = x - par[0]
        t1 = relx * par[1] + y * par[2]
        if t1 < 0.0:
            t1 = 0.0
        d1 = sqrt((relx - t1 * par[1]) * (relx - t1 * par[1]) + (y - t1 * par[2]) * (y - t1 * par[2]))
        t2 = relx * par[3] + y * par[4]
        if t2 < 0.0:
            t2 = 0.0
        d2 = sqrt((relx - t2 * par[3]) * (relx - t2 * par[3]) + (y - t2 * par[4]) * (y - t2 * par[4]))
        return d1 if d1 < d2 else d2
    if kind == KIND_HALF_PLANE:
        return x - par[0]
    return _parabola_dist(par[0], par[1], x, y)


cdef void _nearest_boundary(int kind, double* par, double x, double y,
                            double* bx, double* by) noexcept nogil:
    cdef double relx, t1, t2, b1x, b1y, b2x, b2y, d1, d2
    cdef double A, g, yabs, d0, lo, hi, invphi, invphi2, h, c, d, fc, fd, tm, yv
    cdef int it
    if kind == KIND_WEDGE:
        relx = x - par[0]
        t1 = relx * par[1] + y * par[2]
        if t1 < 0.0:
            t1 = 0.0
        b1x = par[0] + t1 * par[1]
        b1y = t1 * par[2]
        t2 = relx * par[3] + y * par[4]
        if t2 < 0.0:
            t2 = 0.0
        b2x = par[0] + t2 * par[3]
        b2y = t2 * par[4]
        d1 = (x - b1x) * (x - b1x) + (y - b1y) * (y - b1y)
        d2 = (x - b2x) * (x - b2x) + (y - b2y) * (y - b2y)
        if d1 <= d2:
            bx[0] = b1x; by[0] = b1y
        else:
            bx[0] = b2x; by[0] = b2y
        return
    if kind == KIND_HALF_PLANE:
        bx[0] = par[0]; by[0] = y
        return
    A = par[0]; g = par[1]
    yabs = fabs(y)
    d0 = fabs(A * pow(x if x > 0.0 else 0.0, g) - yabs)
    lo = x - d0
    if lo < 0.0:
        lo = 0.0
    hi = x + d0
    invphi = (sqrt(5.0) - 1.0) / 2.0
    invphi2 = (3.0 - sqrt(5.0)) / 2.0
    h = hi - lo
    c = lo + invphi2 * h
    d = lo + invphi * h
    fc = _parab_sq(A, g, x, yabs, c)
    fd = _parab_sq(A, g, x, yabs, d)
    for it in range(GOLDEN_ITERS):
        if fc < fd:
            hi = d
        else:
            lo = c
        h = hi - lo
        c = lo + invphi2 * h
        d = lo + invphi * h
        fc = _parab_sq(A, g, x, yabs, c)
        fd = _parab_sq(A, g, x, yabs, d)
    tm = 0.5 * (lo + hi)
    yv = A * pow(tm, g)
    bx[0] = tm
    by[0] = yv if y >= 0.0 else -yv


cdef void _directional_boundary(int kind, double* par, double x, double y, double radius,
                                double ux, double uy, double* bx, double* by) noexcept nogil:
    cdef double h, under, halfw, relx, t_star, qx, qy, perp2, t_lo, t_hi, score
    cdef double best_score, cx, cy, t, dx, dy
    cdef int ray, which, found
    if kind == KIND_HALF_PLANE:
        h = x - par[0]
        under = radius * radius - h * h
        halfw = sqrt(under) if under > 0.0 else 0.0
        bx[0] = par[0]
        if uy > 0.0:
            by[0] = y + halfw
        elif uy < 0.0:
            by[0] = y - halfw
        else:
            by[0] = y
        return
    if kind == KIND_WEDGE:
        best_score = -1e308
        found = 0
        relx = x - par[0]
        for ray in range(2):
            if ray == 0:
                dx = par[1]; dy = par[2]
            else:
                dx = par[3]; dy = par[4]
            t_star = relx * dx + y * dy
            qx = relx - t_star * dx
            qy = y - t_star * dy
            perp2 = qx * qx + qy * qy
            under = radius * radius - perp2
            if under < 0.0:
                continue
            halfw = sqrt(under)
            t_lo = t_star - halfw
            if t_lo < 0.0:
                t_lo = 0.0
            t_hi = t_star + halfw
            if t_hi < 0.0:
                continue
            for which in range(2):
                t = t_lo if which == 0 else t_hi
                cx = par[0] + t * dx
                cy = t * dy
                score = ux * cx + uy * cy
                if score > best_score:
                    best_score = score
                    bx[0] = cx
                    by[0] = cy
                    found = 1
        if found == 0:
            _nearest_boundary(kind, par, x, y, bx, by)
        return
    _nearest_boundary(kind, par, x, y, bx, by)


# -- strategy moves ------------------------------------------------------------

cdef inline void _grad_field(double w_max, double inv_dw, double[:, ::1] coef,
                             double x, double y, double* gx, double* gy) noexcept nogil:
    # angular factor tabulated in w = sin^2(theta) = y^2/r^2; pure arithmetic
    cdef double r2 = x * x + y * y
    cdef double w = (y * y) / r2
    if w > w_max:
        w = w_max
    cdef double s2t = 2.0 * x * y / r2
    cdef double pos = w * inv_dw
    cdef Py_ssize_t i = <Py_ssize_t> pos
    cdef Py_ssize_t nseg = coef.shape[0]
    if i > nseg - 1:
        i = nseg - 1
    cdef double xi = pos - i
    cdef double c0 = coef[i, 0], c1 = coef[i, 1], c2 = coef[i, 2], c3 = coef[i, 3]
    cdef double f = ((c3 * xi + c2) * xi + c1) * xi + c0
    cdef double dfdw = ((3.0 * c3 * xi + 2.0 * c2) * xi + c1) * inv_dw
    cdef double fp = dfdw * s2t
    gx[0] = 2.0 * f * x - fp * y
    gy[0] = 2.0 * f * y + fp * x


cdef inline void _move(int kind, double mvx, double mvy,
                       double w_max, double inv_dw, double[:, ::1] coef,
                       double eps, double x, double y,
                       double* vx, double* vy) noexcept nogil:
    cdef double gx, gy, nrm, scale
    if kind == STRAT_NULL:
        vx[0] = 0.0
        vy[0] = 0.0
        return
    if kind == STRAT_AXIS:
        vx[0] = mvx
        vy[0] = mvy
        return
    _grad_field(w_max, inv_dw, coef, x, y, &gx, &gy)
    nrm = sqrt(gx * gx + gy * gy)
    if nrm == 0.0:
        nrm = 1.0
    scale = (eps / nrm) if kind == STRAT_POS_GRAD else (-eps / nrm)
    vx[0] = gx * scale
    vy[0] = gy * scale


def run(int dom_kind, double[::1] dom_par, double eps, double s, double alpha,
        int kind_I, double mIx, double mIy,
        double wmax_I, double invdw_I, double[:, ::1] coef_I,
        int kind_II, double mIIx, double mIIy,
        double wmax_II, double invdw_II, double[:, ::1] coef_II,
        double start_x, double start_y,
        Py_ssize_t n, uint64_t traj_start, int64_t max_steps,
        uint64_t key0, uint64_t key1,
        int64_t[::1] steps_out, uint8_t[::1] censored_out, double[:, ::1] exit_out):
    """Run trajectories [traj_start, traj_start+n); fill the output slices."""
    cdef double par[6]
    cdef int j2
    for j2 in range(6):
        par[j2] = dom_par[j2]
    cdef double thresh = alpha * eps
    cdef double dirIx = mIx / eps, dirIy = mIy / eps
    cdef double dirIIx = mIIx / eps, dirIIy = mIIy / eps

    cdef Py_ssize_t j
    cdef int64_t k
    cdef uint64_t buf[4]
    cdef uint64_t word, chunk, traj
    cdef int coin
    cdef double sgn, px, py, d, vx, vy, bx, by
    cdef int w_kind
    cdef double w_dx, w_dy

    with nogil:
        for j in range(n):
            traj = traj_start + <uint64_t> j
            px = start_x
            py = start_y
            k = 0
            while k < max_steps:
                if (k & 127) == 0:
                    _philox_block(<uint64_t> (k >> 7), traj, key0, key1, buf)
                word = buf[(k >> 5) & 3]
                chunk = word >> (2 * (k & 31))
                coin = <int> (chunk & 1)
                sgn = -1.0 if (chunk & 2) != 0 else 1.0

                d = _dist(dom_kind, par, px, py)
                if d <= thresh:
                    if coin:
                        w_kind = kind_I; w_dx = dirIx; w_dy = dirIy
                    else:
                        w_kind = kind_II; w_dx = dirIIx; w_dy = dirIIy
                    if w_kind == STRAT_AXIS:
                        _directional_boundary(dom_kind, par, px, py, thresh, w_dx, w_dy, &bx, &by)
                    else:
                        _nearest_boundary(dom_kind, par, px, py, &bx, &by)
                    steps_out[j] = k + 1
                    censored_out[j] = 0
                    exit_out[j, 0] = bx
                    exit_out[j, 1] = by
                    break

                if coin:
                    _move(kind_I, mIx, mIy, wmax_I, invdw_I, coef_I, eps, px, py, &vx, &vy)
                else:
                    _move(kind_II, mIIx, mIIy, wmax_II, invdw_II, coef_II, eps, px, py, &vx, &vy)
                px = px + vx - sgn * s * vy
                py = py + vy + sgn * s * vx
                k = k + 1
            else:
                steps_out[j] = max_steps
                censored_out[j] = 1
                exit_out[j, 0] = px
                exit_out[j, 1] = py


def philox_words(uint64_t block, uint64_t traj, uint64_t key0, uint64_t key1):
    """Expose the kernel's counter-based words for parity tests."""
    cdef uint64_t buf[4]
    _philox_block(block, traj, key0, key1, buf)
    return buf[0], buf[1], buf[2], buf[3]
