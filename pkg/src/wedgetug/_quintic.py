"""Piecewise quintic Hermite interpolation from (value, slope, curvature) nodes.

The interpolant is globally C^2 and reproduces quintic polynomials segment by
segment.  Because evaluation returns derivatives of the *same* piecewise
polynomial, finite-difference probes of an interpolated field stay consistent
with its analytically chained derivatives to interpolation accuracy.
"""

import numpy as np


def hermite_quintic_coeffs(x, f, d, s):
    """Coefficient table for the quintic with nodal data (f, f', f'').

    Returns an (n-1, 6) array of polynomial coefficients in the scaled local
    variable xi = (t - x[i]) / h_i with xi in [0, 1].
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    d = np.asarray(d, dtype=float)
    s = np.asarray(s, dtype=float)
    h = np.diff(x)
    if np.any(h <= 0.0):
        raise ValueError("nodes must be strictly increasing")
    f0, f1 = f[:-1], f[1:]
    d0, d1 = d[:-1] * h, d[1:] * h
    s0, s1 = s[:-1] * h * h, s[1:] * h * h
    A = f1 - f0 - d0 - 0.5 * s0
    B = d1 - d0 - s0
    C = s1 - s0
    co = np.empty((h.size, 6))
    co[:, 0] = f0
    co[:, 1] = d0
    co[:, 2] = 0.5 * s0
    co[:, 3] = 10.0 * A - 4.0 * B + 0.5 * C
    co[:, 4] = -15.0 * A + 7.0 * B - C
    co[:, 5] = 6.0 * A - 3.0 * B + 0.5 * C
    return co


def hermite_cubic_coeffs(x, f, d):
    """Coefficient table (n-1, 4) for the cubic Hermite with nodal (f, f')."""
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    d = np.asarray(d, dtype=float)
    h = np.diff(x)
    if np.any(h <= 0.0):
        raise ValueError("nodes must be strictly increasing")
    f0, f1 = f[:-1], f[1:]
    d0, d1 = d[:-1] * h, d[1:] * h
    delta = f1 - f0
    co = np.empty((h.size, 4))
    co[:, 0] = f0
    co[:, 1] = d0
    co[:, 2] = 3.0 * delta - 2.0 * d0 - d1
    co[:, 3] = -2.0 * delta + d0 + d1
    return co


def hermite_quintic_eval(x, coeffs, t, nu=0):
    """Evaluate the interpolant (or its nu-th derivative, nu <= 3) at t.

    Arguments outside [x[0], x[-1]] are extrapolated with the boundary
    segment's polynomial; callers enforce their own domain limits.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    tt = np.atleast_1d(t)
    i = np.clip(np.searchsorted(x, tt, side="right") - 1, 0, len(x) - 2)
    h = x[i + 1] - x[i]
    xi = (tt - x[i]) / h
    c = coeffs[i]
    if nu == 0:
        val = ((((c[:, 5] * xi + c[:, 4]) * xi + c[:, 3]) * xi + c[:, 2]) * xi + c[:, 1]) * xi + c[:, 0]
    elif nu == 1:
        val = ((((5.0 * c[:, 5] * xi + 4.0 * c[:, 4]) * xi + 3.0 * c[:, 3]) * xi + 2.0 * c[:, 2]) * xi + c[:, 1]) / h
    elif nu == 2:
        val = (((20.0 * c[:, 5] * xi + 12.0 * c[:, 4]) * xi + 6.0 * c[:, 3]) * xi + 2.0 * c[:, 2]) / (h * h)
    elif nu == 3:
        val = ((60.0 * c[:, 5] * xi + 24.0 * c[:, 4]) * xi + 6.0 * c[:, 3]) / (h * h * h)
    else:
        raise ValueError("nu must be 0, 1, 2 or 3")
    return float(val[0]) if scalar else val
