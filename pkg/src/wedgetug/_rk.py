"""Adaptive embedded Runge-Kutta marcher (Dormand-Prince 5(4)) for scalar ODEs.

Kept in-house for two reasons: the step budget must be enforced exactly, and
every accepted node (with exact slope data from the right-hand side) feeds a
quintic dense representation downstream.  Targets are hit exactly by clipping
the step size, so no interpolation error enters at requested points.
"""

from .errors import ConvergenceError

_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


def integrate(f, t0, t_end, y0, rtol, atol, max_steps, targets=()):
    """March y' = f(t, y) from t0 to t_end > t0.

    Returns (nodes_t, nodes_y, target_values).  nodes are the accepted step
    endpoints (including t0 and t_end); target_values[i] is y at targets[i],
    which must be sorted and inside (t0, t_end].  Both accepted and rejected
    steps count against max_steps.
    """
    if t_end <= t0:
        raise ValueError("t_end must exceed t0")
    targets = list(targets)
    tgt_i = 0
    tgt_vals = [None] * len(targets)

    t, y = t0, y0
    nodes_t, nodes_y = [t0], [y0]
    k1 = f(t, y)
    span = t_end - t0
    # modest first step; the controller adapts within a few trials
    h = min(0.01 * span, span)
    n_attempts = 0
    while t < t_end - 1e-14 * span:
        if n_attempts >= max_steps:
            raise ConvergenceError(
                f"step budget of {max_steps} exhausted at t={t:.6g} (of {t_end:.6g})"
            )
        n_attempts += 1
        h = min(h, t_end - t)
        if tgt_i < len(targets):
            h = min(h, targets[tgt_i] - t)
        h = max(h, 1e-14 * span)

        k2 = f(t + _A21 * h, y + h * (_A21 * k1))
        k3 = f(t + 0.3 * h, y + h * (_A31 * k1 + _A32 * k2))
        k4 = f(t + 0.8 * h, y + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = f(t + (8.0 / 9.0) * h, y + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = f(t + h, y + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        y_new = y + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = f(t + h, y_new)

        err = h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        scale = atol + rtol * max(abs(y), abs(y_new))
        ratio = abs(err) / scale if scale > 0.0 else 0.0

        if ratio <= 1.0:
            t_new = t + h
            t, y, k1 = t_new, y_new, k7
            nodes_t.append(t)
            nodes_y.append(y)
            if tgt_i < len(targets) and t >= targets[tgt_i] - 1e-14 * span:
                tgt_vals[tgt_i] = y
                tgt_i += 1
            grow = 5.0 if ratio == 0.0 else min(5.0, 0.9 * ratio ** -0.2)
            h *= grow
        else:
            h *= max(0.2, 0.9 * ratio ** -0.2)
    if tgt_i < len(targets):
        # only possible through roundoff at the final target
        for j in range(tgt_i, len(targets)):
            tgt_vals[j] = y
    return nodes_t, nodes_y, tgt_vals
