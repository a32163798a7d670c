"""Exit-time estimation over strategy and step-size sweeps.

Trajectories are embarrassingly parallel: every trajectory derives its bit
stream from (seed, cell index, trajectory index) through a counter-based
generator, and aggregation writes by trajectory index, so estimates are
bit-identical across worker counts and backends.  Censored trajectories
(those hitting the step horizon) contribute the horizon as a lower bound and
are reported via censored_fraction, never dropped.
"""

import csv
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import t as _student_t

from . import _engine_py, _geometry as geom, engine
from ._philox import philox_block
from .errors import DomainError
from .game import Domain, GameParams, GameState, Strategy, perp

_NORMAL_CRIT = 1.959963984540054


@dataclass
class SimConfig:
    """One simulation cell: who plays whom, where, at what scale."""

    params: GameParams
    domain: Domain
    strategy_I: Strategy
    strategy_II: Strategy
    start: np.ndarray
    n_traj: int
    max_steps: int
    seed: int
    cell_index: int = 0

    def __post_init__(self):
        self.start = np.asarray(self.start, dtype=float)
        if self.n_traj < 1:
            raise DomainError("n_traj must be at least 1")
        if self.max_steps < 1:
            raise DomainError("max_steps must be at least 1")
        if not self.domain.contains(self.start):
            raise DomainError("start must lie strictly inside the domain")

    def engine_capable(self):
        return self.strategy_I.kind != "custom" and self.strategy_II.kind != "custom"


@dataclass(frozen=True)
class ExitTimeEstimate:
    """Monte Carlo estimate of the exit step count and its scaled version."""

    mean_tau: float
    scaled: float
    ci95: float
    censored_fraction: float
    n_traj: int
    mean_tau_uncensored: Optional[float] = None


def _default_threads():
    env = os.environ.get("WEDGETUG_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _run_cell(cfg, threads=None, backend=None):
    """(steps, censored, exit_points) for all trajectories of a cell."""
    if not cfg.engine_capable():
        steps = np.zeros(cfg.n_traj, dtype=np.int64)
        censored = np.zeros(cfg.n_traj, dtype=np.uint8)
        exit_xy = np.full((cfg.n_traj, 2), np.nan)
        for j in range(cfg.n_traj):
            state, _ = run_trajectory(cfg, j)
            steps[j] = state.step
            censored[j] = 0 if state.terminal else 1
            if state.terminal:
                exit_xy[j] = state.exit_point
            else:
                exit_xy[j] = np.nan
        return steps, censored, exit_xy

    spec = engine.build_spec(
        cfg.domain, cfg.params, cfg.strategy_I, cfg.strategy_II,
        cfg.start, cfg.max_steps, cfg.seed, cfg.cell_index,
    )
    n = cfg.n_traj
    steps = np.zeros(n, dtype=np.int64)
    censored = np.zeros(n, dtype=np.uint8)
    exit_xy = np.full((n, 2), np.nan)
    use = backend or engine.BACKEND
    threads = threads if threads is not None else _default_threads()
    if use != "cython" or threads <= 1 or n < 256:
        engine.run_batch(spec, 0, n, backend=use, out=(steps, censored, exit_xy))
        return steps, censored, exit_xy

    bounds = np.linspace(0, n, threads + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = []
        for w in range(threads):
            lo, hi = bounds[w], bounds[w + 1]
            if hi > lo:
                futures.append(
                    pool.submit(
                        engine.run_batch, spec, int(lo), int(hi - lo),
                        backend=use, out=(steps[lo:hi], censored[lo:hi], exit_xy[lo:hi]),
                    )
                )
        for fut in futures:
            fut.result()
    return steps, censored, exit_xy


def estimate_exit_time(cfg, threads=None, backend=None):
    """Estimate the expected exit step count for one cell.

    Censored trajectories enter the mean at the horizon value (a lower
    bound); the uncensored mean is reported separately.  A fully censored
    cell is flagged with a warning and censored_fraction = 1.
    """
    steps, censored, _ = _run_cell(cfg, threads=threads, backend=backend)
    taus = steps.astype(float)
    n = cfg.n_traj
    mean = float(np.mean(taus))
    if n > 1:
        sd = float(np.std(taus, ddof=1))
        crit = float(_student_t.ppf(0.975, n - 1)) if n < 30 else _NORMAL_CRIT
        ci95 = crit * sd / math.sqrt(n)
    else:
        ci95 = math.inf
    frac = float(np.mean(censored))
    unc = taus[censored == 0]
    mean_unc = float(np.mean(unc)) if unc.size else None
    if frac == 1.0:
        warnings.warn(
            f"cell {cfg.cell_index}: all trajectories censored at {cfg.max_steps} steps; "
            "the estimate is only a lower bound",
            stacklevel=2,
        )
    return ExitTimeEstimate(
        mean_tau=mean,
        scaled=cfg.params.eps**2 * mean,
        ci95=ci95,
        censored_fraction=frac,
        n_traj=n,
        mean_tau_uncensored=mean_unc,
    )


# -- single-trajectory replay (recording) -------------------------------------

def run_trajectory(cfg, traj_index, record=False):
    """Replay one trajectory step by step in Python.

    Consumes exactly the engine's bit stream, and (for engine-capable
    strategies) evaluates moves through the same uniform coefficient table,
    so the replay reproduces the batch engines bit for bit.  Custom
    strategies run here as the only execution path.

    Returns (final GameState, history); history rows are
    (step, x, y, mover, terminal) and are recorded only when record=True.
    """
    params, domain = cfg.params, cfg.domain
    eps, s = params.eps, params.s
    thresh = params.alpha * eps
    key0 = int(cfg.seed) & 0xFFFFFFFFFFFFFFFF
    key1 = int(cfg.cell_index) & 0xFFFFFFFFFFFFFFFF

    caps = cfg.engine_capable()
    if caps:
        spec = engine.build_spec(
            domain, params, cfg.strategy_I, cfg.strategy_II,
            cfg.start, cfg.max_steps, cfg.seed, cfg.cell_index,
        )
        movers = {
            1: (spec.kind_I, spec.move_I, spec.pack_I, cfg.strategy_I),
            0: (spec.kind_II, spec.move_II, spec.pack_II, cfg.strategy_II),
        }

    x, y = float(cfg.start[0]), float(cfg.start[1])
    hist = [(0, x, y, "", 0)] if record else []
    buf = None
    k = 0
    while k < cfg.max_steps:
        if k % 128 == 0:
            buf = philox_block(np.uint64(k >> 7), np.uint64(traj_index), key0, key1)
        word = int(buf[(k >> 5) & 3])
        chunk = word >> (2 * (k & 31))
        coin = chunk & 1
        sgn = -1.0 if (chunk & 2) else 1.0
        mover = "I" if coin else "II"
        strat = cfg.strategy_I if coin else cfg.strategy_II

        d = float(geom.dist(domain.kind, domain.params, x, y))
        if d <= thresh:
            direction = strat.boundary_direction()
            if direction is not None:
                bx, by = geom.directional_boundary(
                    domain.kind, domain.params, x, y, thresh, direction[0], direction[1]
                )
            else:
                bx, by = geom.nearest_boundary(domain.kind, domain.params, x, y)
            if record:
                hist.append((k + 1, bx, by, mover, 1))
            state = GameState(np.array([bx, by]), k + 1, True, np.array([bx, by]))
            return state, hist

        if caps:
            kind, mv, pack, _ = movers[coin]
            vx_a, vy_a = _engine_py._moves(
                kind, mv[0], mv[1], pack, eps, np.array([x]), np.array([y])
            )
            vx, vy = float(vx_a[0]), float(vy_a[0])
        else:
            v = strat.move(np.array([x, y]), params)
            vx, vy = float(v[0]), float(v[1])
        x = x + vx - sgn * s * vy
        y = y + vy + sgn * s * vx
        k += 1
        if record:
            hist.append((k, x, y, mover, 0))
    return GameState(np.array([x, y]), cfg.max_steps, False, None), hist


def dump_trajectory(cfg, traj_index, path):
    """Write one trajectory as CSV: step,x,y,mover,terminal."""
    _, hist = run_trajectory(cfg, traj_index, record=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "x", "y", "mover", "terminal"])
        for step, x, y, mover, term in hist:
            writer.writerow([step, f"{x:.17g}", f"{y:.17g}", mover, term])


# -- sweeps --------------------------------------------------------------------

def make_grid(
    p,
    domain,
    strategy_pairs,
    eps_list,
    n_traj,
    seed,
    start,
    horizon_base=1e7,
    horizon_eps0=0.1,
    horizon_power=2.0,
    max_steps=None,
):
    """Cells for a sweep, ordered (pair-major, then eps), cell_index assigned.

    The default horizon scales as eps^-2 so the physical-time horizon of the
    censoring is constant across the sweep; pass max_steps to pin it, or a
    different horizon_power to grow it as eps shrinks.
    """
    cells = []
    idx = 0
    for s_I, s_II in strategy_pairs:
        for eps in eps_list:
            params = GameParams(p, eps, seed)
            if max_steps is None:
                ms = int(math.ceil(horizon_base * (horizon_eps0 / eps) ** horizon_power))
            else:
                ms = int(max_steps)
            cells.append(
                SimConfig(
                    params=params,
                    domain=domain,
                    strategy_I=s_I,
                    strategy_II=s_II,
                    start=np.asarray(start, dtype=float),
                    n_traj=n_traj,
                    max_steps=ms,
                    seed=seed,
                    cell_index=idx,
                )
            )
            idx += 1
    return cells


def sweep(cells, threads=None, backend=None):
    """One estimate per cell, deterministic per (seed, cell index)."""
    return [estimate_exit_time(c, threads=threads, backend=backend) for c in cells]


SWEEP_HEADER = (
    "eps,eta,p,strategy_I,strategy_II,n_traj,mean_tau,scaled,ci95,censored_fraction,seed"
)


def write_sweep_csv(path, cells, estimates):
    """Write the sweep table; identical inputs give a bit-identical file."""
    with open(path, "w", newline="") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for cfg, est in zip(cells, estimates):
            row = [
                f"{cfg.params.eps:.17g}",
                f"{cfg.domain.eta:.17g}",
                f"{cfg.params.p:.17g}",
                cfg.strategy_I.label(),
                cfg.strategy_II.label(),
                str(cfg.n_traj),
                f"{est.mean_tau:.17g}",
                f"{est.scaled:.17g}",
                f"{est.ci95:.17g}",
                f"{est.censored_fraction:.17g}",
                str(cfg.seed),
            ]
            fh.write(",".join(row) + "\n")


# -- one-step drift diagnostics -------------------------------------------------

@dataclass(frozen=True)
class MartingaleReport:
    """Sign check of exact one-step conditional increments at probed states.

    For deterministic strategies under the two-point noise, the one-step
    conditional expectation is an exact average over the four equiprobable
    (coin, noise sign) outcomes, so the check carries no sampling error and
    the sign prediction must hold outright at every probed state.
    """

    mode: str
    n_states: int
    n_violations: int
    violation_fraction: float
    worst: float
    drifts: np.ndarray


def _collect_probe_states(cfg, n_probe):
    states = []
    thresh = cfg.params.alpha * cfg.params.eps
    traj = 0
    while len(states) < n_probe and traj < max(64, n_probe):
        _, hist = run_trajectory(cfg, traj, record=True)
        for step, x, y, _, term in hist:
            if term:
                continue
            if float(geom.dist(cfg.domain.kind, cfg.domain.params, x, y)) > thresh:
                states.append((x, y))
                if len(states) >= n_probe:
                    break
        traj += 1
    return np.array(states)


def martingale_diagnostic(cfg, n_probe=200, mode=None, c1=None):
    """Exact one-step drift signs at states visited by the configured game.

    mode 'super': with player II pulling down the attached solution's
    gradient, the compensated value process u(x_k) + (beta/2) eps^2 k
    - c1 k eps^3 must not drift upward at interior states (c1 from the
    sampled drift-bound constants when not supplied).  mode 'sub': with
    player I pulling a fixed axis, the projection on that axis must not
    drift downward.  mode 'martingale': with two null players the position
    is frozen and the increment is exactly zero.
    """
    if cfg.strategy_I.kind == "custom" or cfg.strategy_II.kind == "custom":
        raise DomainError("diagnostic requires deterministic built-in strategies")
    if mode is None:
        if cfg.strategy_II.kind == "pull_neg_grad_u":
            mode = "super"
        elif cfg.strategy_I.kind == "pull_axis":
            mode = "sub"
        else:
            mode = "martingale"

    params = cfg.params
    eps, s = params.eps, params.s
    states = _collect_probe_states(cfg, n_probe)
    if states.size == 0:
        raise DomainError("no interior probe states found")

    if mode == "super":
        sol = cfg.strategy_II.solution
        if sol is None:
            raise DomainError("supermartingale mode needs pull_neg_grad_u for player II")
        if c1 is None:
            from .psolution import bound_constants

            c1 = bound_constants(sol).c1

    drifts = np.empty(len(states))
    for i, (x, y) in enumerate(states):
        pos = np.array([x, y])
        v_I = cfg.strategy_I.move(pos, params)
        v_II = cfg.strategy_II.move(pos, params)
        nxt = []
        for v in (v_I, v_II):
            kick = s * perp(v)
            nxt.append(pos + v + kick)
            nxt.append(pos + v - kick)
        if mode == "super":
            u0 = sol.u(pos)
            du = float(np.mean([sol.u(q) for q in nxt])) - u0
            drifts[i] = du + 0.5 * params.beta * eps**2 - c1 * eps**3
        elif mode == "sub":
            d = cfg.strategy_I.direction
            drifts[i] = float(np.mean([q @ d for q in nxt])) - float(pos @ d)
        else:
            drifts[i] = float(np.mean([q @ np.array([1.0, 0.0]) for q in nxt])) - x

    tol = 1e-12 * max(1.0, float(np.max(np.abs(drifts))))
    if mode == "super":
        violations = drifts > tol
        worst = float(np.max(drifts))
    elif mode == "sub":
        violations = drifts < -tol
        worst = float(np.min(drifts))
    else:
        violations = np.abs(drifts) > 1e-14 * eps
        worst = float(np.max(np.abs(drifts)))
    n_v = int(np.sum(violations))
    return MartingaleReport(
        mode=mode,
        n_states=len(states),
        n_violations=n_v,
        violation_fraction=n_v / len(states),
        worst=worst,
        drifts=drifts,
    )
