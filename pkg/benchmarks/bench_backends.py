"""Benchmark the compiled game kernel against the NumPy fallback.

Runs the same cells on both backends, checks the outputs are bit-identical,
and reports steps/second.  Usage: python benchmarks/bench_backends.py
"""

import math
import time

import numpy as np

import wedgetug as wt
from wedgetug import engine
from wedgetug.montecarlo import SimConfig, _run_cell


def _time_cell(cfg, backend):
    t0 = time.perf_counter()
    steps, censored, exit_xy = _run_cell(cfg, threads=1, backend=backend)
    dt = time.perf_counter() - t0
    return steps, censored, exit_xy, dt, int(steps.sum())


def main():
    if "cython" not in engine.available_backends():
        print("compiled kernel unavailable; nothing to compare")
        return

    psol = wt.PSolution.build(2.0, math.pi / 4)
    wedge_cell = SimConfig(
        params=wt.GameParams(2.0, 0.025, seed=3),
        domain=psol.game_domain(),
        strategy_I=wt.Strategy.pull_pos_grad_u(psol),
        strategy_II=wt.Strategy.pull_neg_grad_u(psol),
        start=psol.start_point(1.0),
        n_traj=4000,
        max_steps=10**6,
        seed=3,
        cell_index=0,
    )
    half_cell = SimConfig(
        params=wt.GameParams(2.0, 0.05, seed=5),
        domain=wt.Domain.half_plane(),
        strategy_I=wt.Strategy.pull_axis([1.0, 0.0]),
        strategy_II=wt.Strategy.pull_axis([-1.0, 0.0]),
        start=np.array([1.0, 0.0]),
        n_traj=1000,
        max_steps=10**5,
        seed=5,
        cell_index=0,
    )

    for name, cfg in (("wedge/gradient-pulls", wedge_cell), ("half-plane/axis-pulls", half_cell)):
        s_py, c_py, e_py, t_py, n_py = _time_cell(cfg, "python")
        s_cy, c_cy, e_cy, t_cy, n_cy = _time_cell(cfg, "cython")
        same = (
            np.array_equal(s_py, s_cy)
            and np.array_equal(c_py, c_cy)
            and np.array_equal(e_py, e_cy, equal_nan=True)
        )
        print(f"{name}: {n_py} total steps")
        print(f"  python: {t_py:8.3f} s  ({n_py / t_py / 1e6:7.2f} M steps/s)")
        print(f"  cython: {t_cy:8.3f} s  ({n_cy / t_cy / 1e6:7.2f} M steps/s)")
        print(f"  speedup {t_py / t_cy:6.1f}x, outputs identical: {same}")
        if not same:
            raise SystemExit("backend outputs diverged")


if __name__ == "__main__":
    main()
