import numpy as np
import pytest

import wedgetug as wt
from wedgetug.montecarlo import (
    SimConfig,
    dump_trajectory,
    make_grid,
    martingale_diagnostic,
    sweep,
    write_sweep_csv,
)


def _basic_cell(psol, eps=0.1, n=200, seed=42, max_steps=10**6):
    return SimConfig(
        params=wt.GameParams(2.0, eps, seed),
        domain=psol.game_domain(),
        strategy_I=wt.Strategy.pull_pos_grad_u(psol),
        strategy_II=wt.Strategy.pull_neg_grad_u(psol),
        start=psol.start_point(1.0),
        n_traj=n,
        max_steps=max_steps,
        seed=seed,
        cell_index=0,
    )


def test_exit_time_basics(psol_p2):
    est = wt.estimate_exit_time(_basic_cell(psol_p2))
    assert est.mean_tau >= 1.0  # the game always takes at least one turn
    assert est.scaled == 0.1**2 * est.mean_tau
    assert est.censored_fraction == 0.0
    assert est.mean_tau_uncensored == est.mean_tau
    assert est.ci95 > 0.0


def test_start_outside_rejected(psol_p2):
    with pytest.raises(wt.DomainError):
        _ = SimConfig(
            params=wt.GameParams(2.0, 0.1, 1),
            domain=psol_p2.game_domain(),
            strategy_I=wt.Strategy.null_move(),
            strategy_II=wt.Strategy.null_move(),
            start=np.array([0.0, 0.0]),
            n_traj=10,
            max_steps=100,
            seed=1,
        )


def test_all_censored_warns():
    # two null players freeze the walk: every trajectory hits the horizon
    cfg = SimConfig(
        params=wt.GameParams(2.0, 0.1, 3),
        domain=wt.Domain.half_plane(),
        strategy_I=wt.Strategy.null_move(),
        strategy_II=wt.Strategy.null_move(),
        start=np.array([1.0, 0.0]),
        n_traj=8,
        max_steps=50,
        seed=3,
    )
    with pytest.warns(UserWarning, match="censored"):
        est = wt.estimate_exit_time(cfg)
    assert est.censored_fraction == 1.0
    assert est.mean_tau == 50.0
    assert est.mean_tau_uncensored is None


def test_censoring_monotone_in_horizon():
    def mean_at(ms):
        cfg = SimConfig(
            params=wt.GameParams(2.0, 0.1, 5),
            domain=wt.Domain.half_plane(),
            strategy_I=wt.Strategy.pull_axis([1.0, 0.0]),
            strategy_II=wt.Strategy.pull_axis([-1.0, 0.0]),
            start=np.array([0.7, 0.0]),
            n_traj=300,
            max_steps=ms,
            seed=5,
        )
        return wt.estimate_exit_time(cfg).mean_tau

    means = [mean_at(ms) for ms in (50, 200, 1000, 5000)]
    assert all(b >= a for a, b in zip(means, means[1:]))


def test_custom_strategy_slow_path(psol_p2):
    pull_right = wt.Strategy.custom(lambda x, params: np.array([params.eps, 0.0]))
    cfg = SimConfig(
        params=wt.GameParams(2.0, 0.1, 9),
        domain=psol_p2.game_domain(),
        strategy_I=pull_right,
        strategy_II=wt.Strategy.pull_neg_grad_u(psol_p2),
        start=psol_p2.start_point(1.0),
        n_traj=12,
        max_steps=10**5,
        seed=9,
    )
    est = wt.estimate_exit_time(cfg)
    assert est.censored_fraction == 0.0
    assert est.mean_tau >= 1.0


def test_parabola_cell_exits_on_curve():
    dom = wt.Domain.parabola(1.0, 0.5)
    cfg = SimConfig(
        params=wt.GameParams(2.0, 0.05, 17),
        domain=dom,
        strategy_I=wt.Strategy.null_move(),
        strategy_II=wt.Strategy.pull_axis([0.0, -1.0]),
        start=np.array([1.0, 0.0]),
        n_traj=100,
        max_steps=10**5,
        seed=17,
    )
    from wedgetug.montecarlo import _run_cell

    steps, censored, exit_xy = _run_cell(cfg, threads=1)
    assert censored.sum() == 0
    on_curve = np.abs(np.abs(exit_xy[:, 1]) - np.sqrt(np.abs(exit_xy[:, 0])))
    assert np.max(on_curve) < 1e-9


# -- trajectory dump -------------------------------------------------------------

def test_dump_trajectory(tmp_path, psol_p2):
    cfg = _basic_cell(psol_p2, n=1)
    path = tmp_path / "traj.csv"
    dump_trajectory(cfg, 0, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "step,x,y,mover,terminal"
    assert lines[1].startswith("0,")
    last = lines[-1].split(",")
    assert last[4] == "1"  # terminal row
    assert last[3] in ("I", "II")
    assert len(lines) - 2 == int(last[0])  # header + step-0 row


# -- sweeps ----------------------------------------------------------------------

def test_grid_shape_and_determinism(tmp_path, psol_p2):
    pairs = [
        (wt.Strategy.pull_pos_grad_u(psol_p2), wt.Strategy.pull_neg_grad_u(psol_p2)),
        (wt.Strategy.null_move(), wt.Strategy.pull_neg_grad_u(psol_p2)),
    ]
    cells = make_grid(
        2.0, psol_p2.game_domain(), pairs, [0.1, 0.05, 0.025], 50, 99,
        psol_p2.start_point(1.0),
    )
    assert len(cells) == 6
    assert [c.cell_index for c in cells] == list(range(6))
    # default horizon keeps the physical time span constant across eps
    assert cells[1].max_steps == 4 * cells[0].max_steps
    ests = sweep(cells)
    assert len(ests) == 6
    p1, p2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    write_sweep_csv(p1, cells, ests)
    write_sweep_csv(p2, cells, sweep(cells))
    assert p1.read_bytes() == p2.read_bytes()
    header = p1.read_text().splitlines()[0]
    assert header == "eps,eta,p,strategy_I,strategy_II,n_traj,mean_tau,scaled,ci95,censored_fraction,seed"
    assert len(p1.read_text().splitlines()) == 7


# -- drift diagnostics --------------------------------------------------------------

def test_supermartingale_diagnostic(psol_p2, bounds_p2):
    cfg = _basic_cell(psol_p2, eps=0.05, n=30)
    rep = martingale_diagnostic(cfg, n_probe=150, c1=bounds_p2.c1)
    assert rep.mode == "super"
    assert rep.n_states == 150
    assert rep.violation_fraction <= 0.05
    assert rep.worst <= 0.0


def test_submartingale_diagnostic():
    cfg = SimConfig(
        params=wt.GameParams(2.0, 0.05, 13),
        domain=wt.Domain.half_plane(),
        strategy_I=wt.Strategy.pull_axis([1.0, 0.0]),
        strategy_II=wt.Strategy.pull_axis([-1.0, 0.0]),
        start=np.array([1.0, 0.0]),
        n_traj=40,
        max_steps=3000,
        seed=13,
    )
    rep = martingale_diagnostic(cfg, n_probe=150)
    assert rep.mode == "sub"
    assert rep.violation_fraction <= 0.05


def test_martingale_null_case(psol_p2):
    cfg = SimConfig(
        params=wt.GameParams(2.0, 0.05, 2),
        domain=psol_p2.game_domain(),
        strategy_I=wt.Strategy.null_move(),
        strategy_II=wt.Strategy.null_move(),
        start=psol_p2.start_point(1.0),
        n_traj=4,
        max_steps=60,
        seed=2,
    )
    rep = martingale_diagnostic(cfg, n_probe=40)
    assert rep.mode == "martingale"
    assert rep.violation_fraction == 0.0
    assert rep.worst == 0.0


def test_diagnostic_rejects_custom(psol_p2):
    cfg = _basic_cell(psol_p2, n=4)
    cfg.strategy_I = wt.Strategy.custom(lambda x, p: np.zeros(2))
    with pytest.raises(wt.DomainError):
        martingale_diagnostic(cfg, n_probe=10)


def test_null_pair_scaling_sanity(psol_p2):
    """Two null players freeze the walk (the noise kick scales with the
    control, so a zero control draws zero noise): every cell censors at the
    horizon, and under the constant-physical-horizon policy the scaled column
    is exactly constant across eps."""
    import warnings

    null = wt.Strategy.null_move()
    cells = make_grid(
        2.0, psol_p2.game_domain(), [(null, null)], [0.1, 0.05, 0.025], 20, 3,
        psol_p2.start_point(1.0), horizon_base=2e4,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ests = sweep(cells)
    assert all(e.censored_fraction == 1.0 for e in ests)
    scaled = [e.scaled for e in ests]
    assert scaled[0] == pytest.approx(scaled[1], rel=1e-12)
    assert scaled[1] == pytest.approx(scaled[2], rel=1e-12)


def test_exit_bound_nonvacuous_below_drift_threshold(psol_p2, bounds_p2):
    """For eps below beta/(2 c1) the compensated-drift bound has a positive
    margin, so the scaled exit-time bound binds with a positive factor; the
    scaled column also stabilizes once the boundary band alpha*eps is small
    against the start-to-boundary distance."""
    s_I = wt.Strategy.pull_pos_grad_u(psol_p2)
    s_II = wt.Strategy.pull_neg_grad_u(psol_p2)
    start = psol_p2.start_point(1.0)
    u0 = psol_p2.u(start)
    beta, c1 = bounds_p2.beta, bounds_p2.c1
    eps_list = [0.025, 0.0125, 0.00625]
    assert eps_list[-1] < bounds_p2.eps_threshold
    cells = make_grid(2.0, psol_p2.game_domain(), [(s_I, s_II)], eps_list, 1000, 1111,
                      start, max_steps=10**7)
    ests = sweep(cells)
    scaled = [e.scaled for e in ests]
    for cfg, est in zip(cells, ests):
        margin = beta / 2.0 - c1 * cfg.params.eps
        rel_ci = est.ci95 / est.mean_tau
        assert est.scaled * margin <= u0 * (1.0 + 3.0 * rel_ci)
    # non-vacuous at the smallest eps
    assert beta / 2.0 - c1 * eps_list[-1] > 0.0
    assert (max(scaled) - min(scaled)) / max(scaled) < 0.5
