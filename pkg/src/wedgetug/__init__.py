"""wedgetug: explicit wedge solutions of a degenerate elliptic equation and
the stochastic tug game they control.

Library layout:
  odes        shooting ODE family, critical half-angle (two routes)
  profile     calibration and the angular factor f = y(theta)
  psolution   u = r^2 f(theta) on the wedge, derivatives, verification
  game        game parameters, domains, strategies, single steps
  montecarlo  exit-time estimation, sweeps, drift diagnostics
  engine      compiled/pure-Python batch backends
  cli         command-line front end
"""

from .errors import (
    AccuracyError,
    ConfigError,
    ConvergenceError,
    CriticalPointError,
    DegenerateStartError,
    DomainError,
    OutOfRangeError,
    StrategyViolationError,
    WedgeTugError,
)
from .odes import (
    CriticalAngleResult,
    GProfile,
    OdeConfig,
    asymptotic_exponent_check,
    critical_half_angle_closed,
    critical_half_angle_quadrature,
    eval_slope,
    k_route_half_angle,
    solve_G,
    theta_a,
)
from .profile import (
    AngularProfile,
    build_profile,
    calibrate_a,
    eval_H,
    export_csv,
    load_csv,
    residual_51,
)
from .psolution import (
    BoundConstants,
    PSolution,
    QuadraticForm,
    bound_constants,
    deltap_quadratic,
    game_p_laplacian_fd,
)
from .game import (
    Domain,
    GameParams,
    GameState,
    Strategy,
    delta_inf_psi0,
    game_step,
    psi_exact,
    psi_mc,
    sample_noise,
)
from .montecarlo import (
    ExitTimeEstimate,
    MartingaleReport,
    SimConfig,
    dump_trajectory,
    estimate_exit_time,
    make_grid,
    martingale_diagnostic,
    run_trajectory,
    sweep,
    write_sweep_csv,
)

__version__ = "0.1.0"
