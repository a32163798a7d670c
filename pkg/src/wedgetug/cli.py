"""Command-line front end.

Subcommands: critical-angle, solve, verify, simulate, plotdata.  Exit codes:
0 success, 1 usage/configuration error, 2 numeric-tolerance failure, 3 I/O
error.  Machine-facing numbers are printed with 17 significant digits so
repeated runs with the same inputs produce bit-identical files.
"""

import argparse
import configparser
import csv
import json
import math
import sys

import numpy as np

from . import engine
from .errors import ConfigError, DomainError, OutOfRangeError, WedgeTugError
from .game import Domain, Strategy
from .montecarlo import make_grid, sweep, write_sweep_csv
from .odes import (
    critical_half_angle_closed,
    critical_half_angle_quadrature,
    k_route_half_angle,
)
from .profile import build_profile, calibrate_a, export_csv, load_csv
from .psolution import PSolution, game_p_laplacian_fd


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt(x):
    return f"{x:.17g}"


# -- critical-angle -------------------------------------------------------------

def cmd_critical_angle(args):
    p = args.p
    if p <= 1.0:
        print("error: --p must exceed 1", file=sys.stderr)
        return 1
    closed = critical_half_angle_closed(p)
    by_quad = critical_half_angle_quadrature(p, tol=args.tol)
    by_k = k_route_half_angle(p)
    d_quad = abs(closed - by_quad)
    d_k = abs(closed - by_k)
    print(f"p                        = {_fmt(p)}")
    print(f"half angle (closed form) = {_fmt(closed)}")
    print(f"half angle (quadrature)  = {_fmt(by_quad)}")
    print(f"half angle (limit route) = {_fmt(by_k)}")
    print(f"|closed - quadrature|    = {d_quad:.3e}  (tol {args.tol:.1e})")
    print(f"|closed - limit route|   = {d_k:.3e}  (tol {args.kroute_tol:.1e})")
    print(f"full critical angle      = {_fmt(2.0 * closed)}")
    # the sharp threshold is only known to lie in this bracket
    print(f"threshold bracket (full) = [{_fmt(2.0 * closed)}, {_fmt(math.pi)}]")
    ok = d_quad <= args.tol and d_k <= args.kroute_tol
    return 0 if ok else 2


# -- solve ------------------------------------------------------------------------

def cmd_solve(args):
    p, eta = args.p, args.eta
    if p <= 1.0:
        print("error: --p must exceed 1", file=sys.stderr)
        return 1
    if eta <= 0.0:
        print("error: --eta must be positive", file=sys.stderr)
        return 1
    crit_full = 2.0 * critical_half_angle_closed(p)
    try:
        a = calibrate_a(eta / 2.0, p, tol=args.calib_tol)
        prof = build_profile(a, p, n_nodes=args.nodes)
    except OutOfRangeError:
        print(
            f"error: eta = {_fmt(eta)} is not below the critical angle "
            f"{_fmt(crit_full)} for p = {p:g}; no profile exists",
            file=sys.stderr,
        )
        return 2
    try:
        export_csv(prof, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 3
    print(f"a                = {_fmt(a)}")
    print(f"theta_a          = {_fmt(prof.theta_a)}")
    print(f"max residual     = {prof.residual_max:.3e}")
    print(f"endpoint defect  = {prof.endpoint_defect:.3e} rad")
    print(f"wrote {args.out} and {args.out}.meta")
    return 0


# -- verify -----------------------------------------------------------------------

def cmd_verify(args):
    try:
        prof = load_csv(args.profile)
    except (DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    psol = PSolution(prof, prof.theta_a, 0.0)
    rng = np.random.default_rng(args.seed)
    n = args.points
    r = rng.uniform(0.5, 3.0, size=n)
    th = rng.uniform(-0.9, 0.9, size=n) * prof.theta_a
    pts = np.column_stack((r * np.cos(th), r * np.sin(th)))
    field = psol.as_field()
    residuals = []
    for x in pts:
        h = 3e-4 * math.sqrt(float(x @ x))
        residuals.append(game_p_laplacian_fd(field, x, h, prof.p) + 1.0)
    report = {
        "max_abs_residual": float(np.max(np.abs(residuals))),
        "points": n,
        "h_policy": "3e-4 * r",
        "tol": args.tol,
        "p": prof.p,
        "theta_a": prof.theta_a,
    }
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 3
    print(text)
    return 0 if report["max_abs_residual"] <= args.tol else 2


# -- simulate ----------------------------------------------------------------------

_REQUIRED = {
    "params": ("p", "seed"),
    "domain": ("kind",),
    "strategies": ("player_i", "player_ii"),
    "sweep": ("eps", "n_traj", "start_axis_distance"),
}


def _need(cp, section, key):
    if not cp.has_section(section):
        raise ConfigError(f"missing section [{section}]")
    if not cp.has_option(section, key):
        raise ConfigError(f"missing field '{key}' in section [{section}]")
    return cp.get(section, key)


def _parse_strategy(token, solution):
    token = token.strip()
    if token == "null":
        return Strategy.null_move()
    if token in ("pull_neg_grad_u", "pull_pos_grad_u"):
        if solution is None:
            raise ConfigError(f"strategy '{token}' needs a wedge domain below critical")
        maker = Strategy.pull_neg_grad_u if token == "pull_neg_grad_u" else Strategy.pull_pos_grad_u
        return maker(solution)
    if token.startswith("pull_axis:"):
        try:
            _, dx, dy = token.split(":")
            return Strategy.pull_axis([float(dx), float(dy)])
        except ValueError as exc:
            raise ConfigError(
                f"bad pull_axis direction in '{token}' (expected pull_axis:DX:DY)"
            ) from exc
    raise ConfigError(f"unknown strategy '{token}'")


def load_sim_config(path):
    """Parse a sweep configuration file into grid-builder arguments."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        # configparser reports offending line numbers in its message
        raise ConfigError(f"config parse error in {path}: {exc}") from exc

    for section, keys in _REQUIRED.items():
        for key in keys:
            _need(cp, section, key)

    p = cp.getfloat("params", "p")
    if p <= 1.0:
        raise ConfigError("field 'p' in [params] must exceed 1")
    seed = cp.getint("params", "seed")
    eps_list = [float(v) for v in _need(cp, "sweep", "eps").split(",")]
    n_traj = cp.getint("sweep", "n_traj")
    start_d = cp.getfloat("sweep", "start_axis_distance")

    kind = _need(cp, "domain", "kind").strip()
    solution = None
    if kind == "wedge":
        eta = float(_need(cp, "domain", "eta"))
        trans_raw = cp.get("domain", "translation", fallback="auto").strip()
        crit_full = 2.0 * critical_half_angle_closed(p)
        if eta < crit_full:
            enlarge = cp.getfloat("domain", "enlargement", fallback=0.05)
            solution = PSolution.build(p, eta, enlargement=enlarge)
            translation = solution.translation if trans_raw == "auto" else float(trans_raw)
            if trans_raw != "auto":
                solution = PSolution(solution.profile, eta / 2.0, translation)
            domain = solution.game_domain()
        else:
            translation = 0.0 if trans_raw == "auto" else float(trans_raw)
            domain = Domain.wedge(eta, translation)
        start = np.array([translation + start_d, 0.0])
    elif kind == "half_plane":
        translation = cp.getfloat("domain", "translation", fallback=0.0)
        domain = Domain.half_plane(translation)
        start = np.array([translation + start_d, 0.0])
    elif kind == "parabola":
        amplitude = float(_need(cp, "domain", "A"))
        exponent = float(_need(cp, "domain", "gamma"))
        domain = Domain.parabola(amplitude, exponent)
        start = np.array([start_d, 0.0])
    else:
        raise ConfigError(f"unknown domain kind '{kind}'")

    s_i = [_parse_strategy(t, solution) for t in _need(cp, "strategies", "player_i").split(",") if t.strip()]
    s_ii = [_parse_strategy(t, solution) for t in _need(cp, "strategies", "player_ii").split(",") if t.strip()]
    pairs = [(a, b) for a in s_i for b in s_ii]

    grid_kw = dict(
        horizon_base=cp.getfloat("sweep", "horizon_base", fallback=1e7),
        horizon_eps0=cp.getfloat("sweep", "horizon_eps0", fallback=0.1),
        horizon_power=cp.getfloat("sweep", "horizon_power", fallback=2.0),
    )
    if cp.has_option("sweep", "max_steps"):
        grid_kw = {"max_steps": cp.getint("sweep", "max_steps")}
    out = cp.get("sweep", "out", fallback="sweep.csv")
    return dict(
        p=p, domain=domain, strategy_pairs=pairs, eps_list=eps_list,
        n_traj=n_traj, seed=seed, start=start, grid_kw=grid_kw, out=out,
    )


def cmd_simulate(args):
    try:
        spec = load_sim_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cells = make_grid(
        spec["p"], spec["domain"], spec["strategy_pairs"], spec["eps_list"],
        spec["n_traj"], spec["seed"], spec["start"], **spec["grid_kw"],
    )
    estimates = sweep(cells, threads=args.threads)
    out = args.out or spec["out"]
    try:
        write_sweep_csv(out, cells, estimates)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return 3
    print(f"{'eps':>8} {'strategy_I':>22} {'strategy_II':>18} {'scaled':>12} {'ci95':>10} {'cens':>6}")
    for cfg, est in zip(cells, estimates):
        print(
            f"{cfg.params.eps:8.4g} {cfg.strategy_I.label():>22} {cfg.strategy_II.label():>18} "
            f"{est.scaled:12.5g} {est.ci95 * cfg.params.eps ** 2:10.3g} {est.censored_fraction:6.3f}"
        )
    print(f"engine backend: {engine.BACKEND}; wrote {out}")
    return 0


# -- plotdata ----------------------------------------------------------------------

def _read_csv_dicts(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def cmd_plotdata(args):
    try:
        rows = _read_csv_dicts(args.infile)
    except OSError as exc:
        print(f"error: cannot read {args.infile}: {exc}", file=sys.stderr)
        return 3
    if not rows:
        print("error: input has no data rows", file=sys.stderr)
        return 3

    series = []
    if args.kind == "profile":
        for label in ("y", "yp", "ypp"):
            series.append(
                {
                    "label": label,
                    "x": [float(r["theta"]) for r in rows],
                    "y": [float(r[label]) for r in rows],
                }
            )
    elif args.kind == "theta_vs_a":
        groups = {}
        for r in rows:
            key = r.get("p", "")
            groups.setdefault(key, []).append((float(r["a"]), float(r["theta_a"])))
        for key, pts in sorted(groups.items()):
            pts.sort()
            series.append(
                {
                    "label": f"theta_a(p={key})" if key else "theta_a",
                    "x": [a for a, _ in pts],
                    "y": [t for _, t in pts],
                }
            )
    elif args.kind == "sweep":
        groups = {}
        for r in rows:
            key = f"eta={r['eta']} p={r['p']} {r['strategy_I']} vs {r['strategy_II']}"
            groups.setdefault(key, []).append((float(r["eps"]), float(r["scaled"])))
        for key, pts in sorted(groups.items()):
            pts.sort()
            series.append({"label": key, "x": [e for e, _ in pts], "y": [s for _, s in pts]})
    else:  # argparse choices prevent this
        return 1

    try:
        if args.out.endswith(".json"):
            with open(args.out, "w") as fh:
                json.dump({"kind": args.kind, "series": series}, fh, indent=2)
                fh.write("\n")
        else:
            with open(args.out, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["series", "x", "y"])
                for ser in series:
                    for xv, yv in zip(ser["x"], ser["y"]):
                        writer.writerow([ser["label"], f"{xv:.17g}", f"{yv:.17g}"])
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.out} ({len(series)} series)")
    return 0


# -- entry point ---------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="wedgetug", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("critical-angle", help="critical wedge angle by three routes")
    pa.add_argument("--p", type=float, required=True)
    pa.add_argument("--tol", type=float, default=1e-10)
    pa.add_argument("--kroute-tol", type=float, default=1e-4)
    pa.set_defaults(func=cmd_critical_angle)

    ps = sub.add_parser("solve", help="calibrate and export a wedge profile")
    ps.add_argument("--p", type=float, required=True)
    ps.add_argument("--eta", type=float, required=True, help="full wedge aperture (radians)")
    ps.add_argument("--nodes", type=int, default=801)
    ps.add_argument("--calib-tol", type=float, default=1e-10)
    ps.add_argument("--out", required=True)
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify", help="finite-difference residual check of a profile")
    pv.add_argument("--profile", required=True)
    pv.add_argument("--points", type=int, default=50)
    pv.add_argument("--tol", type=float, default=1e-4)
    pv.add_argument("--seed", type=int, default=7)
    pv.add_argument("--out")
    pv.set_defaults(func=cmd_verify)

    pm = sub.add_parser("simulate", help="run an exit-time sweep from a config file")
    pm.add_argument("--config", required=True)
    pm.add_argument("--out")
    pm.add_argument("--threads", type=int, default=None)
    pm.set_defaults(func=cmd_simulate)

    pp = sub.add_parser("plotdata", help="reshape outputs into plot-ready series")
    pp.add_argument("--in", dest="infile", required=True)
    pp.add_argument("--kind", choices=("theta_vs_a", "profile", "sweep"), required=True)
    pp.add_argument("--out", required=True)
    pp.set_defaults(func=cmd_plotdata)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except WedgeTugError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 3
    raise SystemExit(code)


if __name__ == "__main__":
    main()
