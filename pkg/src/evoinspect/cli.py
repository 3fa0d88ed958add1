"""Command-line front end writing CSV files for external plotting.

    evoinspect <subcommand> --config params.txt [--out DIR] [key=value ...]

Every run writes ``<subcommand>_<name>.csv`` files plus ``manifest.txt``
into the output directory. Exit status is 0 on success, 1 when a model
assumption or precondition fails and 2 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import abm, canonical, continuum, control, dynamics, norms
from .core import (
    AssumptionError,
    ConfigError,
    GameParams,
    IntegrationError,
    QuadraticCost,
    load_config,
    norm_sigmoid,
    validate_params,
)

SUBCOMMANDS = ("equilibrium", "simulate", "norms", "bifurcate", "phase", "continuum", "abm", "validate")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


@dataclass
class Writer:
    out: Path
    subcommand: str
    files: list = field(default_factory=list)

    def csv(self, name: str, header, rows) -> Path:
        path = self.out / f"{self.subcommand}_{name}.csv"
        n = 0
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(v) for v in row])
                n += 1
        self.files.append((path.name, n))
        return path

    def manifest(self) -> Path:
        path = self.out / "manifest.txt"
        with path.open("w", encoding="utf-8") as fh:
            for name, n in self.files:
                fh.write(f"{name} {n}\n")
        return path


def _params(values) -> GameParams:
    return GameParams.from_mapping(values)


def _cost(values) -> QuadraticCost:
    return QuadraticCost(values["alpha"])


def _norm(values, params: GameParams):
    missing = [k for k in ("m", "k", "p_mid") if k not in values]
    if missing:
        raise ConfigError(f"norm parameters missing from configuration: {', '.join(missing)}")
    return norm_sigmoid(values["m"], values["k"], values["p_mid"], params)


def _fixed_point_rows(points):
    for fp in points:
        d = fp.derivative
        if isinstance(d, tuple):
            d = complex(d[0]).real
        yield fp.p_star, fp.q_star, fp.classification.value, float(d)


FIXED_POINT_HEADER = ("p_star", "q_star", "classification", "derivative")
PATH_HEADER = ("t", "p", "q")


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def cmd_equilibrium(values, opts, w: Writer):
    params = _params(values)
    bm = canonical.build_bimatrix(params)
    rows = []
    for prof in (canonical.nash_equilibrium(params), canonical.mixed_equilibrium_oracle(bm, opts.resolution)):
        ind, insp = canonical.expected_payoffs(bm, prof)
        rows.append((prof.p, prof.q, ind, insp, canonical.max_regret(bm, prof)))
    w.csv("canonical", ("p", "q", "individual_payoff", "inspector_payoff", "max_regret"), rows)
    print(f"closed form (p, q) = ({rows[0][0]:.6g}, {rows[0][1]:.6g}); oracle ({rows[1][0]:.6g}, {rows[1][1]:.6g})")


def cmd_simulate(values, opts, w: Writer):
    params = _params(values)
    cost = _cost(values)
    tr = dynamics.integrate(params, cost, opts.p0, opts.t_end, opts.dt)
    w.csv("trajectory", PATH_HEADER, zip(tr.t, tr.p, tr.q))
    w.csv("fixed_points", FIXED_POINT_HEADER, _fixed_point_rows(dynamics.classify_all_fixed_points(params, cost)))
    print(f"p({tr.t[-1]:g}) = {tr.p[-1]:.10g}")


def cmd_norms(values, opts, w: Writer):
    params = _params(values)
    eqs = norms.find_equilibria(params, _cost(values), _norm(values, params), opts.scan_points)
    w.csv("equilibria", FIXED_POINT_HEADER, _fixed_point_rows(eqs.points))
    print("interior pattern:", "/".join(eqs.pattern()) or "none")


def cmd_bifurcate(values, opts, w: Writer):
    params = _params(values)
    norm = _norm(values, params)
    if opts.cost_family == "linear":
        family = norms.linear_response_family(params)
    else:
        family = norms.fixed_alpha_family(values["alpha"])
    f_values = np.linspace(opts.f_min, opts.f_max, opts.f_steps)
    up = norms.bifurcation_sweep(params, family, norm, f_values, norms.INCREASING, scan_points=opts.scan_points)
    down = norms.bifurcation_sweep(params, family, norm, f_values[::-1], norms.DECREASING, scan_points=opts.scan_points)
    rows = [
        (br.direction, pt.f, pt.p_star, pt.stability.value, pt.jump)
        for br in (up, down)
        for pt in br.points
    ]
    w.csv("branches", ("direction", "f", "p_star", "stability", "jump"), rows)
    rep = norms.detect_hysteresis(up, down, opts.gap_tol)
    w.csv("hysteresis", ("f_lo", "f_hi", "max_gap"), rep.intervals)
    print(f"jumps up at {up.jumps}, down at {down.jumps}; max gap {rep.max_gap:.4g}")


def cmd_phase(values, opts, w: Writer):
    params = _params(values)
    if params.delta is None:
        raise ConfigError("phase needs the discount rate 'delta' in the configuration")
    cost = _cost(values)
    sa = control.saddle_analysis(params, cost)
    axis = np.linspace(0.0, 1.0, opts.grid)
    rows = []
    for p in axis:
        for q in axis:
            dp, dq = control.vector_field(params, cost, control.PhasePoint(float(p), float(q)))
            rows.append((p, q, dp, dq))
    w.csv("field", ("p", "q", "dp", "dq"), rows)
    nc = control.nullclines(params, cost, max(opts.grid, 201))
    rows = [("p_dot", p, q) for p, q in nc.p_dot_zero] + [("q_dot", p, q) for p, q in nc.q_dot_zero]
    w.csv("nullclines", ("which", "p", "q"), rows)
    e1, e2 = sa.eigenvalues
    w.csv(
        "saddle",
        ("p_star", "q_star", "det", "trace", "eig1", "eig2"),
        [(sa.p_star, sa.q_star, sa.det, sa.trace, e1.real, e2.real)],
    )
    for side in (control.BELOW, control.ABOVE):
        tr = control.saddle_path(params, cost, side, opts.arc_length)
        w.csv(f"path_{side}", PATH_HEADER, zip(tr.t, tr.p, tr.q))
    print(f"saddle at ({sa.p_star:.6g}, {sa.q_star:.6g}), det {sa.det:.6g}, trace {sa.trace:.6g}")


def cmd_continuum(values, opts, w: Writer):
    cp = continuum.ContinuumParams(
        c=values["c"], sigma=opts.sigma, l_m=opts.l_max, lam=values["lambda"], r=values["r"], N=int(values["N"])
    )
    cost = _cost(values)
    l_star, q_star = continuum.single_equilibrium(cp)
    rows = [(l_star, q_star, True)]
    failure = None
    try:
        big_l, big_q = continuum.population_equilibrium(cp, cost)
        rows.append((big_l, big_q, True))
        target_cost = cost
    except continuum.InfeasibleEquilibriumError as exc:
        rows.append((float(cost.d1(q_star)) / (cp.N * cp.detection), q_star, False))
        failure = exc
    w.csv("summary", ("l_star_or_L_star", "q_star", "feasible"), rows)
    if failure is not None:
        raise failure
    dists = continuum.sample_equilibrium_distributions(cp, target_cost, opts.count, opts.seed, opts.bins)
    for i, d in enumerate(dists):
        lo, hi = d.edges
        w.csv(f"distribution_{i:03d}", ("bin_lo", "bin_hi", "weight"), zip(lo, hi, d.weights))
    print(f"l* = {l_star:.6g}, L* = {rows[1][0]:.6g}, q* = {q_star:.6g}; {len(dists)} distributions")


def cmd_abm(values, opts, w: Writer):
    params = _params(values)
    cost = _cost(values)
    ens = abm.run_ensemble(params, cost, opts.p0, opts.t_end, opts.dt, opts.replicates, opts.seed)
    w.csv("ensemble", ("t", "mean_p", "std_p", "q_mean"), zip(ens.t, ens.mean, ens.std, ens.q_mean))
    tr = dynamics.integrate(params, cost, opts.p0, opts.t_end, opts.dt)
    w.csv("meanfield", PATH_HEADER, zip(tr.t, tr.p, tr.q))
    gap = abm.compare_to_meanfield(ens, tr)
    w.csv("comparison", ("max_gap", "mean_gap", "terminal_gap"), [(gap.max_gap, gap.mean_gap, gap.terminal_gap)])
    if opts.dump_replicates:
        rows = ((i, t, x) for i, path in enumerate(ens.paths) for t, x in zip(ens.t, path))
        w.csv("replicates", ("replicate", "t", "p"), rows)
    print(f"max gap {gap.max_gap:.4g}, terminal gap {gap.terminal_gap:.4g}")


def cmd_validate(values, opts, w: Writer):
    rep = validate_params(values, QuadraticCost(values["alpha"]))
    w.csv("report", ("constraint", "passed", "detail"), [(c.name, c.passed, c.detail) for c in rep.checks])
    for c in rep.checks:
        print(f"{'pass' if c.passed else 'FAIL'}  {c.name}  {c.detail}")
    rep.raise_if_failed()


HANDLERS = {
    "equilibrium": cmd_equilibrium,
    "simulate": cmd_simulate,
    "norms": cmd_norms,
    "bifurcate": cmd_bifurcate,
    "phase": cmd_phase,
    "continuum": cmd_continuum,
    "abm": cmd_abm,
    "validate": cmd_validate,
}


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evoinspect", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="key = value parameter file")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("overrides", nargs="*", metavar="key=value", help="override configuration values")

    sp = sub.add_parser("equilibrium", parents=[common], help="canonical 2x2 equilibrium and its grid oracle")
    sp.add_argument("--resolution", type=int, default=1000)

    sp = sub.add_parser("simulate", parents=[common], help="replicator trajectory and fixed points")
    sp.add_argument("--p0", type=float, default=0.1)
    sp.add_argument("--t-end", type=float, default=1000.0)
    sp.add_argument("--dt", type=float, default=0.1)

    sp = sub.add_parser("norms", parents=[common], help="equilibria with a social norm")
    sp.add_argument("--scan-points", type=int, default=10_000)

    sp = sub.add_parser("bifurcate", parents=[common], help="fine sweeps in both directions")
    sp.add_argument("--f-min", type=float, default=0.2)
    sp.add_argument("--f-max", type=float, default=4.0)
    sp.add_argument("--f-steps", type=int, default=381)
    sp.add_argument("--cost-family", choices=("linear", "fixed"), default="linear",
                    help="linear: alpha tracks f so that q_hat(p) = p; fixed: alpha from the config")
    sp.add_argument("--gap-tol", type=float, default=0.05)
    sp.add_argument("--scan-points", type=int, default=10_000)

    sp = sub.add_parser("phase", parents=[common], help="phase plane of the forward-looking inspector")
    sp.add_argument("--grid", type=int, default=21)
    sp.add_argument("--arc-length", type=float, default=0.5)

    sp = sub.add_parser("continuum", parents=[common], help="continuous crime levels")
    sp.add_argument("--sigma", type=float, default=0.5)
    sp.add_argument("--l-max", type=float, default=2.0)
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--bins", type=int, default=continuum.DEFAULT_BINS)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("abm", parents=[common], help="agent-based ensemble versus the mean field")
    sp.add_argument("--p0", type=float, default=0.1)
    sp.add_argument("--t-end", type=float, default=400.0)
    sp.add_argument("--dt", type=float, default=0.1)
    sp.add_argument("--replicates", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--dump-replicates", action="store_true")

    sub.add_parser("validate", parents=[common], help="parameter report only")
    return parser


def run(subcommand: str, config_path, overrides=(), out="out", **options) -> tuple[int, list]:
    """Programmatic entry point; returns (exit status, [(file, rows), ...])."""
    argv = [subcommand, "--config", str(config_path), "--out", str(out)]
    for k, v in options.items():
        flag = "--" + k.replace("_", "-")
        if v is True:
            argv.append(flag)
        elif v is not False and v is not None:
            argv += [flag, str(v)]
    argv += list(overrides)
    return _main(argv)


def _main(argv) -> tuple[int, list]:
    args = build_parser().parse_args(argv)
    w = Writer(Path(args.out), args.subcommand)
    status = 0
    try:
        values = load_config(args.config, args.overrides)
        w.out.mkdir(parents=True, exist_ok=True)
        HANDLERS[args.subcommand](values, args, w)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = 2
    except (AssumptionError, IntegrationError, ValueError) as exc:
        # ValueError covers out-of-range options such as p0 > 1
        print(f"error: {exc}", file=sys.stderr)
        status = 1
    if w.files:
        try:
            w.manifest()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = 2
    return status, w.files


def main(argv=None) -> int:
    return _main(sys.argv[1:] if argv is None else argv)[0]


if __name__ == "__main__":
    sys.exit(main())
