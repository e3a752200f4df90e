"""Command-line pipeline: data generation, fitting, sweeps, and validation.

Subcommands: generate, fit, sweep, sublevel, beta-sens, validate, eig.
Every run writes a manifest.json with the resolved configuration and package
version (no timestamps, so reruns are byte-identical), and exits with a
stable code: 0 success, 2 domain error, 3 non-convergence, 4 boundary stall,
5 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .errors import (
    BoundaryStallError,
    ConvergenceError,
    DomainError,
    InputFormatError,
)
from .forward_model import (
    OriginSolver,
    ParameterVector,
    Trajectory,
    default_initial_condition,
    load_trajectory,
    write_trajectory_csv,
)
from .inversion import (
    OptimizerConfig,
    fit,
    make_cost_config,
    write_fit_report,
    write_residuals_csv,
)
from .landscape import (
    Axis,
    SweepSpec,
    beta_sensitivity,
    default_pane_spec,
    load_sweep_json,
    sublevel_set,
    sweep,
    write_deviations_csv,
    write_sweep_csv,
    write_sweep_json,
    write_threshold_set_json,
)
from .oracles import McForwardConfig, mc_forward_solution
from .spectral_operator import (
    Grid1D,
    build_operator_matrix,
    cache_key,
    cached_eigendecompose,
    save_decomposition,
)

_RNG_NAME = "PCG64"


def _theta_type(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"--theta expects three comma-separated numbers a1,a2,b, got {text!r}"
        )
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--theta components must be numbers: {exc}")


def _float_list_type(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {exc}")


def _pairs_type(text: str) -> list[tuple[float, float]]:
    pairs = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(
                f"--pairs expects 'a1,a2;a1,a2;...', bad chunk {chunk!r}"
            )
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"--pairs components must be numbers: {exc}")
    return pairs


def _write_manifest(out_dir: str, command: str, params: dict) -> None:
    doc = {
        "version": __version__,
        "command": command,
        "rng": _RNG_NAME,
        "parameters": params,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _prepare_out(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _solver(args) -> OriginSolver:
    grid = Grid1D(args.nx)
    return OriginSolver(grid, cache_dir=args.cache)


def _manifest_params(args, skip=("out",)) -> dict:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or key == "func" or key == "command":
            continue
        if isinstance(value, tuple):
            value = list(value)
        params[key] = value
    return params


def cmd_generate(args) -> int:
    theta = ParameterVector(*args.theta)
    out = _prepare_out(args)
    solver = _solver(args)
    if args.nt < 2:
        raise DomainError(f"--nt must be at least 2, got {args.nt}")
    if not args.t_final > 0.0:
        raise DomainError(f"--t-final must be positive, got {args.t_final}")
    times = np.linspace(0.0, args.t_final, args.nt)
    values = solver.origin_values(theta, times)
    if args.noise_sd < 0.0:
        raise DomainError(f"--noise-sd must be nonnegative, got {args.noise_sd}")
    if args.noise_sd > 0.0:
        rng = np.random.default_rng(np.random.SeedSequence(args.seed))
        values = values + rng.normal(0.0, args.noise_sd, values.shape)
    traj = Trajectory(times=times, values=values)
    path = os.path.join(out, "trajectory.csv")
    write_trajectory_csv(traj, path)
    _write_manifest(out, "generate", _manifest_params(args))
    print(f"wrote {path} ({args.nt} samples, theta={list(theta.as_tuple())})")
    return 0


def cmd_fit(args) -> int:
    out = _prepare_out(args)
    traj = load_trajectory(args.data)
    cfg = make_cost_config(traj, lam=args.lam)
    solver = _solver(args)
    opt = OptimizerConfig(theta0=ParameterVector(*args.theta))
    report = fit(cfg, opt, solver, n_workers=args.workers)
    write_fit_report(report, os.path.join(out, "fit_report.json"))
    write_residuals_csv(report.theta_hat, cfg, solver, os.path.join(out, "residuals.csv"))
    _write_manifest(out, "fit", _manifest_params(args))
    th = report.theta_hat
    print(
        f"fit: theta_hat=({th.alpha1:.6f}, {th.alpha2:.6f}, {th.beta:.6f}) "
        f"J={report.cost_final:.6e} iterations={report.iterations} "
        f"termination={report.termination} "
        f"alpha_strip_degenerate={report.alpha_strip_degenerate}"
    )
    if report.termination in ("gradient", "cost"):
        return 0
    if report.termination == "boundary":
        return 4
    return 3


def _load_sweep_spec(path: str) -> SweepSpec:
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read sweep spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"malformed sweep spec JSON {path}: {exc}") from exc
    try:
        axes = tuple(
            Axis(a["name"], a["lo"], a["hi"], a["count"]) for a in doc["axes"]
        )
        fixed = {str(k): float(v) for k, v in doc.get("fixed", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"sweep spec {path} is missing required fields: {exc}") from exc
    return SweepSpec(axes=axes, fixed=fixed)


def cmd_sweep(args) -> int:
    out = _prepare_out(args)
    traj = load_trajectory(args.data)
    cfg = make_cost_config(traj, lam=args.lam)
    solver = _solver(args)
    if args.spec is not None:
        spec = _load_sweep_spec(args.spec)
    else:
        beta = args.theta[2] if args.theta is not None else 0.7
        spec = default_pane_spec(beta)
    result = sweep(spec, cfg, solver, n_workers=args.workers)
    write_sweep_csv(result, os.path.join(out, "sweep.csv"))
    write_sweep_json(result, os.path.join(out, "sweep.json"))
    _write_manifest(out, "sweep", _manifest_params(args))
    print(
        f"swept {result.values.size} points "
        f"({' x '.join(str(a.count) for a in result.axes)}), "
        f"J in [{result.values.min():.3e}, {result.values.max():.3e}]"
    )
    return 0


def cmd_sublevel(args) -> int:
    out = _prepare_out(args)
    result = load_sweep_json(args.sweep)
    cfg = None
    solver = None
    if args.with_deviations:
        if args.data is None:
            raise InputFormatError("--with-deviations requires --data for the reference g")
        traj = load_trajectory(args.data)
        cfg = make_cost_config(traj, lam=args.lam)
        solver = _solver(args)
    ts = sublevel_set(
        result, args.threshold, with_deviations=args.with_deviations, cfg=cfg, solver=solver
    )
    write_threshold_set_json(ts, os.path.join(out, "threshold_set.json"))
    if args.with_deviations:
        write_deviations_csv(ts, cfg.times, os.path.join(out, "deviations.csv"))
    _write_manifest(out, "sublevel", _manifest_params(args))
    print(
        f"threshold {args.threshold:g}: {len(ts.members)} members, "
        f"{ts.connected_components} component(s), anisotropy={ts.anisotropy:.2f}"
    )
    return 0


def cmd_beta_sens(args) -> int:
    out = _prepare_out(args)
    traj = load_trajectory(args.data)
    cfg = make_cost_config(traj, lam=args.lam)
    solver = _solver(args)
    if args.pairs:
        pairs = args.pairs
    elif args.sublevel is not None:
        try:
            with open(args.sublevel, "r") as fh:
                doc = json.load(fh)
            pairs = [(m["alpha1"], m["alpha2"]) for m in doc["members"]]
        except OSError as exc:
            raise InputFormatError(f"cannot read threshold set {args.sublevel}: {exc}") from exc
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputFormatError(
                f"threshold set {args.sublevel} is not a valid sublevel JSON: {exc}"
            ) from exc
    else:
        raise InputFormatError("beta-sens needs --pairs or --sublevel")
    lo, hi, count = args.beta_grid
    curves = beta_sensitivity(
        pairs, cfg, solver, beta_grid=(lo, hi, int(count)), n_workers=args.workers
    )
    path = os.path.join(out, "beta_sens.csv")
    with open(path, "w") as fh:
        fh.write("alpha1,alpha2,beta,J\n")
        for (a1, a2), curve in zip(pairs, curves):
            grid = curve.axes[0].grid
            for b, J in zip(grid, curve.values):
                fh.write(f"{a1:.17g},{a2:.17g},{b:.17g},{J:.17g}\n")
    _write_manifest(out, "beta-sens", _manifest_params(args))
    print(f"wrote {path} ({len(pairs)} curves x {int(count)} beta points)")
    return 0


def cmd_validate(args) -> int:
    out = _prepare_out(args)
    alpha1, alpha2, beta = args.theta
    solver = _solver(args)
    f = default_initial_condition()
    allowance = 2e-2 if beta == 1.0 else 3e-2
    rows = []
    all_pass = True
    for i, t in enumerate(args.t_list):
        config = McForwardConfig(
            n_paths=args.paths,
            dt_step=args.dt_step,
            seed=args.seed + i,
            theta=(alpha1, alpha2, beta),
        )
        spectral = float(solver.origin_values((alpha1, alpha2, beta), np.array([t]))[0])
        estimate, stderr = mc_forward_solution(config, f, t, 0.0, n_workers=args.workers)
        gap = abs(spectral - estimate)
        ok = gap <= 3.0 * stderr + allowance
        all_pass &= ok
        rows.append(
            {
                "t": t,
                "spectral": spectral,
                "estimate": estimate,
                "stderr": stderr,
                "gap": gap,
                "tolerance": 3.0 * stderr + allowance,
                "n_paths": config.n_paths,
                "dt_step": config.dt_step,
                "seed": config.seed,
                "pass": bool(ok),
            }
        )
        print(
            f"t={t:<6g} spectral={spectral:.6f} mc={estimate:.6f}±{stderr:.6f} "
            f"gap={gap:.2e} tol={3.0 * stderr + allowance:.2e} {'PASS' if ok else 'FAIL'}"
        )
    doc = {
        "theta": {"alpha1": alpha1, "alpha2": alpha2, "beta": beta},
        "allowance": allowance,
        "rng": _RNG_NAME,
        "rows": rows,
        "all_pass": bool(all_pass),
    }
    with open(os.path.join(out, "validation.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(out, "validate", _manifest_params(args))
    return 0 if all_pass else 3


def cmd_eig(args) -> int:
    out = _prepare_out(args)
    alpha1, alpha2 = args.theta[0], args.theta[1]
    grid = Grid1D(args.nx)
    matrix = build_operator_matrix(grid, alpha1, alpha2)
    dec = cached_eigendecompose(matrix, args.cache)
    key = cache_key(grid.n_interior, alpha1, alpha2)
    bin_path = os.path.join(out, f"eig_{key}.bin")
    save_decomposition(dec, bin_path)
    csv_path = os.path.join(out, "eigenvalues.csv")
    phi0 = dec.phi_at_center
    with open(csv_path, "w") as fh:
        fh.write("k,mu,phi_at_0\n")
        for k in range(dec.mu.size):
            fh.write(f"{k + 1},{dec.mu[k]:.17g},{phi0[k]:.17g}\n")
    _write_manifest(out, "eig", _manifest_params(args))
    print(f"wrote {csv_path} and {bin_path} (n={grid.n_interior}, mu1={dec.mu[0]:.6f})")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracdiff",
        description=(
            "Forward solver and exponent identification for double-fractional "
            "diffusion on (-1,1) observed at the origin"
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, nx: bool = True) -> None:
        p.add_argument("--out", required=True, help="output directory for this run")
        p.add_argument("--seed", type=int, default=0, help="master RNG seed")
        p.add_argument("--workers", type=int, default=1, help="worker thread count")
        p.add_argument(
            "--cache",
            default=os.environ.get("FRACDIFF_CACHE"),
            help="eigendecomposition cache directory (default: $FRACDIFF_CACHE)",
        )
        if nx:
            p.add_argument(
                "--nx", type=int, default=199, help="interior node count (odd)"
            )

    p = sub.add_parser("generate", help="synthesize an observation trajectory")
    p.add_argument("--theta", type=_theta_type, required=True, metavar="A1,A2,B")
    p.add_argument("--nt", type=int, default=101, help="number of time samples")
    p.add_argument("--t-final", type=float, default=1.0, dest="t_final")
    p.add_argument("--noise-sd", type=float, default=0.0, dest="noise_sd")
    add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fit", help="identify exponents from a trajectory file")
    p.add_argument("--data", required=True, help="trajectory CSV or JSON")
    p.add_argument("--theta", type=_theta_type, default=(1.0, 1.0, 0.5), metavar="A1,A2,B",
                   help="starting point")
    p.add_argument("--lambda", type=float, default=0.0, dest="lam",
                   help="Tikhonov regularization weight")
    add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep", help="evaluate the cost on a parameter grid")
    p.add_argument("--data", required=True)
    p.add_argument("--spec", default=None, help="sweep spec JSON (default: 61x61 pane)")
    p.add_argument("--theta", type=_theta_type, default=None, metavar="A1,A2,B",
                   help="fixed beta source for the default pane")
    p.add_argument("--lambda", type=float, default=0.0, dest="lam")
    add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sublevel", help="extract a threshold set from a sweep")
    p.add_argument("--sweep", required=True, help="sweep.json from a previous run")
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--with-deviations", action="store_true", dest="with_deviations")
    p.add_argument("--data", default=None, help="reference trajectory (for deviations)")
    p.add_argument("--lambda", type=float, default=0.0, dest="lam")
    add_common(p)
    p.set_defaults(func=cmd_sublevel)

    p = sub.add_parser("beta-sens", help="beta sensitivity curves for order pairs")
    p.add_argument("--data", required=True)
    p.add_argument("--pairs", type=_pairs_type, default=None, metavar="A1,A2;A1,A2")
    p.add_argument("--sublevel", default=None, help="threshold_set.json to take pairs from")
    p.add_argument("--beta-grid", type=_float_list_type, default=[0.5, 0.9, 41],
                   dest="beta_grid", metavar="LO,HI,COUNT")
    p.add_argument("--lambda", type=float, default=0.0, dest="lam")
    add_common(p)
    p.set_defaults(func=cmd_beta_sens)

    p = sub.add_parser("validate", help="spectral vs Monte Carlo comparison")
    p.add_argument("--theta", type=_theta_type, required=True, metavar="A1,A2,B",
                   help="orders and time order (beta=1 allowed here)")
    p.add_argument("--t-list", type=_float_list_type, default=[0.05, 0.1, 0.2],
                   dest="t_list", metavar="T1,T2,...")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--dt-step", type=float, default=1e-3, dest="dt_step")
    add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eig", help="dump the eigendecomposition for an order pair")
    p.add_argument("--theta", type=_theta_type, required=True, metavar="A1,A2,B",
                   help="only the first two components are used")
    add_common(p)
    p.set_defaults(func=cmd_eig)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 3
    except BoundaryStallError as exc:
        print(f"boundary stall: {exc}", file=sys.stderr)
        return 4
    except InputFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 5
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 5
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"unexpected error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
