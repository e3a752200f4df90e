"""Regularized least-squares identification of (alpha1, alpha2, beta).

The data misfit is a Simpson-rule quadrature of the squared origin residual,

    J(theta) = 1/2 sum_i w_i (u(t_i, 0; theta) - g(t_i))^2 + lam/2 |theta|^2,

minimized by a projected Levenberg-Marquardt iteration with central
finite-difference Jacobians of the weighted residual r_i = sqrt(w_i) (u - g).
The normal system includes the Tikhonov term exactly:

    (J^T J + (damping + lam) I) delta = -(J^T r + lam theta).

Steps are projected onto a box strictly inside the admissible set; damping
grows tenfold on rejection and shrinks tenfold on acceptance.  Everything is
deterministic given the configs; the only caches involved are the solver's
per-order-pair eigenmodes, keyed on 12-decimal-rounded orders so that the
1e-6-relative finite-difference offsets never collide with the base point.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .forward_model import OriginSolver, ParameterVector, Trajectory

_BOX_MARGIN = 1e-3
DEFAULT_BOX = (
    (_BOX_MARGIN, 2.0 - _BOX_MARGIN),
    (_BOX_MARGIN, 2.0 - _BOX_MARGIN),
    (_BOX_MARGIN, 1.0 - _BOX_MARGIN),
)
_DAMPING_CAP = 1e12
_STALL_LIMIT = 3


def simpson_weights(m: int, dt: float) -> tuple[np.ndarray, bool]:
    """Composite Simpson weights for m uniform nodes spaced dt.

    Needs an even panel count; when m is even (odd panels) the last three
    panels switch to Simpson-3/8 and the second return value reports it.
    """
    if m < 3:
        raise DomainError(f"Simpson quadrature needs at least 3 nodes, got {m}")
    w = np.zeros(m)
    if m % 2 == 1:
        w[0] = w[-1] = 1.0
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return w * (dt / 3.0), False
    # even m: Simpson on the first m-4 panels, 3/8 rule on the last 3
    head = m - 3
    w[0] = w[head - 1] = 1.0
    w[1 : head - 1 : 2] = 4.0
    w[2 : head - 1 : 2] = 2.0
    w *= dt / 3.0
    tail = np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * dt / 8.0)
    w[head - 1 :] += tail
    return w, True


@dataclass(frozen=True)
class CostConfig:
    """Quadrature setup and data for the misfit functional."""

    lam: float
    data: Trajectory
    weights: np.ndarray = field(repr=False)
    uses_three_eighths: bool

    @property
    def times(self) -> np.ndarray:
        return self.data.times


def make_cost_config(data: Trajectory, lam: float = 0.0) -> CostConfig:
    """Validate uniform times starting at 0 and attach Simpson weights."""
    lam = float(lam)
    if not lam >= 0.0:
        raise DomainError(f"regularization weight must be nonnegative, got {lam!r}")
    t = data.times
    if t.size < 3:
        raise DomainError("cost quadrature needs at least 3 time samples")
    if abs(t[0]) > 1e-12:
        raise DomainError(f"quadrature times must start at 0, got t[0]={t[0]!r}")
    dt = t[1] - t[0]
    if np.max(np.abs(np.diff(t) - dt)) > 1e-9 * max(dt, 1.0):
        raise DomainError("quadrature times must be uniformly spaced")
    w, patched = simpson_weights(t.size, dt)
    T = t[-1] - t[0]
    if abs(float(np.sum(w)) - T) > 1e-12 * max(T, 1.0):
        raise DomainError("Simpson weights failed to reproduce the interval length")
    return CostConfig(lam=lam, data=data, weights=w, uses_three_eighths=patched)


@dataclass(frozen=True)
class OptimizerConfig:
    theta0: ParameterVector
    box: tuple[tuple[float, float], ...] = DEFAULT_BOX
    fd_step: float = 1e-6
    lm_damping0: float = 1e-3
    damping_increase: float = 10.0
    damping_decrease: float = 10.0
    max_iter: int = 200
    gtol: float = 1e-10
    ftol: float = 1e-12

    def __post_init__(self) -> None:
        th = np.array(self.theta0.as_tuple())
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        if not (np.all(th > lo) and np.all(th < hi)):
            raise DomainError(
                f"starting point {tuple(th)} must lie strictly inside the box {self.box}"
            )


@dataclass(frozen=True)
class FitReport:
    theta_hat: ParameterVector
    cost_final: float
    iterations: int
    termination: str
    residual_norm: float
    alpha_condition: float
    alpha_strip_degenerate: bool
    trace: tuple[dict, ...]


def _theta_array(theta) -> np.ndarray:
    if isinstance(theta, ParameterVector):
        return np.array(theta.as_tuple())
    arr = np.asarray(theta, dtype=float)
    # route through the type so every entry point enforces the open box
    ParameterVector(*arr)
    return arr


def residuals(theta, cfg: CostConfig, solver: OriginSolver) -> np.ndarray:
    """Weighted residual vector r_i = sqrt(w_i) (u(t_i,0;theta) - g(t_i))."""
    th = _theta_array(theta)
    u = solver.origin_values(th, cfg.times)
    return np.sqrt(cfg.weights) * (u - cfg.data.values)


def cost(theta, cfg: CostConfig, solver: OriginSolver) -> float:
    """J(theta); nonnegative, zero only on exact data with lam = 0."""
    th = _theta_array(theta)
    r = residuals(th, cfg, solver)
    return 0.5 * float(r @ r) + 0.5 * cfg.lam * float(th @ th)


def jacobian_fd(
    theta,
    cfg: CostConfig,
    solver: OriginSolver,
    fd_step: float = 1e-6,
    box: tuple[tuple[float, float], ...] = DEFAULT_BOX,
    n_workers: int = 1,
) -> np.ndarray:
    """Central finite differences of the weighted residual, m x 3.

    Each probe point is clipped into the box and the difference is divided
    by the realized span, so derivatives stay consistent near the walls.
    """
    th = _theta_array(theta)
    probes = []
    spans = np.zeros(3)
    for k in range(3):
        hk = fd_step * max(abs(th[k]), 1e-3)
        lo, hi = box[k]
        up = min(th[k] + hk, hi)
        dn = max(th[k] - hk, lo)
        if not up > dn:
            raise DomainError(f"no room for a finite-difference step in component {k}")
        spans[k] = up - dn
        for v in (up, dn):
            p = th.copy()
            p[k] = v
            probes.append(p)

    def run(p: np.ndarray) -> np.ndarray:
        return residuals(p, cfg, solver)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            vals = list(pool.map(run, probes))
    else:
        vals = [run(p) for p in probes]
    cols = [(vals[2 * k] - vals[2 * k + 1]) / spans[k] for k in range(3)]
    return np.stack(cols, axis=1)


def _alpha_condition(jac: np.ndarray) -> float:
    s = np.linalg.svd(jac[:, :2], compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def fit(
    cfg: CostConfig,
    opt: OptimizerConfig,
    solver: OriginSolver,
    n_workers: int = 1,
) -> FitReport:
    """Projected Levenberg-Marquardt minimization of the regularized misfit."""
    lo = np.array([b[0] for b in opt.box])
    hi = np.array([b[1] for b in opt.box])
    th = _theta_array(opt.theta0)
    lam = cfg.lam
    damping = opt.lm_damping0
    J_now = cost(th, cfg, solver)
    trace: list[dict] = []
    termination = "max_iter"
    stall = 0
    iterations = 0
    jac = None

    for it in range(opt.max_iter):
        iterations = it
        r = residuals(th, cfg, solver)
        jac = jacobian_fd(th, cfg, solver, opt.fd_step, opt.box, n_workers)
        grad = jac.T @ r + lam * th
        gnorm = float(np.max(np.abs(grad)))
        trace.append(
            {
                "iteration": it,
                "theta": [float(v) for v in th],
                "cost": J_now,
                "grad_norm": gnorm,
                "damping": damping,
            }
        )
        if gnorm <= opt.gtol:
            termination = "gradient"
            break

        H = jac.T @ jac
        accepted = False
        while damping <= _DAMPING_CAP:
            A = H + (damping + lam) * np.eye(3)
            try:
                delta = np.linalg.solve(A, -grad)
            except np.linalg.LinAlgError:
                damping *= opt.damping_increase
                continue
            proposal = np.clip(th + delta, lo, hi)
            J_try = cost(proposal, cfg, solver)
            if J_try < J_now:
                accepted = True
                hit_wall = bool(np.any((proposal <= lo) | (proposal >= hi)))
                rel_drop = (J_now - J_try) / max(J_now, 1e-300)
                th = proposal
                J_now = J_try
                damping = max(damping / opt.damping_decrease, 1e-15)
                if hit_wall and rel_drop <= math.sqrt(opt.ftol):
                    stall += 1
                else:
                    stall = 0
                if stall >= _STALL_LIMIT:
                    termination = "boundary"
                elif rel_drop <= opt.ftol:
                    termination = "cost"
                break
            damping *= opt.damping_increase
        if not accepted:
            termination = "step"
            break
        if termination in ("boundary", "cost"):
            break
    else:
        iterations = opt.max_iter
        termination = "max_iter"

    r = residuals(th, cfg, solver)
    if jac is None:
        jac = jacobian_fd(th, cfg, solver, opt.fd_step, opt.box, n_workers)
    acond = _alpha_condition(jac)
    return FitReport(
        theta_hat=ParameterVector(*th),
        cost_final=J_now,
        iterations=iterations,
        termination=termination,
        residual_norm=float(np.linalg.norm(r)),
        alpha_condition=acond,
        alpha_strip_degenerate=bool(acond > 1e6),
        trace=tuple(trace),
    )


def write_fit_report(report: FitReport, path: str) -> None:
    doc = {
        "theta_hat": report.theta_hat.as_dict(),
        "cost_final": report.cost_final,
        "iterations": report.iterations,
        "termination": report.termination,
        "residual_norm": report.residual_norm,
        "alpha_condition": report.alpha_condition,
        "alpha_strip_degenerate": report.alpha_strip_degenerate,
        "trace": list(report.trace),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def write_residuals_csv(theta, cfg: CostConfig, solver: OriginSolver, path: str) -> None:
    th = _theta_array(theta)
    u = solver.origin_values(th, cfg.times)
    resid = u - cfg.data.values
    with open(path, "w") as fh:
        fh.write("t,residual\n")
        for t, v in zip(cfg.times, resid):
            fh.write(f"{t:.17g},{v:.17g}\n")
