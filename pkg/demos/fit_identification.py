"""Identify the exponents from a noisy origin trace.

Generates g(t) = u(t, 0) at theta* = (0.5, 1.5, 0.7) with additive Gaussian
noise, then runs the box-constrained Levenberg-Marquardt fit from the remote
start (1.0, 1.0, 0.5).  The time order beta is recovered tightly; the two
space orders trade off along a flat valley, which the report flags through
the Jacobian alpha-subblock condition number.
"""

import numpy as np

from fracdiff import (
    Grid1D,
    OptimizerConfig,
    OriginSolver,
    ParameterVector,
    Trajectory,
    fit,
    make_cost_config,
)

theta_star = ParameterVector(0.5, 1.5, 0.7)
solver = OriginSolver(Grid1D(199))
times = np.linspace(0.0, 1.0, 101)
clean = solver.origin_values(theta_star, times)

rng = np.random.default_rng(42)
noisy = clean + rng.normal(0.0, 1e-4, clean.shape)
cfg = make_cost_config(Trajectory(times=times, values=noisy), lam=0.0)

report = fit(cfg, OptimizerConfig(theta0=ParameterVector(1.0, 1.0, 0.5)), solver, n_workers=4)
th = report.theta_hat

print(f"true theta : {theta_star.as_tuple()}")
print(f"start      : (1.0, 1.0, 0.5)")
print(f"estimate   : ({th.alpha1:.4f}, {th.alpha2:.4f}, {th.beta:.4f})")
print(f"cost       : {report.cost_final:.3e} after {report.iterations} iterations")
print(f"termination: {report.termination}")
print(
    f"alpha subblock condition {report.alpha_condition:.2e} "
    f"-> strip degeneracy flag {report.alpha_strip_degenerate}"
)
print(f"|beta_hat - beta*| = {abs(th.beta - theta_star.beta):.2e}")
print("note: alpha1/alpha2 individually are not pinned down; only beta is.")
