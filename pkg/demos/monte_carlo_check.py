"""Cross-check the spectral solver against the stochastic representation.

The solution at the origin equals E[f(Z_{E_t}) ; t < exit time] for the
killed stable process Z time-changed by the inverse subordinator E_t.  This
runs a modest path count so it finishes in a few seconds; the validate
subcommand does the same with 10^5 paths.
"""

import numpy as np

from fracdiff import (
    Grid1D,
    McForwardConfig,
    OriginSolver,
    default_initial_condition,
    mc_forward_solution,
)

solver = OriginSolver(Grid1D(199))
f = default_initial_condition()

print("spectral vs Monte Carlo at x = 0, (alpha1, alpha2) = (0.5, 1.5):")
print(f"{'beta':>5} {'t':>6} {'spectral':>10} {'mc':>10} {'stderr':>9} {'gap':>9}")
for beta, t in ((1.0, 0.1), (1.0, 0.2), (0.7, 0.1)):
    config = McForwardConfig(n_paths=20_000, dt_step=1e-3, seed=11, theta=(0.5, 1.5, beta))
    spectral = float(solver.origin_values((0.5, 1.5, beta), np.array([t]))[0])
    estimate, stderr = mc_forward_solution(config, f, t, 0.0, n_workers=4)
    print(
        f"{beta:5.1f} {t:6.2f} {spectral:10.6f} {estimate:10.6f} "
        f"{stderr:9.6f} {abs(spectral - estimate):9.6f}"
    )

# killing only removes mass: the free-motion average dominates
config = McForwardConfig(n_paths=20_000, dt_step=1e-3, seed=11, theta=(0.5, 1.5, 0.7))
killed, _ = mc_forward_solution(config, f, 0.3, 0.0, n_workers=4, killed=True)
free, _ = mc_forward_solution(config, f, 0.3, 0.0, n_workers=4, killed=False)
print(f"\nkilled vs free at t = 0.3: {killed:.6f} <= {free:.6f}")
