"""Top-level acceptance checks for the whole pipeline.

Each test prints one `[criterion N] PASS/FAIL ...` line with the measured
numbers, then asserts.  Two known shortfalls (6a, 6c) are kept as honest
failures rather than loosened; see the Known limitations section of the
README for the measured geometry behind them.
"""

import json
import math
import time

import numpy as np
from scipy.special import erfcx

from fracdiff import (
    Grid1D,
    McForwardConfig,
    OptimizerConfig,
    ParameterVector,
    beta_sensitivity,
    build_operator_matrix,
    caputo_l1,
    cost,
    default_initial_condition,
    eigendecompose,
    fit,
    mc_forward_solution,
    mlf,
    mlf_neg_batch,
    sublevel_set,
)
from fracdiff.cli import main as cli_main

THETA_STAR = (0.5, 1.5, 0.7)


def _line(n, ok, detail):
    print(f"[criterion {n}] {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def test_criterion_1_mittag_leffler_identities():
    t0 = time.monotonic()
    z1 = np.linspace(-50.0, 0.0, 251)
    err_exp = max(abs(mlf(z, 1.0) - np.exp(z)) for z in z1)
    z2 = np.linspace(-5.0, 0.0, 251)
    err_half = max(abs(mlf(z, 0.5) - erfcx(-z)) for z in z2)
    ratios = [1e6 * mlf(-1e6, b) * math.gamma(1.0 - b) for b in (0.3, 0.5, 0.7, 0.9)]
    elapsed = time.monotonic() - t0
    ok = (
        err_exp <= 1e-10
        and err_half <= 1e-10
        and all(0.999 <= r <= 1.001 for r in ratios)
        and elapsed < 1.0
    )
    _line(
        1,
        ok,
        f"|E1-exp|={err_exp:.2e} |E_half-erfcx|={err_half:.2e} "
        f"asym_ratios={[f'{r:.6f}' for r in ratios]} elapsed={elapsed:.2f}s",
    )
    assert ok


def test_criterion_2_caputo_eigenrelaxation():
    t0 = time.monotonic()
    beta, lam, dt = 0.7, 5.0, 1e-3
    t = np.arange(0.0, 1.0 + dt / 2, dt)
    q = mlf_neg_batch(lam * t**beta, beta)
    deriv = caputo_l1(q, beta, dt)
    residual = deriv + lam * q[1:]
    mask = t[1:] >= 0.1
    err = float(np.max(np.abs(residual[mask])))
    elapsed = time.monotonic() - t0
    ok = err <= 1e-2 and elapsed < 1.0
    _line(2, ok, f"max|d^b E_b + {lam} E_b|={err:.2e} on t in [0.1,1] elapsed={elapsed:.2f}s")
    assert ok


def test_criterion_3_operator_correctness():
    t0 = time.monotonic()
    # (a) alpha -> 2 proxy: single-order spectrum is half the matched pair's
    dec = eigendecompose(build_operator_matrix(Grid1D(999), 1.999, 1.999))
    single = dec.mu / 2.0
    targets = np.array([(k * np.pi / 2.0) ** 2 for k in (1, 2, 3)])
    rel_a = float(np.max(np.abs(single[:3] - targets) / targets))

    # (b) mesh convergence of mu_1 at (0.5, 1.5): h in {1/100, 1/200, 1/400}
    mu1 = [
        eigendecompose(build_operator_matrix(Grid1D(n), 0.5, 1.5)).mu[0]
        for n in (199, 399, 799)
    ]
    ratio = (mu1[0] - mu1[1]) / (mu1[1] - mu1[2])

    # (c) growth band mu_k / (k^0.5 + k^1.5) over k = 1..50 at n = 199
    dec199 = eigendecompose(build_operator_matrix(Grid1D(199), 0.5, 1.5))
    k = np.arange(1, 51, dtype=float)
    band = dec199.mu[:50] / (k**0.5 + k**1.5)
    band_span = float(band.max() / band.min())

    elapsed = time.monotonic() - t0
    ok = rel_a <= 0.02 and 2.7 <= ratio <= 6.0 and band_span <= 10.0 and elapsed < 30.0
    _line(
        3,
        ok,
        f"classical_rel_err={rel_a:.4f} mesh_ratio={ratio:.2f} "
        f"band_span={band_span:.2f} elapsed={elapsed:.1f}s",
    )
    assert ok


def test_criterion_4_spectral_vs_monte_carlo(origin_solver):
    t0 = time.monotonic()
    f = default_initial_condition()
    gaps = []
    ok = True
    for beta, t_list, allowance in ((1.0, (0.05, 0.1, 0.2), 2e-2), (0.7, (0.1,), 3e-2)):
        for i, t in enumerate(t_list):
            config = McForwardConfig(
                n_paths=100_000, dt_step=1e-3, seed=2000 + i, theta=(0.5, 1.5, beta)
            )
            spectral = float(origin_solver.origin_values((0.5, 1.5, beta), np.array([t]))[0])
            estimate, stderr = mc_forward_solution(config, f, t, 0.0, n_workers=4)
            gap = abs(spectral - estimate)
            tol = 3.0 * stderr + allowance
            gaps.append(f"beta={beta} t={t}: gap={gap:.4f} tol={tol:.4f}")
            ok &= gap <= tol
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 300.0
    _line(4, ok, "; ".join(gaps) + f" elapsed={elapsed:.0f}s")
    assert ok


def test_criterion_5_exact_recovery(cost_config, origin_solver, theta_star):
    t0 = time.monotonic()
    j_star = cost(THETA_STAR, cost_config, origin_solver)
    report = fit(cost_config, OptimizerConfig(theta0=theta_star), origin_solver)
    elapsed = time.monotonic() - t0
    ok = (
        j_star < 1e-20
        and report.iterations <= 1
        and report.termination in ("gradient", "cost")
        and elapsed < 10.0
    )
    _line(
        5,
        ok,
        f"J(theta*)={j_star:.2e} iterations={report.iterations} "
        f"termination={report.termination} elapsed={elapsed:.1f}s",
    )
    assert ok


def test_criterion_6a_strip_geometry(pane_sweep):
    ts = sublevel_set(pane_sweep, 1e-3)
    ok = len(ts.members) > 10 and ts.connected_components == 1 and ts.anisotropy >= 3.0
    _line(
        "6a",
        ok,
        f"members={len(ts.members)} components={ts.connected_components} "
        f"anisotropy={ts.anisotropy:.2f} (need >10, ==1, >=3)",
    )
    assert ok


def test_criterion_6b_sublevel_nesting(pane_sweep):
    sets = {tau: sublevel_set(pane_sweep, tau) for tau in (1e-3, 1e-4, 1e-6)}
    members = {
        tau: {tuple(m["index"]) for m in ts.members} for tau, ts in sets.items()
    }
    nested = members[1e-6] <= members[1e-4] <= members[1e-3]
    g1 = pane_sweep.axes[0].grid
    g2 = pane_sweep.axes[1].grid
    nearest = (int(np.argmin(np.abs(g1 - 0.5))), int(np.argmin(np.abs(g2 - 1.5))))
    has_star = nearest in members[1e-6]
    ok = nested and has_star
    _line(
        "6b",
        ok,
        f"nested={nested} sizes={[len(members[t]) for t in (1e-3, 1e-4, 1e-6)]} "
        f"nearest_grid_point={nearest} in_1e-6={has_star}",
    )
    assert ok


def test_criterion_6c_beta_localization(pane_sweep, cost_config, origin_solver):
    t0 = time.monotonic()
    ts = sublevel_set(pane_sweep, 1e-4)
    pairs = [(m["alpha1"], m["alpha2"]) for m in ts.members]
    curves = beta_sensitivity(pairs, cost_config, origin_solver, n_workers=4)
    grid = curves[0].axes[0].grid
    cell = grid[1] - grid[0]
    mins = np.array([grid[int(np.argmin(c.values))] for c in curves])
    dev = np.abs(mins - 0.7)
    within = int(np.sum(dev <= cell + 1e-12))
    elapsed = time.monotonic() - t0
    total = elapsed + pane_sweep.meta["elapsed_seconds"]
    ok = within == len(pairs) and total < 1800.0
    _line(
        "6c",
        ok,
        f"{within}/{len(pairs)} beta-curves localize within one cell ({cell:.3g}) "
        f"of 0.7, worst dev={dev.max():.3f}, sweep+curves elapsed={total:.0f}s",
    )
    assert ok


def test_criterion_7_fit_from_remote_start(cost_config, origin_solver):
    report = fit(
        cost_config,
        OptimizerConfig(theta0=ParameterVector(1.0, 1.0, 0.5)),
        origin_solver,
        n_workers=4,
    )
    th = report.theta_hat
    ok = (
        report.cost_final < 1e-6
        and abs(th.beta - 0.7) <= 1e-2
        and report.alpha_condition > 1e6
        and report.alpha_strip_degenerate
    )
    _line(
        7,
        ok,
        f"J={report.cost_final:.2e} beta_hat={th.beta:.4f} "
        f"alpha_cond={report.alpha_condition:.2e} degenerate={report.alpha_strip_degenerate}",
    )
    assert ok


def test_criterion_8_pipeline_determinism(tmp_path):
    cache = str(tmp_path / "cache")
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(
        json.dumps(
            {
                "axes": [
                    {"name": "alpha1", "lo": 0.45, "hi": 0.55, "count": 3},
                    {"name": "alpha2", "lo": 1.45, "hi": 1.55, "count": 3},
                ],
                "fixed": {"beta": 0.7},
            }
        )
    )
    common = ["--nx", "99", "--cache", cache]

    def run_all(tag, workers):
        gen = tmp_path / f"gen_{tag}"
        fit_dir = tmp_path / f"fit_{tag}"
        sw = tmp_path / f"sw_{tag}"
        assert cli_main(
            ["generate", "--theta", "0.5,1.5,0.7", "--nt", "41", "--seed", "3",
             "--noise-sd", "1e-4", "--out", str(gen)] + common
        ) == 0
        data = str(gen / "trajectory.csv")
        assert cli_main(
            ["fit", "--data", data, "--theta", "0.6,1.4,0.65",
             "--workers", workers, "--out", str(fit_dir)] + common
        ) == 0
        assert cli_main(
            ["sweep", "--data", data, "--spec", str(spec_path),
             "--workers", workers, "--out", str(sw)] + common
        ) == 0
        return {
            "trajectory.csv": (gen / "trajectory.csv").read_bytes(),
            "fit_report.json": (fit_dir / "fit_report.json").read_bytes(),
            "residuals.csv": (fit_dir / "residuals.csv").read_bytes(),
            "sweep.csv": (sw / "sweep.csv").read_bytes(),
            "sweep.json": (sw / "sweep.json").read_bytes(),
        }

    first = run_all("a", "1")
    rerun = run_all("b", "1")
    pooled = run_all("c", "4")
    same_rerun = {k for k in first if first[k] == rerun[k]}
    same_pooled = {k for k in first if first[k] == pooled[k]}
    ok = len(same_rerun) == len(first) == len(same_pooled)
    _line(
        8,
        ok,
        f"rerun-identical={len(same_rerun)}/{len(first)} "
        f"worker-invariant={len(same_pooled)}/{len(first)}",
    )
    assert ok
