"""Shared fixtures: reference data, solvers with a shared eigensolve cache,
and the session-wide default-pane sweep used by the acceptance tests."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fracdiff import (
    Grid1D,
    OriginSolver,
    ParameterVector,
    Trajectory,
    default_pane_spec,
    make_cost_config,
    sweep,
)

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

THETA_STAR = (0.5, 1.5, 0.7)


@pytest.fixture(scope="session")
def eig_cache(tmp_path_factory):
    return str(tmp_path_factory.mktemp("eig_cache"))


@pytest.fixture(scope="session")
def grid199():
    return Grid1D(199)


@pytest.fixture(scope="session")
def origin_solver(grid199, eig_cache):
    return OriginSolver(grid199, cache_dir=eig_cache)


@pytest.fixture(scope="session")
def origin_solver_99(eig_cache):
    return OriginSolver(Grid1D(99), cache_dir=eig_cache)


@pytest.fixture(scope="session")
def theta_star():
    return ParameterVector(*THETA_STAR)


@pytest.fixture(scope="session")
def reference_trajectory(origin_solver, theta_star):
    times = np.linspace(0.0, 1.0, 101)
    values = origin_solver.origin_values(theta_star, times)
    return Trajectory(times=times, values=values)


@pytest.fixture(scope="session")
def cost_config(reference_trajectory):
    return make_cost_config(reference_trajectory, lam=0.0)


@pytest.fixture(scope="session")
def reference_trajectory_99(origin_solver_99, theta_star):
    times = np.linspace(0.0, 1.0, 101)
    values = origin_solver_99.origin_values(theta_star, times)
    return Trajectory(times=times, values=values)


@pytest.fixture(scope="session")
def cost_config_99(reference_trajectory_99):
    return make_cost_config(reference_trajectory_99, lam=0.0)


@pytest.fixture(scope="session")
def pane_sweep(cost_config, origin_solver):
    # 61x61 default pane at beta = 0.7; shared by the identifiability tests.
    spec = default_pane_spec(0.7)
    return sweep(spec, cost_config, origin_solver, n_workers=4)
