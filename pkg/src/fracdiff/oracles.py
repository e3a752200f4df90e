"""Independent checks: Monte Carlo for the subordinated killed process, and an
L1 Caputo-derivative stencil.

Nothing here shares numerics with the spectral solver.  The Monte Carlo route
estimates u(t, x) from the probabilistic picture: run the sum of two
independent symmetric stable motions, kill it on leaving (-1,1), and stop it
at an independent inverse-stable time.  The Caputo stencil checks the
time-fractional side.  Agreement between these and the spectral solution is
what the validate pipeline certifies.

Determinism contract: a master seed is split into per-batch child seeds with
numpy's SeedSequence.spawn, every batch has a fixed size, and partial sums are
combined with a fixed-order pairwise reduction.  Estimates are therefore
bit-identical for a given (config, f, t, x) no matter how many workers run
the batches.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

from .errors import DomainError, InputFormatError
from .forward_model import InitialCondition, ParameterVector

_BATCH = 2048
_RNG_NAME = "PCG64"


@dataclass(frozen=True)
class StableSamplerConfig:
    """Symmetric stable sampler setup; characteristic function exp(-t|xi|^alpha)."""

    alpha: float
    seed: int
    scale_convention: str = "exp(-t|xi|^alpha)"

    def __post_init__(self) -> None:
        if not 0.0 < float(self.alpha) < 2.0:
            raise DomainError(f"stable index must lie in (0, 2), got {self.alpha!r}")

    def make_rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed))


def _unpack_theta(theta) -> tuple[float, float, float]:
    if isinstance(theta, ParameterVector):
        return theta.as_tuple()
    alpha1, alpha2, beta = (float(v) for v in theta)
    for name, v in (("alpha1", alpha1), ("alpha2", alpha2)):
        if not math.isfinite(v) or not 0.0 < v < 2.0:
            raise DomainError(f"{name} must lie in (0, 2), got {v!r}")
    # beta = 1 is admitted here (classical subordination), unlike in Theta
    if not math.isfinite(beta) or not 0.0 < beta <= 1.0:
        raise DomainError(f"beta must lie in (0, 1], got {beta!r}")
    return alpha1, alpha2, beta


@dataclass(frozen=True)
class McForwardConfig:
    """Path-simulation setup for one Monte Carlo estimate of u(t, x)."""

    n_paths: int
    dt_step: float
    seed: int
    theta: tuple[float, float, float]

    def __post_init__(self) -> None:
        if int(self.n_paths) < 1:
            raise InputFormatError(f"n_paths must be at least 1, got {self.n_paths!r}")
        object.__setattr__(self, "n_paths", int(self.n_paths))
        if not float(self.dt_step) > 0.0:
            raise DomainError(f"dt_step must be positive, got {self.dt_step!r}")
        object.__setattr__(self, "dt_step", float(self.dt_step))
        object.__setattr__(self, "theta", _unpack_theta(self.theta))


def _symmetric_stable(alpha: float, rng: np.random.Generator, size: int) -> np.ndarray:
    # Chambers-Mallows-Stuck transform, standardized to exp(-|xi|^alpha)
    u = rng.uniform(-np.pi / 2.0, np.pi / 2.0, size)
    if alpha == 1.0:
        return np.tan(u)
    w = rng.standard_exponential(size)
    return (np.sin(alpha * u) / np.cos(u) ** (1.0 / alpha)) * (
        np.cos((1.0 - alpha) * u) / w
    ) ** ((1.0 - alpha) / alpha)


def sample_symmetric_stable(alpha: float, t_scale: float, rng: np.random.Generator, size: int | None = None):
    """Draws of X_{t_scale} with characteristic function exp(-t|xi|^alpha).

    Returns a float when size is None, else an array of that many draws.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"stable index must lie in (0, 2), got {alpha!r}")
    t_scale = float(t_scale)
    if not t_scale > 0.0:
        raise DomainError(f"t_scale must be positive, got {t_scale!r}")
    n = 1 if size is None else int(size)
    x = t_scale ** (1.0 / alpha) * _symmetric_stable(alpha, rng, n)
    return float(x[0]) if size is None else x


def _one_sided_stable(beta: float, rng: np.random.Generator, size: int) -> np.ndarray:
    # Kanter's representation; Laplace transform exp(-lambda^beta)
    theta = rng.uniform(0.0, np.pi, size)
    w = rng.standard_exponential(size)
    return (np.sin(beta * theta) / np.sin(theta) ** (1.0 / beta)) * (
        np.sin((1.0 - beta) * theta) / w
    ) ** ((1.0 - beta) / beta)


def sample_inverse_stable_subordinator(
    beta: float, t: float, rng: np.random.Generator, size: int | None = None
):
    """Draws of the inverse beta-stable subordinator at time t.

    Uses the self-similarity identity E_t = (t / S_1)^beta in distribution,
    with S_1 a standard one-sided stable draw.
    """
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"subordinator order must lie in (0, 1), got {beta!r}")
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t!r}")
    n = 1 if size is None else int(size)
    e = (t / _one_sided_stable(beta, rng, n)) ** beta
    return float(e[0]) if size is None else e


def _simulate_batch(
    config: McForwardConfig,
    f: InitialCondition,
    t: float,
    x: float,
    child_seed: np.random.SeedSequence,
    size: int,
    killed: bool,
) -> tuple[float, float]:
    """One batch of paths; returns (sum of contributions, sum of squares)."""
    alpha1, alpha2, beta = config.theta
    dt = config.dt_step
    rng = np.random.default_rng(child_seed)

    if beta == 1.0:
        s = np.full(size, t)
    else:
        s = sample_inverse_stable_subordinator(beta, t, rng, size)

    z = np.full(size, x)
    alive = np.ones(size, dtype=bool)
    n_full = np.floor(s / dt).astype(np.int64)
    remainder = s - n_full * dt
    scale1 = dt ** (1.0 / alpha1)
    scale2 = dt ** (1.0 / alpha2)
    for step in range(int(n_full.max()) if size else 0):
        dx = scale1 * _symmetric_stable(alpha1, rng, size)
        dy = scale2 * _symmetric_stable(alpha2, rng, size)
        move = alive & (step < n_full)
        z[move] += dx[move] + dy[move]
        if killed:
            alive &= np.abs(z) < 1.0
    # final partial step, one lane-specific scale each
    dx = remainder ** (1.0 / alpha1) * _symmetric_stable(alpha1, rng, size)
    dy = remainder ** (1.0 / alpha2) * _symmetric_stable(alpha2, rng, size)
    z[alive] += dx[alive] + dy[alive]
    if killed:
        alive &= np.abs(z) < 1.0

    # f is zero outside the closed domain, so clipping is the exterior-zero
    # extension, not an approximation
    fz = f(np.clip(z, -1.0, 1.0))
    outside = np.abs(z) >= 1.0
    fz[outside] = 0.0
    contrib = np.where(alive, fz, 0.0) if killed else np.abs(fz)
    return float(np.add.reduce(contrib)), float(np.add.reduce(contrib * contrib))


def mc_forward_solution(
    config: McForwardConfig,
    f: InitialCondition,
    t: float,
    x: float,
    n_workers: int = 1,
    killed: bool = True,
) -> tuple[float, float]:
    """Monte Carlo estimate of u(t, x) with its standard error.

    killed=False gives the free-motion average of |f| instead, used by the
    domination check (killed averages can never exceed it).
    """
    t = float(t)
    x = float(x)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t!r}")
    if not -1.0 < x < 1.0:
        raise DomainError(f"start point must lie inside (-1, 1), got {x!r}")
    n = config.n_paths
    sizes = [_BATCH] * (n // _BATCH)
    if n % _BATCH:
        sizes.append(n % _BATCH)
    children = np.random.SeedSequence(config.seed).spawn(len(sizes))

    def run(i: int) -> tuple[float, float]:
        return _simulate_batch(config, f, t, x, children[i], sizes[i], killed)

    if n_workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]

    # fixed-order pairwise reduction: independent of worker count
    sums = np.array([p[0] for p in parts])
    sqs = np.array([p[1] for p in parts])
    total = float(np.add.reduce(sums))
    total_sq = float(np.add.reduce(sqs))
    mean = total / n
    if n > 1:
        var = max(total_sq - n * mean * mean, 0.0) / (n - 1)
        stderr = math.sqrt(var / n)
    else:
        stderr = float("inf")
    return mean, stderr


def caputo_l1(q: np.ndarray, beta: float, dt: float) -> np.ndarray:
    """L1 stencil for the Caputo derivative of order beta on a uniform grid.

    q holds samples q(0), q(dt), ..., q(m*dt); the return has one entry per
    positive node.  Accuracy is O(dt^{2-beta}) for twice-differentiable q.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or q.size < 2:
        raise InputFormatError("caputo_l1 needs at least two samples on a uniform grid")
    if not np.all(np.isfinite(q)):
        raise InputFormatError("caputo_l1 samples must be finite")
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"Caputo order must lie in (0, 1), got {beta!r}")
    dt = float(dt)
    if not dt > 0.0:
        raise DomainError(f"grid spacing must be positive, got {dt!r}")
    m = q.size - 1
    j = np.arange(m, dtype=float)
    b = (j + 1.0) ** (1.0 - beta) - j ** (1.0 - beta)
    dq = np.diff(q)
    conv = np.convolve(dq, b)[:m]
    return dt ** (-beta) * rgamma(2.0 - beta) * conv


def write_oracle_report(
    path: str,
    config: McForwardConfig,
    t: float,
    x: float,
    estimate: float,
    stderr: float,
) -> None:
    alpha1, alpha2, beta = config.theta
    doc = {
        "estimate": estimate,
        "stderr": stderr,
        "n_paths": config.n_paths,
        "dt_step": config.dt_step,
        "seed": config.seed,
        "theta": {"alpha1": alpha1, "alpha2": alpha2, "beta": beta},
        "t": t,
        "x": x,
        "rng": _RNG_NAME,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
