"""Cost-landscape exploration: grids, cross-sections, sublevel sets, beta curves.

Everything here is a thin, deterministic layer over inversion.cost: a sweep
evaluates the exact same functional at every grid point (no surrogate, no
interpolation), so sweep values agree bit-for-bit with individual cost calls.
Grid points are evaluated independently, optionally in parallel; results land
in index-addressed slots, which keeps the output identical for any worker
count.

Default grids reconstruct the identifiability figures: a 61x61 pane over
(alpha1, alpha2) in [0.2,0.9]x[1.1,1.9] at fixed beta, and 41-point beta
curves over [0.5, 0.9].
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DomainError, InputFormatError
from .forward_model import OriginSolver, Trajectory
from .inversion import CostConfig, cost

_PARAM_BOUNDS = {"alpha1": (0.0, 2.0), "alpha2": (0.0, 2.0), "beta": (0.0, 1.0)}
_PARAM_ORDER = ("alpha1", "alpha2", "beta")

DEFAULT_PANE = {"alpha1": (0.2, 0.9, 61), "alpha2": (1.1, 1.9, 61)}
DEFAULT_BETA_GRID = (0.5, 0.9, 41)


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self) -> None:
        if self.name not in _PARAM_BOUNDS:
            raise DomainError(f"unknown sweep parameter {self.name!r}")
        lo, hi = float(self.lo), float(self.hi)
        blo, bhi = _PARAM_BOUNDS[self.name]
        if not (blo < lo < hi < bhi):
            raise DomainError(
                f"swept range [{lo}, {hi}] for {self.name} must sit strictly inside "
                f"({blo}, {bhi}) with lo < hi"
            )
        if int(self.count) < 2:
            raise DomainError(f"axis {self.name} needs at least 2 points, got {self.count}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "count", int(self.count))

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """One or two swept parameters, the rest held fixed."""

    axes: tuple[Axis, ...]
    fixed: dict[str, float]

    def __post_init__(self) -> None:
        if len(self.axes) not in (1, 2):
            raise DomainError("sweeps support exactly 1 or 2 swept parameters")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise DomainError(f"swept parameters must be distinct, got {names}")
        expected = [p for p in _PARAM_ORDER if p not in names]
        if sorted(self.fixed) != sorted(expected):
            raise DomainError(
                f"fixed values must cover exactly {expected}, got {sorted(self.fixed)}"
            )
        for name, v in self.fixed.items():
            blo, bhi = _PARAM_BOUNDS[name]
            if not blo < float(v) < bhi:
                raise DomainError(f"fixed {name}={v!r} lies outside ({blo}, {bhi})")

    def theta_at(self, idx: tuple[int, ...]) -> tuple[float, float, float]:
        point = dict(self.fixed)
        for ax, i in zip(self.axes, idx):
            point[ax.name] = float(ax.grid[i])
        return (point["alpha1"], point["alpha2"], point["beta"])


@dataclass(frozen=True)
class SweepResult:
    axes: tuple[Axis, ...]
    values: np.ndarray = field(repr=False)
    meta: dict

    def __post_init__(self) -> None:
        shape = tuple(a.count for a in self.axes)
        if self.values.shape != shape:
            raise DomainError(
                f"value array shape {self.values.shape} does not match axes {shape}"
            )
        if not np.all(np.isfinite(self.values)) or np.min(self.values) < 0.0:
            raise DomainError("sweep values must be finite and nonnegative")


@dataclass(frozen=True)
class ThresholdSet:
    """Grid points with J strictly below a threshold, plus strip geometry."""

    threshold: float
    members: tuple[dict, ...]
    connected_components: int
    principal_extent: float
    transverse_extent: float
    deviations: tuple[np.ndarray, ...] | None = None

    @property
    def anisotropy(self) -> float:
        if self.transverse_extent == 0.0:
            return float("inf")
        return self.principal_extent / self.transverse_extent


def _data_digest(traj: Trajectory) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(traj.times).tobytes())
    h.update(np.ascontiguousarray(traj.values).tobytes())
    return h.hexdigest()


def sweep(
    spec: SweepSpec,
    cfg: CostConfig,
    solver: OriginSolver,
    n_workers: int = 1,
) -> SweepResult:
    """Evaluate the cost at every grid point of the spec.

    Points are independent; with n_workers > 1 they are evaluated in a
    thread pool, each writing its own slot, so the result is identical for
    every worker count.
    """
    shape = tuple(a.count for a in spec.axes)
    indices = list(np.ndindex(*shape))
    thetas = [spec.theta_at(idx) for idx in indices]
    values = np.empty(shape)
    start = time.monotonic()

    def run(k: int) -> None:
        values[indices[k]] = cost(thetas[k], cfg, solver)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(run, range(len(indices))))
    else:
        for k in range(len(indices)):
            run(k)

    meta = {
        "fixed": dict(spec.fixed),
        "axes": [
            {"name": a.name, "lo": a.lo, "hi": a.hi, "count": a.count} for a in spec.axes
        ],
        "lambda": cfg.lam,
        "data_sha256": _data_digest(cfg.data),
        "elapsed_seconds": time.monotonic() - start,
    }
    return SweepResult(axes=spec.axes, values=values, meta=meta)


def sublevel_set(
    result: SweepResult,
    threshold: float,
    with_deviations: bool = False,
    cfg: CostConfig | None = None,
    solver: OriginSolver | None = None,
) -> ThresholdSet:
    """Members of {J < threshold} on a 2-D sweep, with strip geometry.

    Principal and transverse extents come from projecting member coordinates
    onto the principal axes of their covariance; connectedness uses
    8-neighbor adjacency on the grid.
    """
    threshold = float(threshold)
    if not threshold > 0.0:
        raise InputFormatError(f"threshold must be positive, got {threshold!r}")
    if result.values.ndim != 2:
        raise DomainError("sublevel sets require a 2-D sweep result")
    mask = result.values < threshold
    n_members = int(mask.sum())
    _, n_comp = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))

    g1 = result.axes[0].grid
    g2 = result.axes[1].grid
    ii, jj = np.nonzero(mask)
    members = tuple(
        {
            result.axes[0].name: float(g1[i]),
            result.axes[1].name: float(g2[j]),
            "J": float(result.values[i, j]),
            "index": [int(i), int(j)],
        }
        for i, j in zip(ii, jj)
    )

    if n_members >= 2:
        coords = np.column_stack([g1[ii], g2[jj]])
        centered = coords - coords.mean(axis=0)
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        proj = centered @ vt.T
        extents = proj.max(axis=0) - proj.min(axis=0)
        principal, transverse = float(extents[0]), float(extents[-1])
    else:
        principal = transverse = 0.0

    deviations: tuple[np.ndarray, ...] | None = None
    if with_deviations:
        if cfg is None or solver is None:
            raise InputFormatError("deviations need the cost config and solver context")
        beta = result.meta["fixed"].get("beta")
        if beta is None:
            raise DomainError("deviations require a sweep with fixed beta")
        devs = []
        for mm in members:
            theta = (mm["alpha1"], mm["alpha2"], beta)
            u = solver.origin_values(theta, cfg.times)
            devs.append(u - cfg.data.values)
        deviations = tuple(devs)

    return ThresholdSet(
        threshold=threshold,
        members=members,
        connected_components=int(n_comp),
        principal_extent=principal,
        transverse_extent=transverse,
        deviations=deviations,
    )


def beta_sensitivity(
    pairs: list[tuple[float, float]],
    cfg: CostConfig,
    solver: OriginSolver,
    beta_grid: tuple[float, float, int] = DEFAULT_BETA_GRID,
    n_workers: int = 1,
) -> list[SweepResult]:
    """One beta-curve J(alpha1, alpha2, .) per pair on a common beta grid."""
    if not pairs:
        raise InputFormatError("beta_sensitivity needs at least one (alpha1, alpha2) pair")
    lo, hi, count = beta_grid
    out = []
    for a1, a2 in pairs:
        spec = SweepSpec(
            axes=(Axis("beta", lo, hi, count),),
            fixed={"alpha1": float(a1), "alpha2": float(a2)},
        )
        out.append(sweep(spec, cfg, solver, n_workers=n_workers))
    return out


def default_pane_spec(beta: float = 0.7) -> SweepSpec:
    """The 61x61 (alpha1, alpha2) pane used by the identifiability figures."""
    a1 = DEFAULT_PANE["alpha1"]
    a2 = DEFAULT_PANE["alpha2"]
    return SweepSpec(
        axes=(Axis("alpha1", a1[0], a1[1], a1[2]), Axis("alpha2", a2[0], a2[1], a2[2])),
        fixed={"beta": float(beta)},
    )


def write_sweep_csv(result: SweepResult, path: str) -> None:
    """Long format, one row per grid point; first axis varies slowest."""
    names = [a.name for a in result.axes]
    with open(path, "w") as fh:
        fh.write(",".join(names + ["J"]) + "\n")
        for idx in np.ndindex(*result.values.shape):
            coords = [f"{result.axes[d].grid[idx[d]]:.17g}" for d in range(len(names))]
            fh.write(",".join(coords + [f"{result.values[idx]:.17g}"]) + "\n")


def write_sweep_json(result: SweepResult, path: str, include_timing: bool = False) -> None:
    meta = dict(result.meta)
    if not include_timing:
        # keep the file byte-reproducible across reruns
        meta.pop("elapsed_seconds", None)
    doc = {
        "axes": {a.name: [float(v) for v in a.grid] for a in result.axes},
        "values": result.values.tolist(),
        "meta": meta,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_sweep_json(path: str) -> SweepResult:
    """Re-hydrate a SweepResult written by write_sweep_json."""
    try:
        with open(path, "r") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputFormatError(f"cannot read sweep file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"malformed sweep JSON {path}: {exc}") from exc
    try:
        axes = tuple(
            Axis(a["name"], a["lo"], a["hi"], a["count"]) for a in doc["meta"]["axes"]
        )
        values = np.asarray(doc["values"], dtype=float)
        return SweepResult(axes=axes, values=values, meta=doc["meta"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"sweep JSON {path} is missing required fields: {exc}") from exc


def write_threshold_set_json(ts: ThresholdSet, path: str) -> None:
    doc = {
        "threshold": ts.threshold,
        "count": len(ts.members),
        "connected_components": ts.connected_components,
        "principal_extent": ts.principal_extent,
        "transverse_extent": ts.transverse_extent,
        "members": list(ts.members),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_deviations_csv(ts: ThresholdSet, times: np.ndarray, path: str) -> None:
    if ts.deviations is None:
        raise InputFormatError("threshold set carries no deviations; rerun with the flag")
    with open(path, "w") as fh:
        fh.write("alpha1,alpha2,t,deviation\n")
        for mm, dev in zip(ts.members, ts.deviations):
            for t, d in zip(times, dev):
                fh.write(
                    f"{mm['alpha1']:.17g},{mm['alpha2']:.17g},{t:.17g},{d:.17g}\n"
                )
