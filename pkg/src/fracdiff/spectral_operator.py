"""Discretization and eigendecomposition of the sum of two fractional Laplacians.

The operator is A = A_{alpha1} + A_{alpha2}, where each A_alpha is the dense
positive-definite matrix of (-Delta)^{alpha/2} on (-1,1) with the exterior-zero
condition.  A_alpha comes from the hypersingular integral form

    (-Delta)^{alpha/2} u(x) = -C_alpha PV int_0^inf (u(x+s) + u(x-s) - 2u(x)) s^{-1-alpha} ds,

with the second difference interpolated by hats against exact moments of
s^{1-alpha}, a weighted constant first panel absorbing the singularity, and the
tail beyond the domain integrated exactly (u vanishes there, only -2u(x)
survives).  A plain uniform-grid stencil of this kind is first-order accurate
in its low eigenvalues: the eigenfunctions behave like dist(x, boundary)^{p}
at the walls and the scheme's consistency error concentrates in the few rows
nearest the boundary.  We cancel that layer with a diagonal correction chosen
so the matrix is exact, row by row, on the wall profile (1-x^2)^p whose
fractional Laplacian is known in closed form.  The anchor exponent
p = max(alpha, 2-alpha)/2 keeps the correction single-alpha (so additivity of
the pair matrix is preserved) and restores second-order eigenvalue convergence
for complementary pairs alpha1 + alpha2 = 2; generic pairs land between first
and second order, still well inside the mesh-ratio acceptance band.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, toeplitz
from scipy.special import gamma, hyp2f1

from .errors import ConvergenceError, DomainError

_CACHE_FORMAT = "fracdiff-eig-1"


@dataclass(frozen=True)
class Grid1D:
    """Uniform interior nodes of (-1,1); functions vanish outside.

    n_interior must be odd so x = 0 is the middle node: the observation
    functional is u(t,0) and we never interpolate it.
    """

    n_interior: int

    def __post_init__(self) -> None:
        n = self.n_interior
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise DomainError(f"n_interior must be an integer, got {n!r}")
        if n < 3:
            raise DomainError(f"n_interior must be at least 3, got {n}")
        if n % 2 == 0:
            raise DomainError(
                f"n_interior must be odd so that x=0 is a grid node, got {n}"
            )

    @property
    def h(self) -> float:
        return 2.0 / (self.n_interior + 1)

    @property
    def nodes(self) -> np.ndarray:
        return -1.0 + self.h * np.arange(1, self.n_interior + 1)

    @property
    def center_index(self) -> int:
        # x = 0 sits exactly in the middle for odd n_interior
        return (self.n_interior - 1) // 2

    @property
    def quad_weights(self) -> np.ndarray:
        # trapezoidal with zero boundary values: constant weight h inside
        return np.full(self.n_interior, self.h)


@dataclass(frozen=True)
class OperatorMatrix:
    """Positive-definite matrix of (-Delta)^{alpha1/2} + (-Delta)^{alpha2/2}."""

    alpha1: float
    alpha2: float
    grid: Grid1D
    entries: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs (mu_n, phi_n), ascending, quadrature-orthonormal, sign-fixed.

    phi columns satisfy sum_j h * phi[j,n]^2 = 1 and the largest-magnitude
    entry of each column is positive (first such entry on ties).
    """

    mu: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    grid: Grid1D

    @property
    def phi_at_center(self) -> np.ndarray:
        """phi_n(0) for every mode, as a vector."""
        return self.phi[self.grid.center_index, :].copy()


def _check_order(alpha: float) -> float:
    alpha = float(alpha)
    if not np.isfinite(alpha) or not 0.0 < alpha < 2.0:
        raise DomainError(f"fractional order must lie in (0, 2), got {alpha!r}")
    return alpha


def _base_matrix(n: int, alpha: float, h: float) -> np.ndarray:
    # Hypersingular-form stencil.  Panel moments of s^{1-alpha} give hat
    # weights a_m (left node) and b_m (right node) on [m, m+1] in units of h;
    # the first panel uses a constant interpolant with weight 1/(2-alpha).
    C = (
        alpha
        * 2.0 ** (alpha - 1.0)
        * gamma((1.0 + alpha) / 2.0)
        / (np.sqrt(np.pi) * gamma(1.0 - alpha / 2.0))
    )
    m = np.arange(0, n + 1, dtype=float)
    d2 = np.diff(m ** (2.0 - alpha)) / (2.0 - alpha)
    d3 = np.diff(m ** (3.0 - alpha)) / (3.0 - alpha)
    mm = m[:-1]
    a = (mm + 1.0) * d2 - d3
    b = d3 - mm * d2

    # off-diagonal weights c_m for neighbors m = 1..n-1
    c = np.zeros(n)
    c[1] = 1.0 / (2.0 - alpha) + a[1]
    mr = np.arange(2, n)
    c[mr] = b[mr - 1] + a[mr]
    midx = np.arange(1, n, dtype=float)
    s = np.zeros(n)
    s[1:] = c[1:] / midx**2 * h ** (-alpha)
    col = np.zeros(n)
    col[1:] = -C * s[1:]
    A = toeplitz(col)

    # diagonal: quadrature of the -2u(x_i) part out to s* = M_i h plus the
    # exact tail integral; the s* node only carries its left-panel weight
    i = np.arange(1, n + 1)
    Mi = np.maximum(i, n + 1 - i)
    cs = np.concatenate(([0.0], np.cumsum(s[1:])))
    last = b[Mi - 1] / Mi.astype(float) ** 2 * h ** (-alpha)
    diag = 2.0 * C * (cs[Mi - 1] + last + (Mi * h) ** (-alpha) / alpha)
    A[np.arange(n), np.arange(n)] = diag
    return A


def _wall_profile_rhs(x: np.ndarray, alpha: float, p: float) -> np.ndarray:
    # closed form of (-Delta)^{alpha/2} (1-x^2)_+^p on (-1,1)
    c = (
        2.0**alpha
        * gamma((alpha + 1.0) / 2.0)
        * gamma(p + 1.0)
        / (np.sqrt(np.pi) * gamma(p + 1.0 - alpha / 2.0))
    )
    return c * hyp2f1((alpha + 1.0) / 2.0, alpha / 2.0 - p, 0.5, x * x)


def build_single_alpha_matrix(grid: Grid1D, alpha: float) -> np.ndarray:
    """Dense symmetric positive-definite matrix of (-Delta)^{alpha/2}."""
    alpha = _check_order(alpha)
    n = grid.n_interior
    h = grid.h
    A = _base_matrix(n, alpha, h)

    # Diagonal boundary-layer correction: make the row sums exact on the
    # wall profile (1-x^2)^p.  p = max(alpha, 2-alpha)/2 stays >= alpha/2
    # (so the profile is at least as singular as the eigenfunctions) and
    # is symmetric about alpha = 1.
    p = 0.5 * (1.0 + abs(alpha - 1.0))
    x = grid.nodes
    w = (1.0 - x * x) ** p
    delta = (_wall_profile_rhs(x, alpha, p) - A @ w) / w
    A[np.arange(n), np.arange(n)] += delta
    return 0.5 * (A + A.T)


def build_operator_matrix(grid: Grid1D, alpha1: float, alpha2: float) -> OperatorMatrix:
    """Sum of the two single-order matrices; symmetric in (alpha1, alpha2)."""
    alpha1 = _check_order(alpha1)
    alpha2 = _check_order(alpha2)
    entries = build_single_alpha_matrix(grid, alpha1) + build_single_alpha_matrix(grid, alpha2)
    return OperatorMatrix(alpha1=alpha1, alpha2=alpha2, grid=grid, entries=entries)


def eigendecompose(matrix: OperatorMatrix) -> SpectralDecomposition:
    """Full symmetric eigendecomposition, normalized and sign-fixed."""
    A = matrix.entries
    try:
        vals, vecs = eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh on SPD rarely fails
        try:
            cond = float(np.linalg.cond(A))
        except Exception:
            cond = float("nan")
        raise ConvergenceError(
            f"symmetric eigensolver failed (matrix condition ~{cond:.3e}): {exc}"
        ) from exc

    h = matrix.grid.h
    # eigh returns unit-Euclidean columns; rescale to quadrature norm h*|v|^2=1
    phi = vecs / np.sqrt(h)
    # largest-magnitude entry positive, first index on ties
    anchor = np.argmax(np.abs(phi), axis=0)
    signs = np.sign(phi[anchor, np.arange(phi.shape[1])])
    signs[signs == 0.0] = 1.0
    # force row-major so fresh and cache-loaded decompositions feed BLAS the
    # same memory layout (kernels differ by 1 ulp between layouts)
    phi = np.ascontiguousarray(phi * signs)
    return SpectralDecomposition(mu=vals, phi=phi, grid=matrix.grid)


def cache_key(n_interior: int, alpha1: float, alpha2: float) -> str:
    """Cache key: node count plus both orders rounded to 12 decimals, sorted.

    Sorting is safe because the pair matrix, hence its decomposition, is
    bitwise identical under exchanging the orders.
    """
    lo, hi = sorted((round(float(alpha1), 12), round(float(alpha2), 12)))
    return f"{n_interior}_{lo:.12f}_{hi:.12f}"


def save_decomposition(dec: SpectralDecomposition, path: str) -> None:
    """One file: a JSON header line, then mu and phi column-major as little-endian f8."""
    n = dec.grid.n_interior
    header = {
        "format": _CACHE_FORMAT,
        "n_interior": n,
        "count": int(dec.mu.size),
    }
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(dec.mu, dtype="<f8").tobytes())
        fh.write(np.asfortranarray(dec.phi, dtype="<f8").tobytes(order="F"))
    os.replace(tmp, path)


def load_decomposition(path: str, grid: Grid1D) -> SpectralDecomposition:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise DomainError(f"unreadable decomposition header in {path}: {exc}") from exc
        if header.get("format") != _CACHE_FORMAT:
            raise DomainError(f"unknown decomposition format in {path}: {header.get('format')!r}")
        n = int(header["n_interior"])
        if n != grid.n_interior:
            raise DomainError(
                f"cached decomposition has n_interior={n}, grid expects {grid.n_interior}"
            )
        raw = fh.read()
    need = n * 8 + n * n * 8
    if len(raw) != need:
        raise DomainError(f"decomposition payload in {path} has {len(raw)} bytes, expected {need}")
    mu = np.frombuffer(raw[: n * 8], dtype="<f8").copy()
    phi = np.frombuffer(raw[n * 8 :], dtype="<f8").reshape((n, n), order="F").copy()
    return SpectralDecomposition(mu=mu, phi=phi, grid=grid)


def cached_eigendecompose(matrix: OperatorMatrix, cache_dir: str | None = None) -> SpectralDecomposition:
    """eigendecompose() with an optional on-disk cache keyed by (n, orders)."""
    if cache_dir is None:
        return eigendecompose(matrix)
    os.makedirs(cache_dir, exist_ok=True)
    key = cache_key(matrix.grid.n_interior, matrix.alpha1, matrix.alpha2)
    path = os.path.join(cache_dir, f"eig_{key}.bin")
    if os.path.exists(path):
        return load_decomposition(path, matrix.grid)
    dec = eigendecompose(matrix)
    save_decomposition(dec, path)
    return dec
