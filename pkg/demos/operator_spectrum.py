"""Inspect the discrete spectrum of the double fractional Laplacian.

Shows the k^{alpha1/2} + k^{alpha2/2}-type growth of the eigenvalues for
(alpha1, alpha2) = (0.5, 1.5), and the classical Dirichlet limit when both
orders approach 2.
"""

import numpy as np

from fracdiff import Grid1D, build_operator_matrix, eigendecompose

grid = Grid1D(199)
dec = eigendecompose(build_operator_matrix(grid, 0.5, 1.5))

print("first eigenvalues at (alpha1, alpha2) = (0.5, 1.5), n = 199:")
k = np.arange(1, 11)
for kk, mu in zip(k, dec.mu[:10]):
    print(f"  mu_{kk:<2d} = {mu:10.4f}   mu/(k^0.5 + k^1.5) = {mu / (kk**0.5 + kk**1.5):.4f}")

kk = np.arange(1.0, 51.0)
band = dec.mu[:50] / (kk**0.5 + kk**1.5)
print(f"growth band over k = 1..50: max/min = {band.max() / band.min():.2f}")

# near alpha = 2 the operator approaches -2 * Laplacian on (-1, 1); the
# Dirichlet eigenvalues of -Laplacian are (k pi / 2)^2
fine = Grid1D(799)
classical = eigendecompose(build_operator_matrix(fine, 1.999, 1.999))
print("\nclassical limit (alpha1 = alpha2 = 1.999, n = 799):")
for kk in (1, 2, 3):
    target = (kk * np.pi / 2.0) ** 2
    got = classical.mu[kk - 1] / 2.0
    print(f"  mu_{kk}/2 = {got:9.5f}  vs (k pi/2)^2 = {target:9.5f}  ({100 * (got / target - 1):+.2f}%)")

# eigenfunctions are orthonormal under the trapezoid weights
gram = fine.h * classical.phi.T @ classical.phi
off = np.max(np.abs(gram - np.eye(gram.shape[0])))
print(f"\northonormality defect of the n = 799 basis: {off:.2e}")
