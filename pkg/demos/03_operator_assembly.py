"""Assembling the finite-dimensional operators of the benchmark problem.

Three ingredients go into each iteration of the solver:

  A_m  - Gram matrix of the degenerate-kernel normal operator,
  v    - coefficients of the approximate adjoint applied to the data,
  g    - Haar coefficients of the data themselves.

This script assembles them for the benchmark kernel exp(-s t), checks
the matrix properties the solver relies on (symmetry, positive
semidefiniteness, the a-priori error budgets), and compares the adjoint
right-hand side against dense quadrature.
"""

import numpy as np

from fredreg import (
    OperatorCache,
    error_budget,
    exact_problem,
    exp_haar_matrix,
    sample_grid,
    trapezoid_norm,
)

problem = exact_problem()
ops = OperatorCache(problem.kernel)

print("=== Gram matrix at level 2 ===")
a2 = ops.gram(2).entries
print(np.array2string(a2, precision=6, suppress_small=True))
eigs = np.linalg.eigvalsh(a2)
print("eigenvalues:", np.array2string(eigs, precision=3))
print("symmetric to", np.max(np.abs(a2 - a2.T)), "; smallest eigenvalue", eigs.min())

print("\n=== error budgets per level ===")
print(f"{'m':>3} {'normal-op bound':>16} {'adjoint bound':>14} {'mixed bound':>12}")
for m in range(1, 7):
    b = error_budget(problem.kernel, m)
    print(f"{m:>3} {b.bound_normal:>16.3e} {b.bound_adjoint:>14.3e} {b.bound_mixed:>12.3e}")

print("\n=== adjoint right-hand side accuracy ===")
grid = sample_grid(6)
samples = problem.exact_rhs(grid)
for m in (1, 2, 3, 4):
    v = ops.rhs(samples, m)
    # dense-quadrature reference for the exact adjoint coefficients
    gx, gw = np.polynomial.legendre.leggauss(12)
    ncell = 256
    w = 1.0 / ncell
    s = (np.arange(ncell)[:, None] * w + (gx[None, :] + 1) * w / 2).ravel()
    sw = np.tile(gw * w / 2, ncell)
    exact = exp_haar_matrix(s, m).T @ (sw * problem.exact_rhs(s))
    err = np.linalg.norm(v - exact)
    bound = trapezoid_norm(samples) * error_budget(problem.kernel, m).bound_adjoint
    print(f"  m = {m}: ||v - exact|| = {err:.3e}  (bound {bound:.3e})")

print("\nThe adjoint replacement error stays orders of magnitude below its")
print("bound on this smooth right-hand side, so the level rule is safely")
print("conservative.")
