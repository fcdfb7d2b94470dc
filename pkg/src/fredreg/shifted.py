"""Direct solver for the shifted symmetric positive definite systems.

Every linear solve in the iteration has the form ``(a I + A) x = b``
with ``A`` a positive semidefinite Gram matrix and shift ``a > 0``, so
the system matrix has smallest eigenvalue at least ``a`` and a plain
Cholesky factorization is backward stable. The solver is deterministic:
identical inputs produce bit-identical solutions.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dpotrf, dpotrs

from .assembly import GramMatrix

__all__ = ["ShiftedSystem", "FactorizationError", "solve_shifted"]


class FactorizationError(np.linalg.LinAlgError):
    """Cholesky breakdown; ``pivot`` is the 1-based offending leading minor.

    Possible only when the matrix violates the positive semidefinite
    contract upstream (the shift makes honest Gram inputs definite).
    """

    def __init__(self, pivot):
        self.pivot = int(pivot)
        super().__init__(
            f"Cholesky factorization failed at pivot {self.pivot}; "
            "matrix is not positive definite"
        )


@dataclass(frozen=True)
class ShiftedSystem:
    """The system ``(shift * I + matrix) x = rhs``.

    ``matrix`` may be a :class:`~fredreg.assembly.GramMatrix` or a plain
    symmetric PSD ndarray; ``shift`` must be positive.
    """

    matrix: object
    shift: float
    rhs: np.ndarray

    @property
    def entries(self):
        m = self.matrix
        return m.entries if isinstance(m, GramMatrix) else np.asarray(m, dtype=float)


def solve_spd_shifted(a_matrix, shift, rhs):
    """Solve ``(shift I + A) x = b`` for symmetric PSD ``A`` by Cholesky."""
    a_matrix = np.asarray(a_matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if not shift > 0:
        raise ValueError(f"shift must be positive, got {shift}")
    n = a_matrix.shape[0]
    if a_matrix.shape != (n, n):
        raise ValueError(f"matrix must be square, got shape {a_matrix.shape}")
    if rhs.shape[0] != n:
        raise ValueError(f"dimension mismatch: matrix {n}, rhs {rhs.shape[0]}")
    shifted = a_matrix + shift * np.eye(n)
    factor, info = dpotrf(shifted, lower=1, overwrite_a=1)
    if info > 0:
        raise FactorizationError(info)
    if info < 0:
        raise ValueError(f"illegal value in argument {-info} of the factorization")
    x, info = dpotrs(factor, rhs, lower=1)
    if info != 0:
        raise ValueError(f"triangular solve failed with status {info}")
    return x


def solve_shifted(system):
    """Solve a :class:`ShiftedSystem`; deterministic, backward stable."""
    return solve_spd_shifted(system.entries, system.shift, system.rhs)
