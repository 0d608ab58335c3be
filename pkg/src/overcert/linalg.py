"""Small dense linear algebra in both scalar modes.

Exact routines work over Gaussian rationals with plain Gauss-Jordan
elimination (first nonzero pivot).  Float routines wrap numpy and apply the
package-wide singularity cutoff on the reciprocal condition number.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

import numpy as np

from .errors import DimensionMismatch, SingularJacobian
from .scalar import QI

#: reciprocal condition estimates below this are treated as singular
RCOND_CUTOFF = 1e-14


def _check_square(A) -> int:
    n = len(A)
    if any(len(row) != n for row in A):
        raise DimensionMismatch("matrix is not square")
    return n


def _gauss_jordan(M: List[list], n: int) -> List[list]:
    # reduce the left n x n block of M to the identity, in place
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            raise SingularJacobian("exactly singular matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return M


def solve_exact(A: Sequence[Sequence[QI]], b: Sequence[QI]) -> List[QI]:
    n = _check_square(A)
    if len(b) != n:
        raise DimensionMismatch("right-hand side has the wrong length")
    M = _gauss_jordan([list(row) + [b[i]] for i, row in enumerate(A)], n)
    return [M[r][n] for r in range(n)]


def inverse_exact(A: Sequence[Sequence[QI]]) -> List[List[QI]]:
    n = _check_square(A)
    one, zero = QI(1), QI(0)
    M = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(A)]
    return [row[n:] for row in _gauss_jordan(M, n)]


def as_array(A) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in A], dtype=complex)


def check_conditioning(J: np.ndarray) -> None:
    if not np.all(np.isfinite(J)):
        raise SingularJacobian("non-finite Jacobian")
    s = np.linalg.svd(J, compute_uv=False)
    if s[0] == 0 or s[-1] / s[0] < RCOND_CUTOFF:
        raise SingularJacobian(f"reciprocal condition {s[-1] / s[0] if s[0] else 0.0:.3g} below cutoff")


def solve_float(A, b) -> np.ndarray:
    J = np.asarray(A, dtype=complex)
    check_conditioning(J)
    return np.linalg.solve(J, np.asarray(b, dtype=complex))


def inverse_float(A) -> np.ndarray:
    J = np.asarray(A, dtype=complex)
    check_conditioning(J)
    return np.linalg.inv(J)


def rref_fraction(A: Sequence[Sequence]) -> tuple:
    """Reduced row echelon form over the rationals; returns ``(R, pivot_columns)``."""
    R = [[Fraction(x) for x in row] for row in A]
    pivots: List[int] = []
    if not R:
        return R, pivots
    r = 0
    for col in range(len(R[0])):
        piv = next((i for i in range(r, len(R)) if R[i][col]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][col]
        R[r] = [x * inv for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][col]:
                f = R[i][col]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(col)
        r += 1
        if r == len(R):
            break
    return R, pivots


def nullspace_fraction(A: Sequence[Sequence]) -> list:
    """A basis of the right kernel of a rational matrix."""
    ncol = len(A[0])
    R, pivots = rref_fraction(A)
    free = [j for j in range(ncol) if j not in pivots]
    basis = []
    for fj in free:
        v = [Fraction(0)] * ncol
        v[fj] = Fraction(1)
        for i, pj in enumerate(pivots):
            v[pj] = -R[i][fj]
        basis.append(v)
    return basis


def det_fraction(A: Sequence[Sequence]):
    """Exact determinant of a square rational matrix."""
    n = _check_square(A)
    if n == 0:
        return Fraction(1)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        for r in range(col + 1, n):
            if M[r][col]:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return det
