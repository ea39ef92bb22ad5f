"""Small dense matrix operations: LU solve, commutator, infinity norm.

The solver is hand-rolled so the singularity verdict is contractual: a pivot
below 1e-12 * ||B||_inf raises "singular metric", and the threshold scales
with B so rescaling the metric cannot flip the verdict. Dimensions here are
tiny (<= 13), so partial pivoting is plenty.
"""

from __future__ import annotations

import numpy as np

PIVOT_RTOL = 1e-12


class SingularMetricError(ValueError):
    """Raised when a pivot falls below the relative threshold."""


def inf_norm(m) -> float:
    """Maximum absolute row sum; zero iff the zero matrix."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.abs(m).sum(axis=1).max())


def _factor(b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """LU factorization with partial pivoting; multipliers stored below the diagonal."""
    n = b.shape[0]
    lu = b.copy()
    perm = np.arange(n)
    threshold = PIVOT_RTOL * inf_norm(b)
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(lu[col:, col])))
        pivot = lu[pivot_row, col]
        if abs(pivot) <= threshold:
            raise SingularMetricError(f"singular metric: pivot {pivot:.3e} at column {col}")
        if pivot_row != col:
            lu[[col, pivot_row]] = lu[[pivot_row, col]]
            perm[[col, pivot_row]] = perm[[pivot_row, col]]
        factors = lu[col + 1:, col] / pivot
        lu[col + 1:, col + 1:] -= np.outer(factors, lu[col, col + 1:])
        lu[col + 1:, col] = factors
    return lu, perm


def _lu_solve(lu: np.ndarray, perm: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    y = rhs[perm]
    for col in range(n):
        y[col + 1:] -= np.outer(lu[col + 1:, col], y[col]) if y.ndim > 1 else lu[col + 1:, col] * y[col]
    x = np.zeros_like(y)
    for row in range(n - 1, -1, -1):
        acc = y[row] - lu[row, row + 1:] @ x[row + 1:]
        x[row] = acc / lu[row, row]
    return x


def solve(b_matrix, rhs) -> np.ndarray:
    """Solve b_matrix @ X = rhs by LU with partial pivoting plus one refinement pass."""
    b = np.array(b_matrix, dtype=float)
    r = np.array(rhs, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError(f"matrix must be square, got shape {b.shape}")
    if r.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {b.shape} vs {r.shape}")
    lu, perm = _factor(b)
    x = _lu_solve(lu, perm, r)
    # plain LU leaves residual ~ eps * cond(B) * ||rhs||; one correction with the
    # same factors pulls it down to ~ eps * ||rhs|| whenever cond(B) * eps << 1
    x = x + _lu_solve(lu, perm, r - b @ x)
    return x


def inverse(m) -> np.ndarray:
    """Matrix inverse via solve against the identity."""
    m = np.asarray(m, dtype=float)
    return solve(m, np.eye(m.shape[0]))


def commutator(p, q) -> np.ndarray:
    """p @ q - q @ p; antisymmetric under argument swap."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    return p @ q - q @ p
