"""Basis function evaluation and third-derivative tensor assembly.

The third derivatives of every family member reduce to the beta table

    beta_ij = alpha_- f'''(a_i - a_j) + alpha_+ f'''(a_i + a_j) + b   (i != j)
    beta_k  = eta f'''(a_k) + (4 - N) b + c
    K_k     = sum_{q != k} beta_kq + beta_k

from which F_klm = a + d_kl d_lm K_k + d_kl beta_mk + d_km beta_lk
+ d_lm beta_kl. The extended family appends one variable whose slice of the
tensor is gamma times the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .model import (
    KERNEL_COTH,
    KERNEL_RECIP,
    KERNELS,
    PrepotentialParams,
    SamplePoint,
)

F_VALUE_TOL = 1e-15
LI3_TERM_CAP = 300
FD_STEP = 1e-2

# composed 4-point central first-derivative stencil
_FD_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_FD_OFFSETS = (-2, -1, 1, 2)


@dataclass(frozen=True)
class BetaTable:
    """Kernel evaluations on pairs (offdiag), singles (diag), and row sums (kk)."""

    offdiag: np.ndarray  # (n, n), zero diagonal
    diag: np.ndarray     # (n,) beta_k
    kk: np.ndarray       # (n,) K_k


@dataclass(frozen=True)
class ThirdTensor:
    """Fully symmetric rank-3 tensor of third derivatives at a point."""

    entries: np.ndarray
    n_total: int

    def slice(self, i: int) -> np.ndarray:
        """The square matrix F_i."""
        return self.entries[i]

    def __getitem__(self, key):
        return self.entries[key]


def _as_coords(point) -> np.ndarray:
    coords = point.array if isinstance(point, SamplePoint) else np.asarray(point, dtype=float)
    if coords.ndim != 1:
        raise ValueError("point must be a flat coordinate vector")
    return coords


def f_triple_prime(kernel: str, x):
    """Third derivative of the basis function: coth(x) or 1/x. Odd in x."""
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    x = np.asarray(x, dtype=float)
    if np.any(x == 0.0):
        raise ValueError("kernel singularity: argument is zero")
    out = 1.0 / np.tanh(x) if kernel == KERNEL_COTH else 1.0 / x
    return float(out) if out.ndim == 0 else out


def three_term_violation(kernel: str, p: float, q: float, r: float) -> float:
    """Deviation of k(p-q)k(p-r) + k(q-p)k(q-r) + k(r-p)k(r-q) from its constant.

    The constant is 1 for the coth kernel and 0 for the 1/x kernel. This is
    the mechanism behind every pair-index relation downstream.
    """
    def k(x, y):
        return f_triple_prime(kernel, x - y)

    total = k(p, q) * k(p, r) + k(q, p) * k(q, r) + k(r, p) * k(r, q)
    target = 1.0 if kernel == KERNEL_COTH else 0.0
    return abs(total - target)


def _li3(z: float, tol: float) -> float:
    """Trilogarithm series sum_k z^k / k^3 for 0 <= z < 1, capped at 300 terms."""
    total = 0.0
    zk = z
    for k in range(1, LI3_TERM_CAP + 1):
        total += zk / k**3
        nxt = zk * z / (k + 1) ** 3
        if abs(nxt) < tol:
            break
        zk *= z
    return total


def f_value(kernel: str, x: float, tol: float = F_VALUE_TOL) -> float:
    """The basis function f itself, needed only for full-F evaluation.

    coth kernel: f(x) = x^3/6 - Li3(e^{-2x})/4, valid for x > 0 (series
    domain). 1/x kernel: integration constants fixed to zero gives
    f(x) = x^2 (2 ln x - 3)/4, valid for x > 0.
    """
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if x <= 0.0:
        raise ValueError(f"series domain: f requires x > 0, got {x}")
    if kernel == KERNEL_COTH:
        return x**3 / 6.0 - _li3(np.exp(-2.0 * x), tol) / 4.0
    return x * x * (2.0 * np.log(x) - 3.0) / 4.0


def beta_table(params: PrepotentialParams, point) -> BetaTable:
    """Assemble the beta table over the n base coordinates."""
    coords = _as_coords(point)
    n = params.n
    if coords.size < n:
        raise ValueError(f"point has {coords.size} coordinates, params need {n}")
    base = coords[:n]
    off = np.zeros((n, n))
    pair = ~np.eye(n, dtype=bool)
    if params.alpha_minus != 0.0:
        diff = np.subtract.outer(base, base)
        off[pair] += params.alpha_minus * f_triple_prime(params.kernel, diff[pair])
    if params.alpha_plus != 0.0:
        sums = np.add.outer(base, base)
        off[pair] += params.alpha_plus * f_triple_prime(params.kernel, sums[pair])
    off[pair] += params.b
    diag = np.full(n, (4.0 - n) * params.b + params.c)
    if params.eta != 0.0:
        diag += params.eta * f_triple_prime(params.kernel, base)
    return BetaTable(offdiag=off, diag=diag, kk=off.sum(axis=1) + diag)


def third_tensor(params: PrepotentialParams, point) -> ThirdTensor:
    """Third-derivative tensor F_klm at the point; dimension params.dim."""
    coords = _as_coords(point)
    d = params.dim
    if coords.size != d:
        raise ValueError(f"point has {coords.size} coordinates, expected {d}")
    n = params.n
    table = beta_table(params, coords)
    t = np.zeros((d, d, d))
    t[:n, :n, :n] = params.a
    idx = np.arange(n)
    t[idx, idx, :n] += table.offdiag.T
    t[idx, :n, idx] += table.offdiag.T
    t[:n, idx, idx] += table.offdiag
    t[idx, idx, idx] += table.kk
    if params.gamma is not None:
        # extra-variable block: the last slice is gamma times the identity
        t[n, idx, idx] = params.gamma
        t[idx, n, idx] = params.gamma
        t[idx, idx, n] = params.gamma
        t[n, n, n] = params.gamma
    return ThirdTensor(entries=t, n_total=d)


def prepotential_value(params: PrepotentialParams, point, tol: float = F_VALUE_TOL) -> float:
    """Evaluate the full prepotential F; requires a dominant-chamber point."""
    coords = _as_coords(point)
    if coords.size != params.dim:
        raise ValueError(f"point has {coords.size} coordinates, expected {params.dim}")
    n = params.n
    base = coords[:n]
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            if params.alpha_minus != 0.0:
                total += params.alpha_minus * f_value(params.kernel, base[i] - base[j], tol)
            if params.alpha_plus != 0.0:
                total += params.alpha_plus * f_value(params.kernel, base[i] + base[j], tol)
    if params.eta != 0.0:
        total += params.eta * sum(f_value(params.kernel, x, tol) for x in base)
    s1 = base.sum()
    s2 = (base**2).sum()
    s3 = (base**3).sum()
    total += params.a * s1**3 / 6.0 + params.b * s1 * s2 / 2.0 + params.c * s3 / 6.0
    if params.gamma is not None:
        extra = coords[n]
        total += params.gamma * (extra**3 / 6.0 + extra * s2 / 2.0)
    return total


def finite_difference_tensor(params: PrepotentialParams, point: SamplePoint,
                             step: float = FD_STEP) -> ThirdTensor:
    """Oracle tensor: composed central differences of the full prepotential.

    Each direction uses the 4-point first-derivative stencil; composing three
    directions displaces any single coordinate by at most 6*step, so the
    stencil stays margin/2 clear of every singular locus when
    6*step <= margin/2.
    """
    if not isinstance(point, SamplePoint):
        raise TypeError("finite_difference_tensor needs a SamplePoint (margin required)")
    if step <= 0:
        raise ValueError("step must be positive")
    if 6.0 * step > point.margin / 2.0:
        raise ValueError(
            f"stencil outside safe region: 6*step = {6 * step:g} exceeds margin/2 = {point.margin / 2:g}")
    x0 = point.array
    d = params.dim
    if x0.size != d:
        raise ValueError(f"point has {x0.size} coordinates, expected {d}")

    cache: dict[tuple[int, ...], float] = {}

    def value_at(shift: np.ndarray) -> float:
        key = tuple(int(s) for s in shift)
        if key not in cache:
            cache[key] = prepotential_value(params, x0 + step * shift)
        return cache[key]

    t = np.zeros((d, d, d))
    for k in range(d):
        for l in range(k, d):
            for m in range(l, d):
                acc = 0.0
                for wk, ok in zip(_FD_WEIGHTS, _FD_OFFSETS):
                    for wl, ol in zip(_FD_WEIGHTS, _FD_OFFSETS):
                        for wm, om in zip(_FD_WEIGHTS, _FD_OFFSETS):
                            shift = np.zeros(d)
                            shift[k] += ok
                            shift[l] += ol
                            shift[m] += om
                            acc += wk * wl * wm * value_at(shift)
                val = acc / step**3
                for perm in set(permutations((k, l, m))):
                    t[perm] = val
    return ThirdTensor(entries=t, n_total=d)


def type_a_linear_change(n: int) -> np.ndarray:
    """Matrix of the variable change a_i = x_i - x_{n+1}, a_{n+1} = sum_i x_i."""
    m = np.zeros((n + 1, n + 1))
    m[:n, :n] = np.eye(n)
    m[:n, n] = -1.0
    m[n, :] = 1.0
    return m


def reduce_type_a(n: int, point) -> ThirdTensor:
    """Pull the (n+1)-variable cubic-plus-kernel tensor back to n variables.

    The source function lives in x_1..x_{n+1} with cubic
    (n+1)/2 sum_{i<j<k} x_i x_j x_k and difference-kernel pair terms; on the
    slice a_{n+1} = sum_i x_i = 0 its pullback through the variable change
    equals the type-a-plus tensor in the a coordinates.
    """
    base = _as_coords(point)
    if base.size != n:
        raise ValueError(f"point has {base.size} coordinates, expected {n}")
    x_last = -base.sum() / (n + 1)
    x = np.append(base + x_last, x_last)
    # cubic of sum_{i<j<k} x_i x_j x_k rewritten on power sums, scaled by (n+1)/2
    tilde = PrepotentialParams(n=n + 1, kernel=KERNEL_COTH, alpha_minus=1.0, alpha_plus=0.0,
                               eta=0.0, a=(n + 1) / 2.0, b=-(n + 1) / 2.0, c=float(n + 1))
    source = third_tensor(tilde, x)
    # Jacobian dx_p/da_k on the a_{n+1} = 0 slice
    jac = np.full((n + 1, n), -1.0 / (n + 1))
    jac[:n, :] += np.eye(n)
    pulled = np.einsum("pk,ql,rm,pqr->klm", jac, jac, jac, source.entries)
    return ThirdTensor(entries=pulled, n_total=n)
