"""Closed-form conditions, matrix identities, and helper relations.

Everything here mirrors an algebraic fact about the prepotential families:
the solvability conditions (one per family), the commutator of two tensor
slices of the simplest family, the quadratic identity of its constant
metric, the per-family relation suites that drive the diagonal-metric
proofs, and the fully expanded delta-case form of F_i diag(A) F_m. Each
closed form is cross-checked against direct numerical computation in the
test suite; none of it is trusted on faith.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import matops
from .kernel import beta_table, third_tensor, _as_coords
from .model import KERNEL_COTH, KERNEL_RECIP, PrepotentialParams, make_sample_point

ZERO_TOL = 1e-12

CONDITION_IDS = (
    "T1Generic",
    "T1SpecialNa2b",
    "T1SpecialNbc",
    "T1DoublyDegenerate",
    "T2TypeA",
    "T3BCD",
    "T4Extended",
    "T5FourDim",
)

# human-readable statements for report output
CONDITION_SUMMARY = {
    "T1Generic": "N b^3 + 3 b^2 c - a c^2 + 3 N b + c + N^2 a = 0",
    "T1SpecialNa2b": "1 + (N a / 2)^2 - a c = 0   (on the branch N a + 2 b = 0)",
    "T1SpecialNbc": "solvable iff N = 3           (on the branch N b + c = 0)",
    "T1DoublyDegenerate": "every metric singular; system meaningless",
    "T2TypeA": "(a, b, c) = +-(2/(N+1), -1, N+1)",
    "T3BCD": "eta + 2 (N - 2) = 0",
    "T4Extended": "eta + 2 (N - 2) + gamma^2 / 2 = 0",
    "T5FourDim": "N b^3 + 3 b^2 c - a c^2 = 0   (1/x kernel)",
}


def _is_pairwise_family(params: PrepotentialParams, kernel: str) -> bool:
    return (params.kernel == kernel and params.gamma is None
            and (params.alpha_minus, params.alpha_plus, params.eta) == (1.0, 0.0, 0.0))


def _is_simplest(params: PrepotentialParams) -> bool:
    return _is_pairwise_family(params, KERNEL_COTH)


def _is_four_dim(params: PrepotentialParams) -> bool:
    return _is_pairwise_family(params, KERNEL_RECIP)


def _is_type_a_family(params: PrepotentialParams) -> bool:
    return (params.kernel == KERNEL_COTH and params.gamma is None
            and (params.alpha_minus, params.alpha_plus, params.eta) == (1.0, 0.0, 1.0))


def _is_bcd(params: PrepotentialParams) -> bool:
    return (params.kernel == KERNEL_COTH and params.gamma is None
            and (params.alpha_minus, params.alpha_plus) == (1.0, 1.0)
            and (params.a, params.b, params.c) == (0.0, 0.0, 0.0))


def _is_extended(params: PrepotentialParams) -> bool:
    return (params.kernel == KERNEL_COTH and params.gamma is not None
            and (params.alpha_minus, params.alpha_plus) == (1.0, 1.0))


def applicability(cond_id: str, n: int, params: PrepotentialParams) -> bool:
    """Branch guards: whether the condition makes sense for these parameters."""
    if cond_id not in CONDITION_IDS:
        raise ValueError(f"unknown condition id {cond_id!r}")
    na2b = abs(n * params.a + 2 * params.b)
    nbc = abs(n * params.b + params.c)
    if cond_id == "T1Generic":
        return _is_simplest(params) and na2b > ZERO_TOL and nbc > ZERO_TOL
    if cond_id == "T1SpecialNa2b":
        return _is_simplest(params) and na2b <= ZERO_TOL and nbc > ZERO_TOL
    if cond_id == "T1SpecialNbc":
        return _is_simplest(params) and nbc <= ZERO_TOL and na2b > ZERO_TOL
    if cond_id == "T1DoublyDegenerate":
        return _is_simplest(params) and na2b <= ZERO_TOL and nbc <= ZERO_TOL
    if cond_id == "T2TypeA":
        return _is_type_a_family(params)
    if cond_id == "T3BCD":
        return _is_bcd(params)
    if cond_id == "T4Extended":
        return _is_extended(params)
    # T5FourDim: the n = 2 behavior of the 1/x family is left unspecified;
    # refuse rather than guess
    return _is_four_dim(params) and n != 2


def _condition_poly(cond_id: str, n: int, params: PrepotentialParams) -> float:
    """Raw condition value without branch gating; continuous ids only."""
    a, b, c = params.a, params.b, params.c
    if cond_id == "T1Generic":
        return n * b**3 + 3 * b**2 * c - a * c**2 + 3 * n * b + c + n**2 * a
    if cond_id == "T1SpecialNa2b":
        return 1.0 + (n * a / 2.0) ** 2 - a * c
    if cond_id == "T2TypeA":
        solution = np.array([2.0 / (n + 1), -1.0, float(n + 1)])
        cubic = np.array([a, b, c])
        return float(min(np.abs(cubic - solution).max(), np.abs(cubic + solution).max()))
    if cond_id == "T3BCD":
        return params.eta + 2.0 * (n - 2)
    if cond_id == "T4Extended":
        return params.eta + 2.0 * (n - 2) + params.gamma**2 / 2.0
    if cond_id == "T5FourDim":
        return n * b**3 + 3 * b**2 * c - a * c**2
    raise ValueError(f"condition {cond_id!r} has no continuous value")


def theorem_condition_value(cond_id: str, n: int, params: PrepotentialParams) -> float:
    """Closed-form left-hand side; zero (within rounding) iff WDVV is predicted.

    T1SpecialNbc returns 0 only for n = 3 and the sentinel 1.0 otherwise;
    T1DoublyDegenerate returns NaN (meaningless, neither pass nor fail).
    """
    if not applicability(cond_id, n, params):
        raise ValueError(f"applicability violated for {cond_id} at n={n}")
    if cond_id == "T1SpecialNbc":
        return 0.0 if n == 3 else 1.0
    if cond_id == "T1DoublyDegenerate":
        return math.nan
    return _condition_poly(cond_id, n, params)


@dataclass(frozen=True)
class CommutatorConstants:
    """Constants of the slice-commutator closed form for the pairwise family."""

    alpha: float
    beta: float
    gamma_ratio: float
    delta: float
    kernel: str


def commutator_constants(n: int, params: PrepotentialParams) -> CommutatorConstants:
    """Constants entering [F_i, F_m] for the difference-kernel family.

    Calibrated against the direct matrix commutator (see tests): the single
    delta slot carries alpha, the double slot beta + 2 alpha.
    """
    a, b, c = params.a, params.b, params.c
    if params.kernel == KERNEL_COTH:
        alpha = b * b - 1.0 + a * c + n * a * b
        beta = n + n * b * b + 2.0 * b * c
    else:
        alpha = b * b + a * c + n * a * b
        beta = n * b * b + 2.0 * b * c
    denom = n * a + 2.0 * b
    gamma_ratio = (n * b + c) / denom if abs(denom) > ZERO_TOL else math.nan
    return CommutatorConstants(alpha=alpha, beta=beta, gamma_ratio=gamma_ratio,
                               delta=gamma_ratio**2, kernel=params.kernel)


def _delta_slots(i: int, m: int, j: int, q: int) -> tuple[float, float]:
    """Shared index templates: single-delta slot s1 and double-delta slot s2."""
    dij, dmq, djm, diq = j == i, q == m, j == m, q == i
    s1 = (dij * (not dmq) * (not diq)) + (dmq * (not djm) * (not dij)) \
        - (djm * (not dmq) * (not diq)) - (diq * (not djm) * (not dij))
    s2 = (dij and dmq) - (djm and diq)
    return float(s1), float(s2)


def closedform_commutator(i: int, m: int, n: int, consts: CommutatorConstants) -> np.ndarray:
    """[F_i, F_m] assembled from the delta templates and the constants."""
    if not (0 <= i < n and 0 <= m < n):
        raise ValueError(f"index out of range: i={i}, m={m}, n={n}")
    out = np.zeros((n, n))
    if i == m:
        return out
    double = consts.beta + 2.0 * consts.alpha
    for j in range(n):
        for q in range(n):
            s1, s2 = _delta_slots(i, m, j, q)
            out[j, q] = consts.alpha * s1 + double * s2
    return out


def b_quadratic_identity(i: int, m: int, j: int, q: int, n: int,
                         params: PrepotentialParams) -> tuple[float, float]:
    """Both sides of B_ij B_mq - B_mj B_iq for the constant simplest-family metric.

    B = (Na+2b) U + (Nb+c) I; the right-hand side is the delta-template form
    scaled by (Na+2b)^2, with the double slot carrying delta + 2 gamma.
    """
    p = n * params.a + 2.0 * params.b
    if abs(p) <= ZERO_TOL:
        raise ValueError("branch guard violated: N a + 2 b = 0")
    if not all(0 <= k < n for k in (i, m, j, q)):
        raise ValueError("index out of range")
    r = n * params.b + params.c
    bmat = p * np.ones((n, n)) + r * np.eye(n)
    lhs = bmat[i, j] * bmat[m, q] - bmat[m, j] * bmat[i, q]
    g = r / p
    s1, s2 = _delta_slots(i, m, j, q)
    rhs = p * p * (s1 * g + s2 * (g * g + 2.0 * g))
    return float(lhs), float(rhs)


def simplest_case_decomposition(tensor, params: PrepotentialParams):
    """Split each slice as F_k = a U + V_k with U the all-ones matrix."""
    if not (_is_simplest(params) or _is_four_dim(params)):
        raise ValueError("wrong family: decomposition needs the pairwise difference family")
    n = tensor.n_total
    au = params.a * np.ones((n, n))
    au_parts = [au.copy() for _ in range(n)]
    v_parts = [tensor.slice(k) - au for k in range(n)]
    return au_parts, v_parts


def uv_product_violation(tensor, params: PrepotentialParams, m: int) -> float:
    """Max deviation of (U V_m)_{kl} from 2b + delta_{lm} (N b + c).

    The right-hand side holds for every row k, diagonal included; the row
    sums of the pairwise block cancel through kernel oddness.
    """
    n = tensor.n_total
    if not 0 <= m < n:
        raise ValueError("index out of range")
    _, v_parts = simplest_case_decomposition(tensor, params)
    prod = np.ones((n, n)) @ v_parts[m]
    expected = np.full((n, n), 2.0 * params.b)
    expected[:, m] += n * params.b + params.c
    return float(np.abs(prod - expected).max())


# -- type A closed forms ----------------------------------------------------

TYPE_A_VARIANTS = ("plus", "minus")


def type_a_closed_forms(variant: str, point):
    """Closed-form (A_k, beta_ij, beta_k) for a type-a variant.

    variant "minus" is the b = +1 cubic: A_k = 1 - e^{-2 a_k},
    beta_ij = 2 e^{2 a_i} / (e^{2 a_i} - e^{2 a_j}), beta_k = 2/A_k - 2(N-1).
    variant "plus" is the b = -1 cubic: A_k = 1 - e^{+2 a_k},
    beta_ij = 2 e^{2 a_j} / (e^{2 a_i} - e^{2 a_j}), beta_k = -2/A_k + 2(N-1).
    """
    if variant not in TYPE_A_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    coords = _as_coords(point)
    n = coords.size
    e = np.exp(2.0 * coords)
    denom = np.subtract.outer(e, e)
    np.fill_diagonal(denom, 1.0)
    off = np.zeros((n, n))
    pair = ~np.eye(n, dtype=bool)
    if variant == "minus":
        a_vec = 1.0 - np.exp(-2.0 * coords)
        off[pair] = (2.0 * e[:, None] / denom)[pair]
        diag = 2.0 / a_vec - 2.0 * (n - 1)
    else:
        a_vec = 1.0 - e
        off[pair] = (2.0 * e[None, :] / denom)[pair]
        diag = -2.0 / a_vec + 2.0 * (n - 1)
    return a_vec, off, diag


def ambiguous_relation_readings(variant: str, n: int, point) -> dict:
    """Violations of relations 3 and 6 under both exponent-sign readings.

    The displayed right-hand sides are typeset ambiguously; exactly one
    reading per relation passes and is the one the suite encodes.
    """
    coords = _as_coords(point)
    a_vec, off, _ = type_a_closed_forms(variant, coords)
    out = {"relation-3": {}, "relation-6": {}}
    for sign, label in ((2.0, "4*exp(+2a)"), (-2.0, "4*exp(-2a)")):
        worst3 = worst6 = 0.0
        for i in range(n):
            for j in range(n):
                for m in range(n):
                    if len({i, j, m}) == 3:
                        lhs = (a_vec[i] * off[j, i] * off[i, m]
                               + a_vec[j] * off[i, j] * off[j, m]
                               - a_vec[m] * off[j, m] * off[i, m])
                        worst3 = max(worst3, abs(lhs - 4.0 * np.exp(sign * coords[m])))
        for i in range(n):
            for m in range(n):
                if i != m:
                    lhs = (a_vec[i] * off[i, m] ** 2 + a_vec[m] * off[m, i] ** 2
                           - a_vec[m] * off[i, m] ** 2 - a_vec[i] * off[m, i] ** 2)
                    rhs = 4.0 * np.exp(sign * coords[i]) + 4.0 * np.exp(sign * coords[m])
                    worst6 = max(worst6, abs(lhs - rhs))
        out["relation-3"][label] = worst3
        out["relation-6"][label] = worst6
    return out


def identity_suite_type_a(variant: str, n: int, point) -> list[tuple[str, float]]:
    """Worst violation of each of the seven type-a relations over all indices."""
    coords = _as_coords(point)
    if coords.size != n:
        raise ValueError(f"point has {coords.size} coordinates, expected {n}")
    a_vec, off, diag = type_a_closed_forms(variant, coords)
    # resolved exponent sign for the inhomogeneous right-hand sides
    sign = -2.0 if variant == "minus" else 2.0
    ex = np.exp(sign * coords)
    if variant == "minus":
        rhs1 = lambda i, j: 2.0 - 2.0 * ex[i] - 2.0 * ex[j]
        rhs2 = 2.0
        rhs7 = lambda i, m: 8.0 - 4.0 * n + (2.0 * n - 2.0) * (ex[i] + ex[m])
    else:
        rhs1 = lambda i, j: -2.0 + 2.0 * ex[i] + 2.0 * ex[j]
        rhs2 = -2.0
        rhs7 = lambda i, m: 4.0 * n - 8.0 - (2.0 * n - 2.0) * (ex[i] + ex[m])
    worst = dict.fromkeys(
        ("relation-1", "relation-2", "relation-3", "relation-4",
         "relation-5", "relation-6", "relation-7"), 0.0)

    def bump(key, value):
        worst[key] = max(worst[key], abs(value))

    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            bump("relation-1", a_vec[j] * off[i, j] + a_vec[i] * off[j, i] - rhs1(i, j))
            bump("relation-2", a_vec[i] * off[i, j] + a_vec[j] * off[j, i] - rhs2)
    for i in range(n):
        for m in range(n):
            if i == m:
                continue
            # both variants measure 8 - 4N here; the printed 4N - 8 for the
            # plus variant has the wrong sign (see relation 7 for where the
            # 4N - 8 constant genuinely lives)
            bump("relation-5", a_vec[i] * diag[i] * off[i, m] + a_vec[m] * diag[m] * off[m, i]
                 - (8.0 - 4.0 * n))
            bump("relation-6", a_vec[i] * off[i, m] ** 2 + a_vec[m] * off[m, i] ** 2
                 - a_vec[m] * off[i, m] ** 2 - a_vec[i] * off[m, i] ** 2
                 - (4.0 * ex[i] + 4.0 * ex[m]))
            bump("relation-7", a_vec[m] * diag[m] + a_vec[i] * diag[i] - rhs7(i, m))
    for i in range(n):
        for j in range(n):
            for m in range(n):
                if len({i, j, m}) < 3:
                    continue
                bump("relation-3", a_vec[i] * off[j, i] * off[i, m]
                     + a_vec[j] * off[i, j] * off[j, m]
                     - a_vec[m] * off[j, m] * off[i, m]
                     - 4.0 * np.exp(sign * coords[m]))
                bump("relation-4", a_vec[i] * off[i, j] * off[i, m]
                     + a_vec[m] * off[m, j] * off[m, i]
                     + a_vec[j] * off[j, m] * off[j, i] - 4.0)
    return sorted(worst.items())


def identity_suite_bcd(n: int, point, eta: float) -> list[tuple[str, float]]:
    """Worst violation of the three pair-family relations plus the K-sum reduction."""
    coords = _as_coords(point)
    if coords.size != n:
        raise ValueError(f"point has {coords.size} coordinates, expected {n}")
    params = PrepotentialParams(n=n, alpha_minus=1.0, alpha_plus=1.0, eta=eta)
    table = beta_table(params, coords)
    off, kk = table.offdiag, table.kk
    coth = 1.0 / np.tanh(coords)
    worst = dict.fromkeys(("relation-1", "relation-2", "relation-3", "k-sum-reduction"), 0.0)

    def bump(key, value):
        worst[key] = max(worst[key], abs(value))

    for i in range(n):
        for j in range(n):
            for m in range(n):
                if len({i, j, m}) < 3:
                    continue
                bump("relation-1", off[j, i] * off[i, m] + off[i, j] * off[j, m]
                     - off[j, m] * off[i, m])
                bump("relation-2", off[i, j] * off[i, m] + off[m, j] * off[m, i]
                     + off[j, m] * off[j, i] - 4.0)
    for i in range(n):
        for m in range(n):
            if i == m:
                continue
            # relation 3 with the eta factor divided out
            bump("relation-3", coth[i] * off[i, m] + coth[m] * off[m, i] - 2.0)
            cross = sum(off[k, m] * off[k, i] for k in range(n) if k not in (i, m))
            bump("k-sum-reduction", kk[i] * off[i, m] + kk[m] * off[m, i] + cross
                 - off[i, m] ** 2 - off[m, i] ** 2 - 2.0 * (2.0 * (n - 2) + eta))
    return sorted(worst.items())


# -- expanded diagonal product ----------------------------------------------

def expanded_diagonal_product(tensor, a_weights, i: int, m: int) -> np.ndarray:
    """(F_i diag(A) F_m)_{jl} via the full delta-case expansion.

    The structure constants (cubic a, beta table, K) are reconstructed from
    the tensor itself, which needs one all-distinct index triple, hence
    dimension >= 3. The final inhomogeneous group contributes to every case.
    """
    n = tensor.n_total
    if n < 3:
        raise ValueError("expansion needs dimension >= 3 to reconstruct the cubic")
    if not (0 <= i < n and 0 <= m < n):
        raise ValueError("index out of range")
    aw = np.asarray(a_weights, dtype=float)
    if aw.size != n:
        raise ValueError(f"weight vector has {aw.size} entries, expected {n}")
    if np.any(aw == 0.0):
        raise ValueError("zero weight entry: diagonal metric not invertible")
    t = tensor.entries
    a = float(t[0, 1, 2])
    off = np.zeros((n, n))
    for k in range(n):
        for p in range(n):
            if k != p:
                off[p, k] = t[k, k, p] - a  # beta_{pk} = F_kkp - a
    kk = np.array([t[k, k, k] - a for k in range(n)])

    out = np.zeros((n, n))
    const = a * a * aw.sum()
    for j in range(n):
        for l in range(n):
            dij, dil, dim_, djl, djm, dlm = i == j, i == l, i == m, j == l, j == m, l == m
            v = 0.0
            if dim_:
                v += aw[i] * off[j, i] * off[l, m]
                if dij:
                    v += off[l, m] * aw[i] * kk[i]
                if dil:
                    v += off[j, i] * aw[i] * kk[i]
                if dij and dlm:
                    v += aw[i] * kk[i] * kk[m]
            if djl and not dlm:
                v += aw[j] * off[i, j] * off[m, j]
            if djl and dlm:
                v += aw[m] * kk[l] * off[i, m]
            if dij and dil:
                v += aw[i] * kk[l] * off[m, i]
            if dil and not djm:
                v += aw[i] * off[j, i] * off[m, i]
            if dlm and not dij:
                v += (aw[i] * off[j, i] * off[i, m] + aw[j] * off[i, j] * off[j, m]
                      + a * aw[m] * kk[m] + a * float(aw @ off[:, m]))
            if djm and not dil:
                v += aw[j] * off[i, j] * off[l, j]
            if dij and not dlm:
                v += (aw[l] * off[l, i] * off[m, l] + aw[m] * off[m, i] * off[l, m]
                      + a * aw[i] * kk[i] + a * float(aw @ off[:, i]))
            if dij and dlm:
                v += (aw[i] * kk[i] * off[i, m] + aw[m] * kk[m] * off[m, i]
                      + sum(aw[k] * off[k, m] * off[k, i] for k in range(n) if k not in (i, m))
                      + a * aw[m] * kk[m] + a * float(aw @ off[:, m])
                      + a * aw[i] * kk[i] + a * float(aw @ off[:, i]))
            if djm and dil:
                v += aw[m] * off[i, m] ** 2 + aw[i] * off[m, i] ** 2
            v += const + a * (aw[j] * off[i, j] + aw[i] * off[j, i]) \
                + a * (aw[m] * off[l, m] + aw[l] * off[m, l])
            out[j, l] = v
    return out


# -- special branches of the simplest family ---------------------------------

def exotic_branch_weights(n: int, params: PrepotentialParams, point) -> tuple[str, np.ndarray]:
    """Weight vector making B an identity multiple on the branch N b + c = 0, b = +-1.

    Returns (grouping label, h). The groupings were selected by searching the
    plausible readings of the displayed products for the one that actually
    yields an identity multiple.
    """
    if not _is_simplest(params):
        raise ValueError("wrong family")
    b = params.b
    if b not in (1.0, -1.0) or abs(n * b + params.c) > ZERO_TOL:
        raise ValueError("exotic weights exist only on the branch N b + c = 0 with b = +-1")
    coords = _as_coords(point)
    e = np.exp(2.0 * coords)
    a = params.a
    if b == 1.0:
        h = -(2.0 + a * n) * e + a * e.sum()
        return "-(2+aN) e_j + a sum_k e_k", h
    prod_except = np.array([np.prod(np.delete(e, j)) for j in range(n)])
    h = (2.0 - a * (n - 1)) * prod_except \
        + a * np.array([sum(np.prod(np.delete(e, k)) for k in range(n) if k != j)
                        for j in range(n)])
    return "(2-a(N-1)) prod_{k!=j} e_k + a sum_{k!=j} prod_{i!=k} e_i", h


def special_case_driver(n: int, params: PrepotentialParams) -> dict:
    """Route a simplest-family parameter set to its branch verdict.

    Returns a record with the branch taken, the closed-form condition value,
    the predicted WDVV verdict (None when the system is meaningless), and,
    on the N b + c = 0 branch with b = +-1, the identity-multiple audit of
    the exotic explicit-weight metric.
    """
    if not _is_simplest(params):
        raise ValueError("wrong family: driver handles the difference-kernel family")
    na2b = abs(n * params.a + 2.0 * params.b)
    nbc = abs(n * params.b + params.c)
    record: dict = {"exotic_metric": None}
    if na2b <= ZERO_TOL and nbc <= ZERO_TOL:
        record.update(branch="doubly-degenerate", condition_value=math.nan, wdvv_predicted=None)
        return record
    if na2b <= ZERO_TOL:
        value = _condition_poly("T1SpecialNa2b", n, params)
        record.update(branch="na2b-zero", condition_value=value,
                      wdvv_predicted=abs(value) <= ZERO_TOL)
        return record
    if nbc <= ZERO_TOL:
        record.update(branch="nbc-zero", condition_value=0.0 if n == 3 else 1.0,
                      wdvv_predicted=n == 3)
        if params.b in (1.0, -1.0):
            point = make_sample_point(n, seed=0)
            grouping, h = exotic_branch_weights(n, params, point)
            tensor = third_tensor(params, point)
            bmat = np.tensordot(h, tensor.entries, axes=(0, 0))
            diag = np.diag(bmat)
            offmax = float(np.abs(bmat - np.diag(diag)).max())
            scale = float(np.abs(diag).max())
            spread = float(np.abs(diag - diag.mean()).max())
            record["exotic_metric"] = {
                "grouping": grouping,
                "relative_off_diagonal": offmax / scale,
                "relative_diagonal_spread": spread / scale,
                "identity_multiple": offmax / scale < 1e-10 and spread / scale < 1e-10,
            }
        return record
    value = _condition_poly("T1Generic", n, params)
    record.update(branch="generic", condition_value=value,
                  wdvv_predicted=abs(value) <= ZERO_TOL)
    return record
