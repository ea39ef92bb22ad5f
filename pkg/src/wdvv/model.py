"""Domain types: prepotential parameter sets, family presets, sample points.

A prepotential here is the function

    F = sum_{i<j} [alpha_- f(a_i - a_j) + alpha_+ f(a_i + a_j)]
        + eta sum_i f(a_i)
        + (a/6) s1^3 + (b/2) s1 s2 + (c/6) s3        (s_p = sum_i a_i^p)

with f''' either coth(x) (five-dimensional families) or 1/x
(four-dimensional families). The extended family replaces the cubic by a
coupling gamma to one extra variable: gamma (x_{N+1}^3/6 + x_{N+1} s2/2).

Sample points live in the dominant chamber a_1 > a_2 > ... > a_N > 0 and
keep every pairwise difference, pairwise sum, and coordinate at least
`margin` away from zero, so all kernel arguments are regular and the
trilogarithm series in the full prepotential converges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KERNEL_COTH = "coth"
KERNEL_RECIP = "recip"
KERNELS = (KERNEL_COTH, KERNEL_RECIP)

PRESET_NAMES = (
    "simplest",
    "type-a-plus",
    "type-a-minus",
    "bcd",
    "bcd-extended",
    "four-dim",
)

SAMPLE_LO = 0.3
SAMPLE_HI = 2.5
DEFAULT_MARGIN = 0.1
REJECTION_CAP = 10_000


@dataclass(frozen=True)
class PrepotentialParams:
    """Full parameter set identifying one member of the prepotential family.

    n counts the base variables; when gamma is not None the tensor gains one
    extra variable (dimension n + 1) and the ordinary cubic must vanish.
    """

    n: int
    kernel: str = KERNEL_COTH
    alpha_minus: float = 1.0
    alpha_plus: float = 0.0
    eta: float = 0.0
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.kernel not in KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}, expected one of {KERNELS}")
        if self.gamma is not None and (self.a, self.b, self.c) != (0.0, 0.0, 0.0):
            raise ValueError("extended family (gamma set) requires a = b = c = 0")

    @property
    def dim(self) -> int:
        """Tensor dimension: n, plus one for the extended family."""
        return self.n + 1 if self.gamma is not None else self.n


@dataclass(frozen=True)
class SamplePoint:
    """Coordinate vector kept `margin` away from every kernel singularity."""

    coords: tuple[float, ...]
    margin: float

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __len__(self) -> int:
        return len(self.coords)


def point_violations(coords: np.ndarray, margin: float) -> list[str]:
    """Independent singularity audit; empty list means the point is valid."""
    coords = np.asarray(coords, dtype=float)
    n = coords.size
    bad = []
    if np.any(np.abs(coords) < margin):
        bad.append("coordinate within margin of zero")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(coords[i] - coords[j]) < margin:
                bad.append(f"difference ({i},{j}) within margin")
            if abs(coords[i] + coords[j]) < margin:
                bad.append(f"sum ({i},{j}) within margin")
    if not np.all(np.diff(coords) < 0) or coords[-1] <= 0:
        bad.append("not in dominant chamber (strictly decreasing, positive)")
    return bad


def make_sample_point(n: int, margin: float = DEFAULT_MARGIN, seed: int = 0) -> SamplePoint:
    """Draw a valid sample point by rejection sampling; deterministic per seed.

    Coordinates are uniform in [0.3, 2.5], sorted decreasing. Margins up to
    0.2 are always feasible in that range; larger margins are attempted and
    raise "infeasible margin" once the rejection cap is exhausted.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if margin <= 0:
        raise ValueError(f"margin must be positive, got {margin}")
    rng = np.random.default_rng(seed)
    for _ in range(REJECTION_CAP):
        coords = np.sort(rng.uniform(SAMPLE_LO, SAMPLE_HI, n))[::-1]
        if not point_violations(coords, margin):
            return SamplePoint(tuple(float(x) for x in coords), margin)
    raise ValueError(f"infeasible margin: no valid {n}-point configuration at margin {margin}")


def preset_params(
    name: str,
    n: int,
    *,
    eta: float | None = None,
    gamma: float | None = None,
    a: float | None = None,
    b: float | None = None,
    c: float | None = None,
) -> PrepotentialParams:
    """Build the parameter set for a named family preset.

    simplest      coth, (alpha_-, alpha_+, eta) = (1, 0, 0), cubic free.
    type-a-plus   coth, (1, 0, 1), cubic (2/(N+1), -1, N+1).
    type-a-minus  same with the cubic negated.
    bcd           coth, (1, 1, eta free), cubic zero.
    bcd-extended  bcd plus the extra-variable coupling gamma.
    four-dim      1/x kernel, (1, 0, 0), cubic free.
    """
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}, expected one of {PRESET_NAMES}")
    if gamma is not None and name != "bcd-extended":
        raise ValueError(f"gamma only applies to the bcd-extended preset, not {name!r}")
    if eta is not None and name not in ("bcd", "bcd-extended"):
        raise ValueError(f"eta is fixed for the {name!r} preset")
    if any(v is not None for v in (a, b, c)) and name not in ("simplest", "four-dim"):
        raise ValueError(f"cubic coefficients are fixed for the {name!r} preset")

    if name == "type-a-plus":
        return PrepotentialParams(n=n, alpha_minus=1.0, alpha_plus=0.0, eta=1.0,
                                  a=2.0 / (n + 1), b=-1.0, c=float(n + 1))
    if name == "type-a-minus":
        return PrepotentialParams(n=n, alpha_minus=1.0, alpha_plus=0.0, eta=1.0,
                                  a=-2.0 / (n + 1), b=1.0, c=-float(n + 1))
    if name == "bcd":
        return PrepotentialParams(n=n, alpha_minus=1.0, alpha_plus=1.0,
                                  eta=0.0 if eta is None else eta)
    if name == "bcd-extended":
        if gamma is None:
            raise ValueError("bcd-extended preset requires gamma")
        return PrepotentialParams(n=n, alpha_minus=1.0, alpha_plus=1.0,
                                  eta=0.0 if eta is None else eta, gamma=gamma)
    kernel = KERNEL_RECIP if name == "four-dim" else KERNEL_COTH
    # four-dim uses difference arguments only: the sum-only variant has a
    # symmetric beta table and never satisfies the residual test.
    return PrepotentialParams(n=n, kernel=kernel, alpha_minus=1.0, alpha_plus=0.0, eta=0.0,
                              a=0.0 if a is None else a,
                              b=0.0 if b is None else b,
                              c=0.0 if c is None else c)
