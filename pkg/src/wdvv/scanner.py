"""Parameter-space search for vanishing WDVV residuals.

A scan walks a rectangular grid over the chosen free parameters, measures
the residual at a few deterministic sample points per cell with a seeded
random-weight metric, and records the cells whose worst residual beats the
hit threshold. Hits can be polished by derivative-free coordinate descent.
Cells are independent work items with per-cell seeds, so evaluation order
never changes the outcome; results are merged in deterministic grid order.

A hit list is always a statement about one grid at one resolution, never a
uniqueness proof; the result carries the grid metadata for that reason.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .checker import PASS_TOL, MetricSpec, check_wdvv
from .closedform import _condition_poly
from .kernel import third_tensor
from .model import DEFAULT_MARGIN, PrepotentialParams, make_sample_point

FREE_PARAM_NAMES = ("a", "b", "c", "eta", "gamma")
GRID_CELL_CAP = 10_000_000
HIT_TOL_DEFAULT = 1e-7
SCAN_POINTS_DEFAULT = 2
CONFIRM_POINTS_DEFAULT = 5
REFINE_MAX_ITERS = 200
REFINE_STEP_FLOOR = 1e-12
_CELL_SEED_STRIDE = 1_000_003
_POINT_SEED_STRIDE = 1_000


def default_box(n: int) -> tuple[float, float]:
    """Default cubic-coefficient search box; wide enough to contain the
    known solution triples for every rank handled here."""
    return (-2.0 * (n + 1), 2.0 * (n + 1))


@dataclass(frozen=True)
class ScanTask:
    """Grid-search description: template parameters plus free-name ranges."""

    template: PrepotentialParams
    free: tuple[str, ...]
    grid: dict = field(default_factory=dict)  # name -> (lo, hi, steps)
    refine: bool = True
    seed: int = 0
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        free = tuple(self.free)
        object.__setattr__(self, "free", free)
        if not free:
            raise ValueError("no free parameters")
        if len(set(free)) != len(free):
            raise ValueError("duplicate free parameter")
        for name in free:
            if name not in FREE_PARAM_NAMES:
                raise ValueError(f"unknown free parameter {name!r}")
        if set(self.grid) != set(free):
            raise ValueError("grid keys must match the free parameters")
        cells = 1
        for name in free:
            lo, hi, steps = self.grid[name]
            if steps < 2:
                raise ValueError(f"grid for {name!r} needs at least 2 steps")
            if not hi > lo:
                raise ValueError(f"grid for {name!r} needs hi > lo")
            cells *= int(steps)
        if cells > GRID_CELL_CAP:
            raise ValueError(f"grid has {cells} cells, cap is {GRID_CELL_CAP}")

    @property
    def n(self) -> int:
        return self.template.n


@dataclass(frozen=True)
class ScanHit:
    values: dict
    residual: float
    refined: bool


@dataclass(frozen=True)
class ScanResult:
    hits: tuple
    grid_min_residual: float
    points_tested: int
    metadata: dict


def _with_values(template: PrepotentialParams, values: dict) -> PrepotentialParams:
    return dataclasses.replace(template, **values)


def _cell_residual(task: ScanTask, values: dict, cell_seed: int, points: int) -> float:
    """Worst residual over the cell's deterministic sample points; inf when
    every candidate metric is singular (degenerate cells are never hits)."""
    try:
        params = _with_values(task.template, values)
    except ValueError:
        return math.inf
    spec = MetricSpec.random(seed=cell_seed)
    worst = 0.0
    for p in range(points):
        point = make_sample_point(params.dim, margin=task.margin,
                                  seed=cell_seed * _POINT_SEED_STRIDE + p)
        tensor = third_tensor(params, point)
        report = check_wdvv(tensor, point, [spec], params=params)
        if report.degenerate:
            return math.inf
        worst = max(worst, report.residual)
    return worst


def _refine_hit(task: ScanTask, values: dict, cell_seed: int,
                spacing: dict, points: int) -> tuple[dict, float]:
    """Coordinate descent with step halving on the cell-residual objective."""
    current = dict(values)
    steps = {name: spacing[name] / 2.0 for name in task.free}
    best = _cell_residual(task, current, cell_seed, points)
    for _ in range(REFINE_MAX_ITERS):
        improved = False
        for name in task.free:
            for direction in (1.0, -1.0):
                trial = dict(current)
                trial[name] = current[name] + direction * steps[name]
                value = _cell_residual(task, trial, cell_seed, points)
                if value < best:
                    best, current, improved = value, trial, True
        if not improved:
            if all(s < REFINE_STEP_FLOOR for s in steps.values()):
                break
            steps = {name: s / 2.0 for name, s in steps.items()}
    return current, best


def scan(task: ScanTask, points_per_cell: int = SCAN_POINTS_DEFAULT,
         hit_tol: float = HIT_TOL_DEFAULT) -> ScanResult:
    """Grid scan; returns hits, the grid-wide minimum residual, and metadata.

    Hit criterion is the maximum residual over the cell's sample points, so
    raising points_per_cell can only remove hits, never add them. Refined
    hits that no longer beat hit_tol after confirmation are dropped.
    """
    if points_per_cell < 1:
        raise ValueError("points_per_cell must be positive")
    axes = {name: np.linspace(*task.grid[name][:2], int(task.grid[name][2]))
            for name in task.free}
    spacing = {name: (task.grid[name][1] - task.grid[name][0]) / (task.grid[name][2] - 1)
               for name in task.free}
    hits = []
    grid_min = math.inf
    tested = 0
    for flat, combo in enumerate(itertools.product(*(axes[name] for name in task.free))):
        values = {name: float(v) for name, v in zip(task.free, combo)}
        cell_seed = (task.seed * _CELL_SEED_STRIDE + flat) % (2**31 - 1)
        worst = _cell_residual(task, values, cell_seed, points_per_cell)
        tested += points_per_cell
        if math.isfinite(worst):
            grid_min = min(grid_min, worst)
        if worst >= hit_tol:
            continue
        if task.refine:
            refined_values, refined_resid = _refine_hit(
                task, values, cell_seed, spacing, CONFIRM_POINTS_DEFAULT)
            if refined_resid <= hit_tol:
                hits.append(ScanHit(values=refined_values, residual=refined_resid,
                                    refined=True))
        else:
            hits.append(ScanHit(values=values, residual=worst, refined=False))
    metadata = {
        "free": list(task.free),
        "grid": {name: list(task.grid[name]) for name in task.free},
        "seed": task.seed,
        "points_per_cell": points_per_cell,
        "hit_tol": hit_tol,
        "refine": task.refine,
    }
    return ScanResult(hits=tuple(hits), grid_min_residual=grid_min,
                      points_tested=tested, metadata=metadata)


def solve_condition(cond_id: str, n: int, template: PrepotentialParams,
                    free: str, bracket: tuple[float, float],
                    samples: int = 257) -> list[float]:
    """All sign-change roots of a closed-form condition along one parameter.

    The raw condition value is evaluated without branch gating, so the
    bracket may cross applicability boundaries. Every bisected root is
    confirmed by a residual check at two sample points; unconfirmed roots
    are discarded. No sign change anywhere in the bracket gives [].
    """
    if free not in FREE_PARAM_NAMES:
        raise ValueError(f"unknown free parameter {free!r}")
    lo, hi = bracket
    if not hi > lo:
        raise ValueError("bracket needs hi > lo")

    def value(x: float) -> float:
        return _condition_poly(cond_id, n, _with_values(template, {free: x}))

    xs = np.linspace(lo, hi, samples)
    ys = np.array([value(x) for x in xs])
    roots = []
    for k in range(samples - 1):
        y0, y1 = ys[k], ys[k + 1]
        if y0 == 0.0:
            roots.append(float(xs[k]))
            continue
        if y0 * y1 >= 0.0:
            continue
        a, b = float(xs[k]), float(xs[k + 1])
        fa = y0
        while b - a > 1e-12:
            mid = 0.5 * (a + b)
            fm = value(mid)
            if fm == 0.0:
                a = b = mid
                break
            if fa * fm < 0.0:
                b = mid
            else:
                a, fa = mid, fm
        roots.append(0.5 * (a + b))
    if ys[-1] == 0.0:
        roots.append(float(xs[-1]))

    confirmed = []
    for root in roots:
        params = _with_values(template, {free: root})
        ok = True
        for p in range(2):
            point = make_sample_point(params.dim, seed=7_001 + p)
            tensor = third_tensor(params, point)
            report = check_wdvv(tensor, point, [MetricSpec.random(seed=11 + p)],
                                params=params)
            if report.degenerate or report.residual > PASS_TOL:
                ok = False
                break
        if ok:
            confirmed.append(root)
    return confirmed
