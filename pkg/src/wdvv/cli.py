"""Command-line front end: checks, theorem demos, identity suites, scans.

Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 degenerate, 64 usage error.
JSON is the canonical report; CSV is a flat one-row-per-check projection;
text is human-oriented. Identical arguments plus --deterministic give a
byte-identical report.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import tempfile
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .checker import PASS_TOL, MetricSpec, check_original_wdvv, check_wdvv
from .closedform import (CONDITION_IDS, CONDITION_SUMMARY, applicability,
                         b_quadratic_identity, closedform_commutator,
                         commutator_constants, identity_suite_bcd,
                         identity_suite_type_a, theorem_condition_value,
                         uv_product_violation)
from .kernel import reduce_type_a, third_tensor, three_term_violation
from .matops import commutator
from .model import (KERNEL_COTH, KERNELS, PRESET_NAMES, PrepotentialParams,
                    make_sample_point, preset_params)
from .scanner import ScanTask, default_box, scan, solve_condition

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_DEGENERATE = 3
EXIT_USAGE = 64

IDENTITY_TOL = 1e-9
BANNER = "=" * 70
THEOREM_IDS = ("t1", "t2", "t3", "t4", "t5")
METRIC_CHOICES = ("sum", "type-a", "bcd-sinh", "extra", "random")
FORMAT_CHOICES = ("json", "csv", "text")

# every flag a config file may set, by destination name
CONFIG_KEYS = frozenset({
    "preset", "n", "eta", "gamma", "a", "b", "c", "kernel", "points", "seed",
    "tol", "metric", "format", "out", "deterministic", "id", "free",
    "grid_lo", "grid_hi", "grid_steps", "hit_tol", "refine",
})


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_common(sp: argparse.ArgumentParser, points_default: int) -> None:
    sp.add_argument("--config", help="flat JSON config file; flags override it")
    sp.add_argument("--preset", choices=PRESET_NAMES)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--eta", type=float)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--kernel", choices=sorted(KERNELS))
    sp.add_argument("--points", type=int, default=points_default)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=PASS_TOL)
    sp.add_argument("--metric", choices=METRIC_CHOICES, default="random")
    sp.add_argument("--format", choices=FORMAT_CHOICES, default="text")
    sp.add_argument("--out")
    sp.add_argument("--deterministic", action="store_true", default=False)


def build_parser(config: dict | None = None) -> _Parser:
    config = config or {}
    parser = _Parser(prog="wdvv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wdvv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = []

    sp = sub.add_parser("check", help="residual check at random sample points")
    _add_common(sp, points_default=10)
    subparsers.append(sp)

    sp = sub.add_parser("theorem", help="reproduce one solvability statement")
    _add_common(sp, points_default=3)
    sp.add_argument("--id", choices=THEOREM_IDS, required="id" not in config)
    subparsers.append(sp)

    sp = sub.add_parser("identities", help="algebraic identity suites")
    _add_common(sp, points_default=10)
    subparsers.append(sp)

    sp = sub.add_parser("scan", help="grid scan for vanishing residuals")
    _add_common(sp, points_default=2)
    sp.add_argument("--free", help="comma-separated free parameter names")
    sp.add_argument("--grid-lo", type=float)
    sp.add_argument("--grid-hi", type=float)
    sp.add_argument("--grid-steps", type=int, default=21)
    sp.add_argument("--hit-tol", type=float, default=1e-7)
    sp.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True)
    subparsers.append(sp)

    sp = sub.add_parser("reduce-a", help="linear-change reduction cross-check")
    _add_common(sp, points_default=3)
    subparsers.append(sp)

    # subcommands parse into their own namespace, so config-derived defaults
    # must be planted on each subparser, not on the top-level parser
    for sp in subparsers:
        sp.set_defaults(**config)
    return parser


def _config_path(argv) -> str | None:
    for i, token in enumerate(argv):
        if token == "--config":
            if i + 1 >= len(argv):
                raise _UsageError("--config needs a path")
            return argv[i + 1]
        if token.startswith("--config="):
            return token.split("=", 1)[1]
    return None


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            loaded = json.load(fh)
    except OSError as exc:
        raise _UsageError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise _UsageError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(loaded, dict):
        raise _UsageError(f"config {path} must be a flat JSON object")
    unknown = sorted(set(loaded) - CONFIG_KEYS)
    if unknown:
        raise _UsageError(f"unknown config keys: {', '.join(unknown)}")
    return loaded


def _parse(argv) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    path = _config_path(argv)
    # file values become defaults, so explicit flags still win
    config = _load_config(path) if path else {}
    args = build_parser(config).parse_args(argv)
    _coerce(args)
    _validate(args)
    return args


_INT_FIELDS = ("n", "points", "seed", "grid_steps")
_FLOAT_FIELDS = ("eta", "gamma", "a", "b", "c", "tol", "grid_lo", "grid_hi", "hit_tol")


def _coerce(args) -> None:
    """Config files bypass argparse type conversion; normalize here."""
    for name, typ in [(f, int) for f in _INT_FIELDS] + [(f, float) for f in _FLOAT_FIELDS]:
        value = getattr(args, name, None)
        if value is None:
            continue
        try:
            setattr(args, name, typ(value))
        except (TypeError, ValueError):
            raise _UsageError(f"--{name.replace('_', '-')} expects a number, got {value!r}")


def _validate(args) -> None:
    if args.n < 2:
        raise _UsageError(f"--n must be at least 2, got {args.n}")
    if args.points < 1:
        raise _UsageError(f"--points must be positive, got {args.points}")
    if not args.tol > 0.0:
        raise _UsageError(f"--tol must be positive, got {args.tol}")
    if args.preset is not None and args.preset not in PRESET_NAMES:
        raise _UsageError(f"unknown preset {args.preset!r}")
    if args.kernel is not None and args.kernel not in KERNELS:
        raise _UsageError(f"unknown kernel {args.kernel!r}")
    if args.metric not in METRIC_CHOICES:
        raise _UsageError(f"unknown metric {args.metric!r}")
    if args.format not in FORMAT_CHOICES:
        raise _UsageError(f"unknown format {args.format!r}")
    if args.command == "theorem" and args.id not in THEOREM_IDS:
        raise _UsageError(f"unknown theorem id {args.id!r}")
    if args.command == "scan":
        if args.grid_steps < 2:
            raise _UsageError("--grid-steps must be at least 2")
        if not args.hit_tol > 0.0:
            raise _UsageError("--hit-tol must be positive")


def _build_params(args) -> tuple[PrepotentialParams, str | None]:
    if args.preset:
        if args.kernel:
            raise _UsageError("--kernel conflicts with --preset; the preset fixes the kernel")
        try:
            params = preset_params(args.preset, args.n, eta=args.eta, gamma=args.gamma,
                                   a=args.a, b=args.b, c=args.c)
        except ValueError as exc:
            raise _UsageError(str(exc))
        return params, args.preset
    if args.gamma is not None:
        raise _UsageError("--gamma requires --preset bcd-extended")
    try:
        params = PrepotentialParams(
            n=args.n, kernel=args.kernel or KERNEL_COTH,
            alpha_minus=1.0, alpha_plus=0.0, eta=args.eta or 0.0,
            a=args.a or 0.0, b=args.b or 0.0, c=args.c or 0.0)
    except ValueError as exc:
        raise _UsageError(str(exc))
    return params, None


def _metric_spec(name: str, seed: int) -> MetricSpec:
    if name == "sum":
        return MetricSpec.sum_all()
    if name == "type-a":
        return MetricSpec.type_a()
    if name == "bcd-sinh":
        return MetricSpec.bcd_sinh()
    if name == "extra":
        return MetricSpec.extra_slice()
    return MetricSpec.random(seed=seed)


def _params_dict(params: PrepotentialParams, preset) -> dict:
    out = dataclasses.asdict(params)
    out["preset"] = preset
    return out


def _anchor(params: PrepotentialParams):
    for cond_id in CONDITION_IDS:
        if applicability(cond_id, params.n, params):
            return cond_id
    return None


def _fmt_point(coords) -> str:
    return "(" + ", ".join(f"{x:.4f}" for x in coords) + ")"


def _summarize(checks) -> dict:
    out = {"pass": 0, "fail": 0, "inconclusive": 0, "degenerate": 0}
    for entry in checks:
        out[entry["verdict"]] += 1
    return out


def _exit_from_summary(summary: dict) -> int:
    if summary["fail"]:
        return EXIT_FAIL
    if summary["degenerate"]:
        return EXIT_DEGENERATE
    if summary["inconclusive"]:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def _verdict_from_residual(residual: float, tol: float) -> str:
    if residual < 0.0:
        return "degenerate"
    if residual <= tol:
        return "pass"
    if residual >= 1e-3:
        return "fail"
    return "inconclusive"


# -- check --------------------------------------------------------------------

def _run_check(args):
    params, preset = _build_params(args)
    spec = _metric_spec(args.metric, args.seed)
    anchor = _anchor(params)
    checks = []
    for i in range(args.points):
        point = make_sample_point(params.dim, seed=args.seed + i)
        tensor = third_tensor(params, point)
        report = check_wdvv(tensor, point, [spec], tol=args.tol, params=params)
        checks.append({
            "condition": anchor,
            "label": None,
            "point": list(point.coords),
            "metric": report.metric_used.label() if report.metric_used else None,
            "residual": report.residual,
            "verdict": report.verdict,
        })
    summary = _summarize(checks)
    report_doc = {
        "version": __version__,
        "command": "check",
        "params": _params_dict(params, preset),
        "checks": checks,
        "summary": summary,
    }
    lines = [BANNER, f"residual check  n={params.n}  kernel={params.kernel}"
                     f"  metric={args.metric}  tol={args.tol:g}", BANNER]
    if anchor:
        lines.append(f"condition {anchor}: {CONDITION_SUMMARY[anchor]}")
        lines.append(f"condition value: {theorem_condition_value(anchor, params.n, params):.6g}")
    for entry in checks:
        lines.append(f"  {entry['verdict'].upper():<12} residual={entry['residual']:.3e}"
                     f"  metric={entry['metric']}  point={_fmt_point(entry['point'])}")
    lines.append(f"summary: pass={summary['pass']} fail={summary['fail']}"
                 f" inconclusive={summary['inconclusive']} degenerate={summary['degenerate']}")
    return report_doc, lines, _exit_from_summary(summary)


# -- theorem ------------------------------------------------------------------

def _case_rows(case_label, cond_id, params, expected, args, *, original_index=None):
    """Run one theorem case over the sample points; one row per point/form."""
    rows = []
    worst = 0.0
    degenerate = False
    spec = MetricSpec.random(seed=args.seed)
    for i in range(args.points):
        point = make_sample_point(params.dim, seed=args.seed + i)
        tensor = third_tensor(params, point)
        report = check_wdvv(tensor, point, [spec], tol=args.tol, params=params)
        rows.append({
            "condition": cond_id, "label": case_label,
            "point": list(point.coords),
            "metric": report.metric_used.label() if report.metric_used else None,
            "residual": report.residual, "verdict": report.verdict,
        })
        degenerate = degenerate or report.degenerate
        worst = max(worst, report.residual)
        if original_index is not None:
            rep2 = check_original_wdvv(params, point, original_index, tol=args.tol)
            rows.append({
                "condition": cond_id, "label": case_label + " (constant-slice form)",
                "point": list(point.coords),
                "metric": rep2.metric_used.label() if rep2.metric_used else None,
                "residual": rep2.residual, "verdict": rep2.verdict,
            })
            degenerate = degenerate or rep2.degenerate
            worst = max(worst, rep2.residual)
    passed = (not degenerate) and worst <= args.tol
    matched = passed if expected == "pass" else not passed
    case = {"condition": cond_id, "label": case_label, "expected": expected,
            "max_residual": worst, "matched": matched}
    return rows, case


def _theorem_cases(args):
    n = args.n
    tid = args.id
    conditions = []
    specs = []  # (label, cond_id, params, expected, original_index)

    if tid == "t1":
        b = args.b if args.b is not None else 0.0
        c = args.c if args.c is not None else 1.0
        template = PrepotentialParams(n=n, kernel=KERNEL_COTH, alpha_minus=1.0,
                                      alpha_plus=0.0, eta=0.0, a=0.0, b=b, c=c)
        roots = solve_condition("T1Generic", n, template, "a", (-1.0, 1.0))
        conditions.append({"id": "T1Generic", "formula": CONDITION_SUMMARY["T1Generic"],
                           "fixed": {"b": b, "c": c}, "bracket": [-1.0, 1.0],
                           "roots": roots})
        if not roots:
            return conditions, specs, "no sign change in bracket; nothing to demonstrate"
        a_star = roots[0]
        on = dataclasses.replace(template, a=a_star)
        off = dataclasses.replace(template, a=a_star + 0.3)
        specs.append((f"a={a_star:.6g} (root)", "T1Generic", on, "pass", None))
        specs.append((f"a={a_star + 0.3:.6g} (off variety)", "T1Generic", off, "not-pass", None))
        return conditions, specs, None

    if tid == "t2":
        conditions.append({"id": "T2TypeA", "formula": CONDITION_SUMMARY["T2TypeA"]})
        for preset in ("type-a-plus", "type-a-minus"):
            specs.append((preset, "T2TypeA", preset_params(preset, n), "pass", None))
        t = 0.5
        scaled = PrepotentialParams(n=n, kernel=KERNEL_COTH, alpha_minus=1.0,
                                    alpha_plus=0.0, eta=1.0,
                                    a=t * 2.0 / (n + 1), b=-t, c=t * (n + 1))
        specs.append((f"triple scaled by {t}", "T2TypeA", scaled, "not-pass", None))
        return conditions, specs, None

    if tid == "t3":
        eta_star = -2.0 * (n - 2)
        conditions.append({"id": "T3BCD", "formula": CONDITION_SUMMARY["T3BCD"],
                           "eta_star": eta_star})
        specs.append((f"eta={eta_star:g} (solvable)", "T3BCD",
                      preset_params("bcd", n, eta=eta_star), "pass", None))
        specs.append((f"eta={eta_star + 1.0:g}", "T3BCD",
                      preset_params("bcd", n, eta=eta_star + 1.0), "not-pass", None))
        return conditions, specs, None

    if tid == "t4":
        gamma = args.gamma if args.gamma is not None else 1.0
        eta_star = -2.0 * (n - 2) - gamma * gamma / 2.0
        conditions.append({"id": "T4Extended", "formula": CONDITION_SUMMARY["T4Extended"],
                           "gamma": gamma, "eta_star": eta_star})
        on = preset_params("bcd-extended", n, eta=eta_star, gamma=gamma)
        off = preset_params("bcd-extended", n, eta=eta_star + 1.0, gamma=gamma)
        specs.append((f"eta={eta_star:g} (solvable)", "T4Extended", on, "pass", n))
        specs.append((f"eta={eta_star + 1.0:g}", "T4Extended", off, "not-pass", n))
        return conditions, specs, None

    if n == 2:
        raise _UsageError("theorem t5 is undefined at n=2")
    b = args.b if args.b is not None else 0.7
    c = args.c if args.c is not None else 1.3
    a_on = (n * b**3 + 3.0 * b * b * c) / (c * c)
    conditions.append({"id": "T5FourDim", "formula": CONDITION_SUMMARY["T5FourDim"],
                       "fixed": {"b": b, "c": c}, "a_on_surface": a_on})
    on = preset_params("four-dim", n, a=a_on, b=b, c=c)
    off = preset_params("four-dim", n, a=a_on + 0.5, b=b, c=c)
    specs.append((f"a={a_on:.6g} (on surface)", "T5FourDim", on, "pass", None))
    specs.append((f"a={a_on + 0.5:.6g} (off surface)", "T5FourDim", off, "not-pass", None))
    return conditions, specs, None


def _run_theorem(args):
    if args.preset:
        raise _UsageError("theorem command selects its own parameter families")
    conditions, case_specs, note = _theorem_cases(args)
    checks, cases = [], []
    for label, cond_id, params, expected, orig_idx in case_specs:
        rows, case = _case_rows(label, cond_id, params, expected, args,
                                original_index=orig_idx)
        checks.extend(rows)
        cases.append(case)
    matched = [c for c in cases if c["matched"]]
    summary = {"pass": len(matched), "fail": len(cases) - len(matched),
               "inconclusive": 0, "degenerate": 0}
    report_doc = {
        "version": __version__,
        "command": "theorem",
        "params": {"id": args.id, "n": args.n, "points": args.points,
                   "seed": args.seed, "tol": args.tol},
        "conditions": conditions,
        "cases": cases,
        "checks": checks,
        "summary": summary,
    }
    if note:
        report_doc["note"] = note
    lines = [BANNER, f"theorem demo {args.id}  n={args.n}", BANNER]
    for cond in conditions:
        lines.append(f"condition {cond['id']}: {cond['formula']}")
        for key in ("eta_star", "gamma", "roots", "a_on_surface"):
            if key in cond:
                lines.append(f"  {key} = {cond[key]}")
    if note:
        lines.append(f"note: {note}")
    for case in cases:
        flag = "PASS" if case["matched"] else "FAIL"
        lines.append(f"  {flag}  {case['label']:<34} expected={case['expected']:<9}"
                     f" max residual={case['max_residual']:.3e}")
    ok = bool(cases) and all(c["matched"] for c in cases)
    lines.append(f"theorem reproduced: {'yes' if ok else 'no'}")
    return report_doc, lines, EXIT_PASS if ok else EXIT_FAIL


# -- identities ---------------------------------------------------------------

def _run_identities(args):
    n = args.n
    seed = args.seed
    rows = []

    def add(condition, violation):
        rows.append({"condition": condition, "label": None, "point": None,
                     "metric": None, "residual": float(violation),
                     "verdict": "pass" if violation <= IDENTITY_TOL else "fail"})

    rng = np.random.default_rng(seed)
    worst_coth = worst_recip = 0.0
    draws = 0
    while draws < max(50, args.points):
        p, q, r = rng.uniform(-2.5, 2.5, 3)
        if min(abs(p - q), abs(q - r), abs(p - r)) < 1e-2:
            continue
        draws += 1
        worst_coth = max(worst_coth, three_term_violation("coth", p, q, r))
        worst_recip = max(worst_recip, three_term_violation("recip", p, q, r))
    add("kernel-three-term/coth", worst_coth)
    add("kernel-three-term/recip", worst_recip)

    points = [make_sample_point(n, seed=seed + i) for i in range(args.points)]
    for variant in ("plus", "minus"):
        worst = {}
        for point in points:
            for rel, violation in identity_suite_type_a(variant, n, point):
                worst[rel] = max(worst.get(rel, 0.0), violation)
        for rel in sorted(worst):
            add(f"type-a-{variant}/{rel}", worst[rel])

    eta = args.eta if args.eta is not None else 0.9
    worst = {}
    for point in points:
        for rel, violation in identity_suite_bcd(n, point, eta):
            worst[rel] = max(worst.get(rel, 0.0), violation)
    for rel in sorted(worst):
        add(f"bcd/{rel}", worst[rel])

    a = args.a if args.a is not None else 0.7
    b = args.b if args.b is not None else -0.4
    c = args.c if args.c is not None else 1.1
    params = PrepotentialParams(n=n, kernel=args.kernel or KERNEL_COTH,
                                alpha_minus=1.0, alpha_plus=0.0, eta=0.0,
                                a=a, b=b, c=c)
    worst_uv = worst_comm = 0.0
    consts = commutator_constants(n, params)
    for point in points:
        tensor = third_tensor(params, point)
        for m in range(n):
            worst_uv = max(worst_uv, uv_product_violation(tensor, params, m))
        for i in range(n):
            for m in range(n):
                direct = commutator(tensor.slice(i), tensor.slice(m))
                closed = closedform_commutator(i, m, n, consts)
                worst_comm = max(worst_comm, float(np.abs(direct - closed).max()))
    add("uv-product", worst_uv)
    add("slice-commutator", worst_comm)

    worst_bq = 0.0
    for i in range(n):
        for m in range(n):
            if i == m:
                continue
            for j in range(n):
                for q in range(n):
                    lhs, rhs = b_quadratic_identity(i, m, j, q, n, params)
                    worst_bq = max(worst_bq, abs(lhs - rhs))
    add("metric-quadratic", worst_bq)

    summary = _summarize(rows)
    report_doc = {
        "version": __version__,
        "command": "identities",
        "params": {"n": n, "points": args.points, "seed": seed, "eta": eta,
                   "a": a, "b": b, "c": c, "kernel": params.kernel,
                   "identity_tol": IDENTITY_TOL},
        "checks": rows,
        "summary": summary,
    }
    lines = [BANNER, f"identity suites  n={n}  points={args.points}  tol={IDENTITY_TOL:g}",
             BANNER]
    for entry in rows:
        lines.append(f"  {entry['verdict'].upper():<6} {entry['condition']:<34}"
                     f" max violation={entry['residual']:.3e}")
    lines.append(f"summary: pass={summary['pass']} fail={summary['fail']}")
    return report_doc, lines, EXIT_PASS if summary["fail"] == 0 else EXIT_FAIL


# -- scan -----------------------------------------------------------------------

def _run_scan(args):
    params, preset = _build_params(args)
    if not args.free:
        raise _UsageError("scan needs --free with at least one parameter name")
    free = tuple(s.strip() for s in args.free.split(",") if s.strip())
    lo_default, hi_default = default_box(params.n)
    lo = args.grid_lo if args.grid_lo is not None else lo_default
    hi = args.grid_hi if args.grid_hi is not None else hi_default
    grid = {name: (lo, hi, args.grid_steps) for name in free}
    try:
        task = ScanTask(template=params, free=free, grid=grid,
                        refine=args.refine, seed=args.seed)
    except ValueError as exc:
        raise _UsageError(str(exc))
    result = scan(task, points_per_cell=args.points, hit_tol=args.hit_tol)
    hits = [{"values": h.values, "residual": h.residual, "refined": h.refined}
            for h in result.hits]
    report_doc = {
        "version": __version__,
        "command": "scan",
        "params": _params_dict(params, preset),
        "checks": [],
        "summary": {"pass": 0, "fail": 0, "inconclusive": 0, "degenerate": 0},
        "scan": {
            "hits": hits,
            "grid_min_residual": result.grid_min_residual,
            "points_tested": result.points_tested,
            "metadata": result.metadata,
        },
    }
    lines = [BANNER,
             f"scan  n={params.n}  free={','.join(free)}  grid=[{lo:g},{hi:g}]"
             f" x{args.grid_steps}  hit_tol={args.hit_tol:g}", BANNER]
    if hits:
        for h in hits:
            vals = ", ".join(f"{k}={v:.6g}" for k, v in sorted(h["values"].items()))
            lines.append(f"  HIT  {vals}  residual={h['residual']:.3e}"
                         f"  refined={h['refined']}")
    else:
        lines.append("  no hits on this grid at this resolution")
    lines.append(f"grid minimum residual: {result.grid_min_residual:.3e}"
                 f"  points tested: {result.points_tested}")
    return report_doc, lines, EXIT_PASS


# -- reduce-a -------------------------------------------------------------------

def _run_reduce(args):
    n = args.n
    rows = []
    params = preset_params("type-a-plus", n)
    for i in range(args.points):
        point = make_sample_point(n, seed=args.seed + i)
        direct = third_tensor(params, point)
        pulled = reduce_type_a(n, point)
        diff = float(np.abs(direct.entries - pulled.entries).max())
        rows.append({"condition": "reduce-type-a", "label": None,
                     "point": list(point.coords), "metric": None,
                     "residual": diff,
                     "verdict": "pass" if diff <= IDENTITY_TOL else "fail"})
    summary = _summarize(rows)
    report_doc = {
        "version": __version__,
        "command": "reduce-a",
        "params": {"n": n, "points": args.points, "seed": args.seed,
                   "tol": IDENTITY_TOL},
        "checks": rows,
        "summary": summary,
    }
    lines = [BANNER, f"dimensional reduction cross-check  n={n}", BANNER]
    for entry in rows:
        lines.append(f"  {entry['verdict'].upper():<6} max diff={entry['residual']:.3e}"
                     f"  point={_fmt_point(entry['point'])}")
    lines.append(f"summary: pass={summary['pass']} fail={summary['fail']}")
    return report_doc, lines, EXIT_PASS if summary["fail"] == 0 else EXIT_FAIL


# -- output ---------------------------------------------------------------------

def _to_csv(report_doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["condition", "label", "point", "metric",
                     "residual", "verdict"])
    for entry in report_doc.get("checks", []):
        point = entry.get("point")
        writer.writerow([
            entry.get("condition") or "",
            entry.get("label") or "",
            " ".join(f"{x:.17g}" for x in point) if point else "",
            entry.get("metric") or "",
            f"{entry['residual']:.17g}",
            entry["verdict"],
        ])
    for hit in report_doc.get("scan", {}).get("hits", []):
        values = " ".join(f"{k}={v:.17g}" for k, v in sorted(hit["values"].items()))
        writer.writerow(["scan-hit", values, "", "", f"{hit['residual']:.17g}", "hit"])
    return buf.getvalue()


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".wdvv-report-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, report_doc: dict, lines: list) -> None:
    if not args.deterministic:
        report_doc["generated_at"] = datetime.now(timezone.utc).isoformat()
    if args.format == "json":
        text = json.dumps(report_doc, indent=2, sort_keys=True, allow_nan=True) + "\n"
    elif args.format == "csv":
        text = _to_csv(report_doc)
    else:
        text = "\n".join(lines) + "\n"
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


_RUNNERS = {
    "check": _run_check,
    "theorem": _run_theorem,
    "identities": _run_identities,
    "scan": _run_scan,
    "reduce-a": _run_reduce,
}


def main(argv=None) -> int:
    try:
        args = _parse(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        report_doc, lines, code = _RUNNERS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _emit(args, report_doc, lines)
    except OSError as exc:
        print(f"i/o error: {getattr(exc, 'filename', args.out)}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return code


if __name__ == "__main__":
    sys.exit(main())
