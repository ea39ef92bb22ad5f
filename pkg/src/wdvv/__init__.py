"""Numerical verification of generalized WDVV equations.

Builds third-derivative tensors of five-dimensional gauge-theory
prepotentials (coth kernel) and their four-dimensional 1/x-kernel
relatives, checks the generalized WDVV system F_i B^-1 F_m = F_m B^-1 F_i
against families of metrics B, encodes the closed-form identities behind
the known solution families, and scans parameter space for solutions.
"""

__version__ = "0.1.0"

from .model import (
    KERNEL_COTH,
    KERNEL_RECIP,
    PRESET_NAMES,
    PrepotentialParams,
    SamplePoint,
    make_sample_point,
    preset_params,
)
from .kernel import (
    BetaTable,
    ThirdTensor,
    beta_table,
    f_triple_prime,
    f_value,
    finite_difference_tensor,
    prepotential_value,
    reduce_type_a,
    third_tensor,
)
from .checker import (
    CheckReport,
    MetricSpec,
    build_metric,
    check_original_wdvv,
    check_wdvv,
    metric_independence,
)
from .closedform import (
    CommutatorConstants,
    CONDITION_IDS,
    applicability,
    closedform_commutator,
    theorem_condition_value,
)
from .scanner import ScanResult, ScanTask, scan, solve_condition

__all__ = [
    "KERNEL_COTH",
    "KERNEL_RECIP",
    "PRESET_NAMES",
    "PrepotentialParams",
    "SamplePoint",
    "make_sample_point",
    "preset_params",
    "BetaTable",
    "ThirdTensor",
    "beta_table",
    "f_triple_prime",
    "f_value",
    "finite_difference_tensor",
    "prepotential_value",
    "reduce_type_a",
    "third_tensor",
    "CheckReport",
    "MetricSpec",
    "build_metric",
    "check_original_wdvv",
    "check_wdvv",
    "metric_independence",
    "CommutatorConstants",
    "CONDITION_IDS",
    "applicability",
    "closedform_commutator",
    "theorem_condition_value",
    "ScanResult",
    "ScanTask",
    "scan",
    "solve_condition",
]
