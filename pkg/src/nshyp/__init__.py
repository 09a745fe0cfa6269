"""Non-stochastic hypothesis testing over set-valued uncertainty, and
deterministic privacy-preserving reporting policies with provable
privacy/accuracy guarantees.

The heavy inner loops (boundary-expression evaluation and the strip-measure
quadrature) run on a compiled kernel when available; BACKEND names the one
in use ("native" or "python").
"""

from ._core import BACKEND
from .dataio import DataTable, SanitizationReport, generate_fixture, load_csv, sanitize_table, write_csv
from .expr import BoundaryExpr, ExprEvalError, ExprSyntaxError, evaluate, parse
from .hypotest import (ConditionalOutputRanges, Test, TestReport, brute_force_optimum,
                       consistent_test, correct_set, performance, performance_bound,
                       ranges_from_world, test_report, verdict)
from .metrics import Histogram2D, UtilityCurvePoint, histogram, kl_divergence, mean_diff, utility_curve
from .nset import DiscreteSet, Interval, NSet
from .privacy import (PolicyGuarantee, QuadratureParams, StripPolicy, apply_policy,
                      epsilon_guarantee, is_eps_private, is_rho_accurate,
                      measured_accuracy, priv_measure, strip_measure, sweep_epsilon)
from .uvar import (P0, P1, FiniteWorld, conditional_range, entropy_h0, entropy_H0,
                   is_unrelated, is_unrelated_by_conditionals, joint_range,
                   marginal_range)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    "NSet", "DiscreteSet", "Interval",
    "FiniteWorld", "P0", "P1", "marginal_range", "conditional_range",
    "joint_range", "is_unrelated", "is_unrelated_by_conditionals",
    "entropy_h0", "entropy_H0",
    "ConditionalOutputRanges", "Test", "TestReport", "consistent_test",
    "correct_set", "performance", "performance_bound", "test_report",
    "verdict", "brute_force_optimum", "ranges_from_world",
    "BoundaryExpr", "parse", "evaluate", "ExprSyntaxError", "ExprEvalError",
    "StripPolicy", "PolicyGuarantee", "QuadratureParams", "apply_policy",
    "strip_measure", "epsilon_guarantee", "sweep_epsilon", "priv_measure",
    "is_eps_private", "measured_accuracy", "is_rho_accurate",
    "DataTable", "SanitizationReport", "load_csv", "write_csv",
    "generate_fixture", "sanitize_table",
    "Histogram2D", "UtilityCurvePoint", "histogram", "mean_diff",
    "kl_divergence", "utility_curve",
]
