"""Multiplication operators on weighted Banach spaces of functions on rooted trees.

Modules: ``tree`` (lazy truncated trees), ``functions`` (function spaces and
norms), ``expr`` and ``tail`` (symbol language and tail classification),
``analysis`` (operator verdicts), ``oracle`` (exact norms on finite trees),
``harness`` (proof witnesses and suites) and ``cli``.
"""

from .analysis import (
    AnalysisReport,
    Config,
    ConfigError,
    MultOperator,
    Verdict,
    analyze,
    apply,
    bounded_below,
    eta,
    is_bounded,
    is_compact_L_to_Lmu,
    is_compact_Lmu,
    is_compact_Lmu_to_L,
    is_isometry_Lmu,
    isometry_cross_verdict,
    norm_bounds_L_to_Lmu,
    norm_bounds_Lmu_to_L,
    norm_Lmu_to_Lmu,
    spectrum,
    varpi,
)
from .expr import ExprError, ExprEvalError, ExprSyntaxError, evaluate, parse, to_source
from .functions import (
    D,
    FunctionError,
    TreeFunction,
    Weight,
    char_fn,
    depth_fn,
    lipschitz_norm,
    sup_norm,
    weight_preset,
    weighted_norm,
)
from .harness import compactness_trend, make_witness, no_isometry_demo, theorem_suite
from .oracle import oracle_norm, oracle_random_suite
from .tail import TailClass, TailKind, TailSettings, classify_tail, declared_tail
from .tree import Truncation, TreeError, TreeSpec, build, distance, parent, sector

__version__ = "0.1.0"
