"""Bounds and detectability analysis for two-setting, two-outcome Bell expressions.

The package computes exact classical (local-hidden-variable) bounds by
exhaustive strategy enumeration, analytic and numeric quantum bounds for
single-qubit observables, Werner-state separability and violation
thresholds, and sampled minima of the block-ratio gamma used to certify
undetectable visibility windows.
"""

from .errors import CapExceeded, ParseError, PowerIterationError
from .expressions import (
    ABSENT,
    BellExpression,
    BlockView,
    block,
    block_sizes,
    builtin,
    canonical_patterns,
    from_vector,
    is_homogeneous,
    new_expression,
    term_index,
)
from .classical import (
    ClassicalBoundResult,
    DeterministicStrategy,
    block_strategy_matrix,
    closed_form_classical,
    lhv_bound,
    strategy_matrix,
    strategy_value,
)
from .quantum import (
    ObservableAssignment,
    QubitObservable,
    QuantumBoundsReport,
    SeesawResult,
    analytic_quantum_upper,
    bell_operator,
    composite_ratio_upper,
    max_abs_eigenvalue,
    quantum_bounds_report,
    seesaw_lower,
)
from .werner import (
    GhzFamily,
    MeasureConditionVerdict,
    MonteCarloEstimate,
    PureFamily,
    ThetaRange,
    detect_visibility,
    ghz_amplitudes,
    ghz_separability_threshold,
    max_pair_product,
    measure_lower_bound,
    measure_monte_carlo,
    necessary_check_first_failure,
    separability_necessary_check,
    separability_upper_bound,
    undetectable_measure_condition,
    undetectable_range_general,
    undetectable_range_homogeneous,
    visibility_lower_bound,
    werner_density,
)
from .gamma import (
    GammaIndexEstimate,
    GammaScanConfig,
    GammaScanResult,
    gamma_for,
    gamma_scan,
)

__version__ = "0.1.0"

__all__ = [
    "ABSENT",
    "BellExpression",
    "BlockView",
    "CapExceeded",
    "ClassicalBoundResult",
    "DeterministicStrategy",
    "GammaIndexEstimate",
    "GammaScanConfig",
    "GammaScanResult",
    "GhzFamily",
    "MeasureConditionVerdict",
    "MonteCarloEstimate",
    "ObservableAssignment",
    "ParseError",
    "PowerIterationError",
    "PureFamily",
    "QuantumBoundsReport",
    "QubitObservable",
    "SeesawResult",
    "ThetaRange",
    "analytic_quantum_upper",
    "bell_operator",
    "block",
    "block_sizes",
    "block_strategy_matrix",
    "builtin",
    "canonical_patterns",
    "closed_form_classical",
    "composite_ratio_upper",
    "detect_visibility",
    "from_vector",
    "gamma_for",
    "gamma_scan",
    "ghz_amplitudes",
    "ghz_separability_threshold",
    "is_homogeneous",
    "lhv_bound",
    "max_abs_eigenvalue",
    "max_pair_product",
    "measure_lower_bound",
    "measure_monte_carlo",
    "necessary_check_first_failure",
    "new_expression",
    "quantum_bounds_report",
    "seesaw_lower",
    "separability_necessary_check",
    "separability_upper_bound",
    "strategy_matrix",
    "strategy_value",
    "term_index",
    "undetectable_measure_condition",
    "undetectable_range_general",
    "undetectable_range_homogeneous",
    "visibility_lower_bound",
    "werner_density",
]
