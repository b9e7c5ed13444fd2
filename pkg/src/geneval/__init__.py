"""geneval: learn map-generalisation evaluation functions from graded
pairwise preferences captured in a human-machine dialogue."""

from .buildings import (
    ALL_CONSTRAINTS,
    LEARNABLE_CONSTRAINTS,
    BuildingObject,
    GeneralisationCandidate,
    ScenarioConfig,
    apply_recipe,
    evaluate_constraints,
    generate_building,
    generate_candidates,
    make_candidate,
)
from .compat import (
    CompatibilityReport,
    CompatibilityThresholds,
    comp,
    diagnose,
    global_error,
)
from .evalfunc import (
    ConstraintMismatchError,
    ConstraintSet,
    EvaluationFunction,
    SatisfactionVector,
    effective_weight_share,
    quality,
)
from .geometry import GeometryError, Polygon
from .learn import (
    LearnResult,
    ParameterGrid,
    Solution,
    TabuConfig,
    exhaustive_search,
    neighborhood,
    snap_to_grid,
    tabu_search,
)
from .oracle import OracleConfig, label_set, oracle_label
from .preferences import (
    Comparison,
    ComparisonSet,
    PreferenceLabel,
    PreferenceRecord,
    build_comparison_set,
    load_comparison_set,
    load_preferences,
    mirror,
    next_unanswered,
    save_comparison_set,
    save_preferences,
)

__version__ = "0.1.0"
