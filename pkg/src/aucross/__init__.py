"""AUC-oriented selective classification for binary probabilistic scorers."""
from .baselines import OracleResult, oracle_search, plug_in, plug_in_auc, scross
from .crossfit import (
    FoldPlan,
    SelectiveClassifier,
    aucross_selector,
    cross_fit_scores,
    fit_aucross,
    make_fold_plan,
)
from .errors import (
    AUCrossError,
    DegenerateSample,
    EmptyInput,
    FoldDegenerate,
    InvalidCoverage,
    InvalidSpec,
    ParseError,
    TrainerFailure,
    Underflow,
    ValidationError,
    WrongClass,
)
from .evaluation import (
    BootstrapSummary,
    SyntheticSpec,
    StudyConfig,
    StudyResult,
    bootstrap_evaluate,
    generate_synthetic,
    grid_selectors,
    risk_coverage_curve,
    run_synthetic_study,
    write_report_csv,
    write_report_json,
)
from .ranking import (
    CapAreas,
    LabeledSample,
    RankProfile,
    auc_fraction,
    cap_areas,
    cap_points,
    gini,
    mann_whitney_auc,
)
from .selective import (
    EMPTY_BAND,
    ConfidenceSelector,
    ScoreBandSelector,
    SelectiveReport,
    apply_selector,
    area_after_remove_negative,
    area_after_remove_positive,
    removable_negative,
    removable_positive,
    selective_report,
)
from .thetas import (
    CombinedTheta,
    ThetaEstimate,
    combine_estimates,
    combine_thetas,
    empirical_quantile,
    estimate_thetas_auc,
    theta_l_from_positive_quantile,
)
from .trainers import ExternalCommandTrainer, LogisticTrainer, PrecomputedScores, TrainerSpec

__version__ = "0.1.0"
