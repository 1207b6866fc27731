"""Kourosh and Arash Method (KAM) efficiency analysis for decision making units."""

from .analysis import (
    AdequacyFinding,
    Report,
    SummaryStats,
    adequacy_report,
    build_report,
    neighbor_distance,
    rank,
    summary,
)
from .dataset import (
    Dataset,
    DatasetError,
    IssueCode,
    ValidationIssue,
    dataset_to_csv,
    load_dataset,
    parse_dataset,
    validate_dataset,
)
from .kam_core import (
    ConfigurationError,
    DeltaMode,
    DeltaRule,
    EpsilonMode,
    EpsilonPolicy,
    KamConfig,
    KamEvaluation,
    WeightMode,
    WeightPolicy,
    build_kam_lp,
    classify,
    compute_score,
    compute_target,
    delta_value,
    evaluate,
    evaluate_all,
    resolve_epsilon,
    resolve_weights,
    weighted_productivity,
)
from .lp_solver import LinearProgram, LpOutcome, LpStatus, solve
from .oracle import OracleResult, oracle_evaluate, random_instance

__version__ = "0.1.0"
