"""Online interior-point tracking for time-varying conic programs."""

from ._core import (
    BarrierTerm,
    ConfigError,
    ConicProblem,
    DimensionMismatch,
    DisconnectedNetwork,
    DomainViolation,
    InfeasibleStart,
    InvalidArgument,
    NetworkCase,
    OipmError,
    OnlineSolver,
    OpfEncoding,
    build_encoding,
    check_suites,
    drift_threshold,
    estimate_min_singular_value,
    load_case,
    make_synthetic,
    newton_decrement,
    newton_step,
    offline_center,
    parse_case,
    parse_problem,
    problem_to_json,
    run_check,
    run_experiment,
    set_log_level,
)

__all__ = [
    "BarrierTerm",
    "ConfigError",
    "ConicProblem",
    "DimensionMismatch",
    "DisconnectedNetwork",
    "DomainViolation",
    "InfeasibleStart",
    "InvalidArgument",
    "NetworkCase",
    "OipmError",
    "OnlineSolver",
    "OpfEncoding",
    "build_encoding",
    "check_suites",
    "drift_threshold",
    "estimate_min_singular_value",
    "load_case",
    "make_synthetic",
    "newton_decrement",
    "newton_step",
    "offline_center",
    "parse_case",
    "parse_problem",
    "problem_to_json",
    "run_check",
    "run_experiment",
    "set_log_level",
]
