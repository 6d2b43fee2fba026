"""Unbiased estimation with coupled underdamped Langevin chains."""

try:
    from uld._uld import (  # installed wheel layout
        ConfigError,
        DegenerateError,
        DimensionError,
        DynamicsParams,
        EstimatorConfig,
        ExperimentKind,
        ExperimentSpec,
        NonMeetingError,
        NumericError,
        ReplicateResult,
        RunSummary,
        SlopeFit,
        fit_slope,
        kind_name,
        parse_kind,
        run_experiment,
    )
except ImportError:
    from _uld import (  # build-tree layout
        ConfigError,
        DegenerateError,
        DimensionError,
        DynamicsParams,
        EstimatorConfig,
        ExperimentKind,
        ExperimentSpec,
        NonMeetingError,
        NumericError,
        ReplicateResult,
        RunSummary,
        SlopeFit,
        fit_slope,
        kind_name,
        parse_kind,
        run_experiment,
    )

__all__ = [
    "ConfigError",
    "DegenerateError",
    "DimensionError",
    "DynamicsParams",
    "EstimatorConfig",
    "ExperimentKind",
    "ExperimentSpec",
    "NonMeetingError",
    "NumericError",
    "ReplicateResult",
    "RunSummary",
    "SlopeFit",
    "fit_slope",
    "kind_name",
    "parse_kind",
    "run_experiment",
]
