"""Maximum-likelihood fitting and goodness-of-fit testing for left-truncated
log-logistic distributions, with Monte Carlo critical-value machinery."""

__version__ = "0.1.0"

from .distribution import ParetoTail, TruncatedLogLogistic
from .estimation import (FitDiagnostics, FitOutcome, NoFiniteMaximumFit,
                         NormalizedSample, ParetoBoundaryFit, RegularFit,
                         Sample, beta_c, fit, lambda_profile, master_residual,
                         normalize, objective, profile_likelihood)
from .exceptions import (ConvergenceError, DomainError, InvalidParameterError,
                         TruncllError)
from .gof import (GofReport, GofStatistics, LevelDecision, ad_statistic,
                  critical_interpolated, critical_table, ks_statistic, run_gof)
from .montecarlo import (CellResult, QuantileEstimate, SimConfig, emit_table,
                         quantile_with_error, run_cell)
from .tables import (CriticalValueEntry, CriticalValueTable,
                     load_embedded_tables, load_tables, write_tables)

__all__ = [
    "TruncatedLogLogistic", "ParetoTail",
    "Sample", "NormalizedSample", "FitDiagnostics", "FitOutcome",
    "RegularFit", "ParetoBoundaryFit", "NoFiniteMaximumFit",
    "normalize", "beta_c", "lambda_profile", "objective",
    "profile_likelihood", "master_residual", "fit",
    "GofReport", "GofStatistics", "LevelDecision",
    "ks_statistic", "ad_statistic", "critical_interpolated", "critical_table",
    "run_gof",
    "SimConfig", "QuantileEstimate", "CellResult",
    "run_cell", "quantile_with_error", "emit_table",
    "CriticalValueEntry", "CriticalValueTable",
    "load_tables", "load_embedded_tables", "write_tables",
    "TruncllError", "InvalidParameterError", "DomainError", "ConvergenceError",
]
