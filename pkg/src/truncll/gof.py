"""Kolmogorov-Smirnov and Anderson-Darling tests against a fitted
left-truncated log-logistic, with critical values from the embedded Monte
Carlo tables and from a closed-form interpolation in (eta, N)."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .distribution import TruncatedLogLogistic
from .estimation import FitOutcome, RegularFit, Sample
from .exceptions import DomainError, InvalidParameterError
from .tables import LEVELS, TESTS, CriticalValueTable, load_embedded_tables

__all__ = [
    "GofStatistics",
    "LevelDecision",
    "GofReport",
    "CdfClampWarning",
    "ks_statistic",
    "ad_statistic",
    "critical_interpolated",
    "critical_table",
    "run_gof",
    "THETA",
]


class CdfClampWarning(UserWarning):
    """Fitted cdf hit 0 or 1 at an observation; values were clamped."""


# Interpolation coefficients (theta_1..theta_9) per test and confidence level.
THETA: dict[tuple[str, int], tuple[float, ...]] = {
    ("AD", 85): (0.5644, -0.0026, 0.1307, 0.0406, 0.2612, -0.0432, 0.0001, 0.0350, -0.1715),
    ("AD", 90): (0.6390, -0.0005, 0.1540, 0.0361, 0.2750, -0.0497, 0.0000, 0.0398, -0.2066),
    ("AD", 95): (0.7669, -0.0189, 0.1927, 0.0094, 0.2914, -0.0641, 0.0001, 0.0494, -0.2364),
    ("AD", 99): (1.0714, -0.0589, 0.2933, 0.0301, 0.3272, -0.0943, 0.0002, 0.0598, -0.1787),
    ("KS", 85): (0.7421, -0.0492, 0.1565, -0.0517, 0.2210, -0.0238, 0.0000, 0.1492, -0.2115),
    ("KS", 90): (0.7821, -0.0818, 0.1742, -0.0917, 0.2336, -0.0298, 0.0001, 0.1500, -0.2723),
    ("KS", 95): (0.8443, -0.1204, 0.1987, -0.1318, 0.2470, -0.0298, 0.0001, 0.1417, -0.3753),
    ("KS", 99): (0.9711, -0.1729, 0.2672, -0.1687, 0.2895, -0.0392, 0.0001, 0.1416, -0.5325),
}


@dataclass(frozen=True)
class GofStatistics:
    ks_scaled: float       # sqrt(N) * D
    ad: float              # A^2
    n: int


@dataclass(frozen=True)
class LevelDecision:
    critical_interpolated: float
    critical_table: float | None
    pass_interpolated: bool
    pass_table: bool | None


@dataclass(frozen=True, eq=False)
class GofReport:
    statistics: GofStatistics
    eta_hat: float
    decisions: dict[tuple[str, int], LevelDecision]   # keyed by (test, level)


def _fitted_cdf_values(sample: Sample, fitted: TruncatedLogLogistic) -> np.ndarray:
    if fitted.x_l != sample.x_l:
        raise DomainError(
            f"truncation mismatch: fitted x_l={fitted.x_l}, sample x_l={sample.x_l}")
    return np.asarray(fitted.cdf(sample.values), dtype=float)


def ks_statistic(sample: Sample, fitted: TruncatedLogLogistic) -> float:
    """Scaled two-sided Kolmogorov-Smirnov distance sqrt(N)*D between the
    empirical step function and the fitted cdf."""
    f = _fitted_cdf_values(sample, fitted)
    n = sample.n
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - f)), float(np.max(f - (i - 1) / n)))
    return math.sqrt(n) * d


def ad_statistic(sample: Sample, fitted: TruncatedLogLogistic) -> float:
    """Anderson-Darling statistic A^2 of the sample under the fitted cdf.

    Fitted cdf values equal to 0 or 1 in floating precision are clamped to
    [1e-300, 1 - 1e-16] and a CdfClampWarning is emitted.
    """
    f = _fitted_cdf_values(sample, fitted)
    if np.any(f <= 0.0) or np.any(f >= 1.0 - 1e-16):
        warnings.warn("fitted cdf reached 0 or 1 at an observation; clamping",
                      CdfClampWarning, stacklevel=2)
        f = np.clip(f, 1e-300, 1.0 - 1e-16)
    n = sample.n
    i = np.arange(1, n + 1)
    return float(-n - np.mean((2 * i - 1) * (np.log(f) + np.log1p(-f[::-1]))))


def _check_test_level(test: str, level: int) -> None:
    if test not in TESTS:
        raise InvalidParameterError(f"unknown test {test!r}; expected one of {TESTS}")
    if level not in LEVELS:
        raise InvalidParameterError(f"unknown level {level!r}; expected one of {LEVELS}")


def critical_interpolated(test: str, level: int, eta_hat: float, n: int) -> float:
    """Closed-form critical value at the estimated truncation mass eta and
    sample size n."""
    _check_test_level(test, level)
    if eta_hat < 0:
        raise DomainError(f"eta_hat must be >= 0, got {eta_hat}")
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    t1, t2, t3, t4, t5, t6, t7, t8, t9 = THETA[(test, level)]
    r = math.sqrt(eta_hat)
    return ((t1 * eta_hat + t2 * r + t3) / (t4 * r + t5 + eta_hat)
            + t6 * math.sqrt(eta_hat / n) + t7 * eta_hat ** 1.5
            + t8 / math.sqrt(n) + t9 / n)


def critical_table(test: str, level: int, p: float, n: int,
                   tables: dict[tuple[str, int], CriticalValueTable] | None = None,
                   ) -> float | None:
    """Monte Carlo table critical value: exact on the (p, N) grid, bilinear
    in (sqrt(eta), log N) inside the hull, None outside."""
    _check_test_level(test, level)
    tbl = (tables if tables is not None else load_embedded_tables()).get((test, level))
    if tbl is None:
        return None
    return tbl.lookup(p, n)


def run_gof(sample: Sample, outcome: FitOutcome,
            levels: tuple[int, ...] = LEVELS,
            tables: dict[tuple[str, int], CriticalValueTable] | None = None,
            ) -> GofReport:
    """Both statistics plus pass/fail decisions (statistic strictly below the
    critical value) for every requested level, from both critical-value
    sources. Defined for regular fits only."""
    if not isinstance(outcome, RegularFit):
        raise DomainError(
            "goodness-of-fit tests are defined for the fitted log-logistic only; "
            f"got a {type(outcome).__name__} outcome")
    for level in levels:
        _check_test_level("KS", level)
    fitted = TruncatedLogLogistic(outcome.alpha, outcome.beta, sample.x_l)
    stats = GofStatistics(ks_scaled=ks_statistic(sample, fitted),
                          ad=ad_statistic(sample, fitted),
                          n=sample.n)
    eta_hat = outcome.diagnostics.eta_hat
    p_hat = eta_hat / (1.0 + eta_hat)
    if tables is None:
        tables = load_embedded_tables()
    decisions = {}
    for test, stat in (("KS", stats.ks_scaled), ("AD", stats.ad)):
        for level in levels:
            ci = critical_interpolated(test, level, eta_hat, sample.n)
            ct = critical_table(test, level, p_hat, sample.n, tables=tables)
            decisions[(test, level)] = LevelDecision(
                critical_interpolated=ci,
                critical_table=ct,
                pass_interpolated=stat < ci,
                pass_table=(stat < ct) if ct is not None else None)
    return GofReport(statistics=stats, eta_hat=eta_hat, decisions=decisions)
