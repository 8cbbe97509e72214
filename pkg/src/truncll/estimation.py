"""Maximum-likelihood fitting of the left-truncated log-logistic family.

The two-parameter problem is reduced to one dimension: for each shape value
the scale equation has at most one positive root (the loci function), and the
remaining shape equation is solved by bracketing on the profile. A simple
gate decides beforehand whether an interior maximum exists at all; when it
does not, the likelihood degenerates to a Pareto density on the boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .exceptions import ConvergenceError, DomainError, InvalidParameterError

__all__ = [
    "Sample",
    "NormalizedSample",
    "FitDiagnostics",
    "RegularFit",
    "ParetoBoundaryFit",
    "NoFiniteMaximumFit",
    "FitOutcome",
    "normalize",
    "beta_c",
    "lambda_profile",
    "objective",
    "profile_likelihood",
    "master_residual",
    "fit",
]

_RTOL = 8.9e-16          # brentq floor, far below the 1e-12 contract
_MAX_DOUBLINGS = 200


def _softplus(z):
    return np.logaddexp(0.0, z)


@dataclass(frozen=True, eq=False)
class Sample:
    """Validated observation vector: sorted ascending, all strictly above x_l."""

    values: np.ndarray
    x_l: float = 0.0

    def __post_init__(self):
        arr = np.sort(np.asarray(self.values, dtype=float))
        if arr.ndim != 1:
            raise InvalidParameterError("values must be one-dimensional")
        if arr.size < 2:
            raise InvalidParameterError(f"need at least 2 observations, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise InvalidParameterError("values must be finite")
        x_l = float(self.x_l)
        if not (math.isfinite(x_l) and x_l >= 0):
            raise InvalidParameterError(f"x_l must be a finite non-negative number, got {self.x_l!r}")
        if arr[0] <= x_l:
            raise InvalidParameterError(
                f"all values must exceed x_l = {x_l}; smallest is {arr[0]}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "x_l", x_l)

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class NormalizedSample:
    """Log observations after rescaling the truncation point to 1.

    For x_l > 0 the divisor is x_l, so every log is strictly positive. For
    x_l = 0 no such normalization exists; the sample is divided by its
    geometric mean for conditioning, ``beta_c`` is the 0 sentinel and
    ``beta0`` is +inf, which makes the existence gate pass unconditionally
    (the untruncated problem always has an interior maximum).
    """

    logs: np.ndarray          # log(X_i / scale), sorted ascending
    scale: float              # divisor: x_l, or the geometric mean when x_l = 0
    x_l: float
    S: float                  # sum of logs
    beta0: float
    beta_c: float
    all_equal: bool

    @property
    def n(self) -> int:
        return self.logs.size

    @property
    def truncated(self) -> bool:
        return self.x_l > 0.0


@dataclass(frozen=True)
class FitDiagnostics:
    beta0: float
    beta_c: float
    n: int
    x_l: float
    eta_hat: float
    sign_changes: int | None = None   # populated by fit(..., scan=True)


@dataclass(frozen=True)
class RegularFit:
    """Interior maximum: the full two-parameter estimate, in original units."""

    alpha: float
    beta: float
    lam: float                # alpha**beta
    loglik: float
    diagnostics: FitDiagnostics


@dataclass(frozen=True)
class ParetoBoundaryFit:
    """Degenerate boundary maximum: scale collapses to zero and the sample is
    described by a Pareto density with shape beta0 above x_l."""

    beta0: float
    loglik: float
    diagnostics: FitDiagnostics


@dataclass(frozen=True)
class NoFiniteMaximumFit:
    """All observations equal: the profile likelihood increases without bound,
    so no finite estimate exists."""

    x1: float
    diagnostics: FitDiagnostics


FitOutcome = RegularFit | ParetoBoundaryFit | NoFiniteMaximumFit


def normalize(sample: Sample) -> NormalizedSample:
    """Rescale so the truncation point becomes 1 and cache the log statistics."""
    if sample.x_l > 0:
        scale = sample.x_l
    else:
        scale = float(np.exp(np.mean(np.log(sample.values))))
    logs = np.log(sample.values) - math.log(scale)
    logs.flags.writeable = False
    S = float(logs.sum())
    all_equal = bool(logs[0] == logs[-1])
    if sample.x_l > 0:
        beta0 = sample.n / S
        bc = _solve_beta_c(logs)
    else:
        beta0 = math.inf
        bc = 0.0
    return NormalizedSample(logs=logs, scale=scale, x_l=sample.x_l, S=S,
                            beta0=beta0, beta_c=bc, all_equal=all_equal)


def _solve_beta_c(logs: np.ndarray) -> float:
    """Root of mean(exp(-beta*s)) = 1/2; unique since the mean is strictly
    decreasing from 1 to 0 for positive logs."""

    def q_half(b):
        return float(np.mean(np.exp(-b * logs))) - 0.5

    lo, hi = 1.0, 2.0
    while q_half(hi) > 0:
        lo = hi
        hi *= 2
        if hi > 1e12:
            raise ConvergenceError("beta_c bracket expansion failed upward")
    while q_half(lo) < 0:
        hi = lo
        lo /= 2
        if lo < 1e-12:
            raise ConvergenceError("beta_c bracket expansion failed downward")
    return float(brentq(q_half, lo, hi, xtol=1e-300, rtol=_RTOL))


def beta_c(ns: NormalizedSample) -> float:
    """Existence threshold for the shape: below it the scale equation has only
    the trivial zero root. Defined for truncated samples only."""
    if not ns.truncated:
        raise DomainError("beta_c is defined only for truncated samples (x_l > 0)")
    return _solve_beta_c(ns.logs)


def _log_lambda_root(logs: np.ndarray, beta: float, truncated: bool,
                     guess: float | None = None) -> float:
    """Root of the scale equation at fixed shape, in log(lambda).

    The residual g(u) crosses zero exactly once, from above; u_hi = max(beta*s)
    always gives g < 0, and a leftward walk finds g > 0.  A bracketed Newton
    iteration then converges quadratically.
    """
    bs = beta * logs
    n = logs.size

    if truncated:
        def g_and_slope(u):
            r = expit(bs - u)
            rl = expit(-u)
            g = 2.0 * r.mean() - 1.0 - rl
            slope = -2.0 * np.mean(r * (1.0 - r)) + rl * (1.0 - rl)
            return g, slope
    else:
        def g_and_slope(u):
            r = expit(bs - u)
            g = 2.0 * r.mean() - 1.0
            slope = -2.0 * np.mean(r * (1.0 - r))
            return g, slope

    u_hi = float(bs[-1])
    g_hi, _ = g_and_slope(u_hi)
    if g_hi > 0.0:          # ties at the maximum can leave a hair of slack
        u_hi = float(bs[-1]) + 1.0
        g_hi, _ = g_and_slope(u_hi)
    u_lo = float(bs[0]) - 1.0
    step = 1.0
    g_lo, _ = g_and_slope(u_lo)
    while g_lo <= 0.0:
        u_hi = min(u_hi, u_lo)
        u_lo -= step
        step *= 2.0
        if u_lo < -750.0:
            raise ConvergenceError(
                f"no positive bracket for the scale equation at beta={beta}")
        g_lo, _ = g_and_slope(u_lo)

    u = guess if (guess is not None and u_lo < guess < u_hi) else 0.5 * (u_lo + u_hi)
    for _ in range(120):
        g, slope = g_and_slope(u)
        if g > 0.0:
            u_lo = u
        elif g < 0.0:
            u_hi = u
        else:
            return u
        u_new = u - g / slope if slope < 0.0 else math.inf
        if not (u_lo < u_new < u_hi):
            u_new = 0.5 * (u_lo + u_hi)
        if abs(u_new - u) <= 1e-13 * max(1.0, abs(u_new)):
            return u_new
        u = u_new
    return u


def lambda_profile(ns: NormalizedSample, beta: float) -> float:
    """Loci function: the unique non-negative root of the scale equation at
    fixed shape. Zero at and below the existence threshold."""
    if beta <= 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    if ns.truncated and beta <= ns.beta_c:
        return 0.0
    return math.exp(_log_lambda_root(ns.logs, beta, ns.truncated))


def _objective_log(ns: NormalizedSample, u: float, beta: float) -> float:
    """Objective at (lambda, beta) with u = log(lambda)."""
    n = ns.n
    val = n * float(_softplus(-u)) if ns.truncated else 0.0
    val += n * math.log(beta) - n * u + beta * ns.S
    val -= 2.0 * float(np.sum(_softplus(beta * ns.logs - u)))
    return val


def objective(ns: NormalizedSample, lam: float, beta: float) -> float:
    """Log-likelihood of the normalized sample shifted by the constant S;
    same extrema, better conditioning."""
    if lam <= 0:
        raise DomainError(f"lam must be > 0, got {lam}")
    if beta <= 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    return _objective_log(ns, math.log(lam), beta)


def profile_likelihood(ns: NormalizedSample, beta: float) -> float:
    """Objective along the loci function, reducing the fit to one dimension.

    Below the existence threshold the scale root is zero and the value is the
    boundary limit n*log(beta) - beta*S; the two branches join continuously.
    """
    if beta <= 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    if ns.truncated and beta <= ns.beta_c:
        return ns.n * math.log(beta) - beta * ns.S
    u = _log_lambda_root(ns.logs, beta, ns.truncated)
    return _objective_log(ns, u, beta)


def _master_residual_at(ns: NormalizedSample, beta: float, u: float) -> float:
    return ns.n / beta + ns.S - 2.0 * float(np.sum(ns.logs * expit(beta * ns.logs - u)))


def master_residual(ns: NormalizedSample, beta: float) -> float:
    """Shape-equation residual along the loci function; its root is the
    estimate. Equals the derivative of the profile likelihood."""
    if ns.truncated and beta <= ns.beta_c:
        raise DomainError(f"beta must exceed beta_c = {ns.beta_c}, got {beta}")
    if beta <= 0:
        raise DomainError(f"beta must be > 0, got {beta}")
    u = _log_lambda_root(ns.logs, beta, ns.truncated)
    return _master_residual_at(ns, beta, u)


class _Profile:
    """Master residual with a warm-started inner scale solve."""

    def __init__(self, ns: NormalizedSample):
        self.ns = ns
        self.u = None

    def __call__(self, beta: float) -> float:
        self.u = _log_lambda_root(self.ns.logs, beta, self.ns.truncated, guess=self.u)
        return _master_residual_at(self.ns, beta, self.u)


def _bracket_shape_root(ns: NormalizedSample) -> tuple[float, float, _Profile]:
    """Bracket the master-equation root: positive residual just above the
    threshold, doubling upward until the residual turns negative."""
    m = _Profile(ns)
    if ns.truncated:
        lo = ns.beta_c * (1.0 + 1e-6)
        f_lo = m(lo)
        shrink = 1e-9
        while f_lo <= 0.0 and shrink >= 1e-15:
            lo = ns.beta_c * (1.0 + shrink)
            f_lo = m(lo)
            shrink *= 1e-3
        if f_lo <= 0.0:
            raise ConvergenceError(
                "master residual not positive above beta_c; root hugs the boundary")
    else:
        # moment seed: a logistic law in log space has sd = pi/(sqrt(3)*beta)
        sd = float(np.std(ns.logs))
        lo = math.pi / (math.sqrt(3.0) * sd)
        f_lo = m(lo)
        halvings = 0
        while f_lo <= 0.0:
            lo /= 2.0
            f_lo = m(lo)
            halvings += 1
            if halvings > _MAX_DOUBLINGS:
                raise ConvergenceError(
                    f"no positive master residual after {_MAX_DOUBLINGS} halvings")
    hi = 2.0 * lo
    doublings = 0
    while m(hi) > 0.0:
        lo = hi
        hi *= 2.0
        doublings += 1
        if doublings > _MAX_DOUBLINGS:
            raise ConvergenceError(
                f"master residual kept its sign after {_MAX_DOUBLINGS} doublings; "
                f"bracket [{lo}, {hi}] at n={ns.n}")
    return lo, hi, m


def _count_sign_changes(m: _Profile, lo: float, hi: float, points: int = 512) -> int:
    grid = np.linspace(lo, hi, points)
    vals = np.array([m(b) for b in grid])
    signs = np.sign(vals)
    signs = signs[signs != 0]
    return int(np.sum(signs[1:] != signs[:-1]))


def _pareto_loglik(n: int, beta0: float, x_l: float) -> float:
    # sum of log Pareto density, using sum(log(X_i/x_l)) = n/beta0
    return n * (math.log(beta0) - math.log(x_l) - 1.0 - 1.0 / beta0)


def fit(sample: Sample, *, scan: bool = False) -> FitOutcome:
    """Full pipeline: normalize, gate on existence, classify, solve.

    scan=True additionally sweeps the master residual over a 512-point grid
    across the final bracket and records the number of sign changes; more
    than one flags a potentially non-unique critical point.
    """
    ns = normalize(sample)
    diag = FitDiagnostics(beta0=ns.beta0, beta_c=ns.beta_c, n=ns.n,
                          x_l=ns.x_l, eta_hat=math.nan)
    if ns.all_equal:
        return NoFiniteMaximumFit(x1=float(sample.values[0]), diagnostics=diag)
    if ns.truncated and ns.beta0 <= ns.beta_c:
        diag = replace(diag, eta_hat=math.inf)
        return ParetoBoundaryFit(beta0=ns.beta0,
                                 loglik=_pareto_loglik(ns.n, ns.beta0, ns.x_l),
                                 diagnostics=diag)

    lo, hi, m = _bracket_shape_root(ns)
    if scan:
        diag = replace(diag, sign_changes=_count_sign_changes(m, lo, hi))
    beta_hat = float(brentq(m, lo, hi, xtol=1e-300, rtol=_RTOL))
    u_hat = _log_lambda_root(ns.logs, beta_hat, ns.truncated)
    residual = _master_residual_at(ns, beta_hat, u_hat)
    if abs(residual) > 1e-8 * ns.n:
        raise ConvergenceError(
            f"master residual {residual} at beta={beta_hat} exceeds tolerance")

    log_scale = math.log(ns.scale)
    log_alpha = log_scale + u_hat / beta_hat
    alpha_hat = math.exp(log_alpha)
    lam_hat = math.exp(u_hat + beta_hat * log_scale)
    loglik = (_objective_log(ns, u_hat, beta_hat) - ns.S) - ns.n * log_scale
    eta_hat = math.exp(-u_hat) if ns.truncated else 0.0
    diag = replace(diag, eta_hat=eta_hat)
    return RegularFit(alpha=alpha_hat, beta=beta_hat, lam=lam_hat,
                      loglik=loglik, diagnostics=diag)
