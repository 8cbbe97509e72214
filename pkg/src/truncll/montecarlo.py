"""Parallel Monte Carlo regeneration of critical-value tables.

Each replication draws a truncated log-logistic sample, fits it, and (for
regular outcomes only) records the KS and AD statistics; quantiles of the
collected statistics become the critical values. Per-replication seeds are a
SHA-256 hash of (master seed, cell identity, replication index), so results
are bit-identical for any worker count and any chunking of the work.
"""
from __future__ import annotations

import hashlib
import math
import multiprocessing
import sys
from dataclasses import dataclass, field

import numpy as np

from .distribution import TruncatedLogLogistic
from .estimation import ParetoBoundaryFit, RegularFit, Sample, fit
from .exceptions import ConvergenceError, InvalidParameterError
from .gof import ad_statistic, ks_statistic
from .tables import LEVELS, write_tables

__all__ = [
    "SimConfig",
    "QuantileEstimate",
    "CellResult",
    "run_cell",
    "quantile_with_error",
    "emit_table",
    "replication_seed",
]


@dataclass(frozen=True)
class SimConfig:
    """One table cell: sample size, replication count, truncation percentage.

    ``p`` is the probability mass removed by the truncation; the generator
    scale follows as lam = (1-p)/p with the truncation point normalized to 1.
    ``p = 0`` means the untruncated family. The generator shape is a free
    choice (the fitted statistics are pivotal in it); default 1.
    """

    n: int
    reps: int
    p: float
    beta_gen: float = 1.0
    levels: tuple[int, ...] = LEVELS
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.n < 2:
            raise InvalidParameterError(f"n must be >= 2, got {self.n}")
        if self.reps < 100:
            raise InvalidParameterError(f"reps must be >= 100, got {self.reps}")
        if not 0.0 <= self.p < 1.0:
            raise InvalidParameterError(f"p must lie in [0, 1), got {self.p}")
        if self.beta_gen <= 0:
            raise InvalidParameterError(f"beta_gen must be > 0, got {self.beta_gen}")
        if self.workers < 1:
            raise InvalidParameterError(f"workers must be >= 1, got {self.workers}")

    @property
    def lam(self) -> float:
        """Generator scale in the lambda parametrization (requires p > 0)."""
        if self.p == 0.0:
            raise InvalidParameterError("lam is undefined for p = 0 (untruncated)")
        return (1.0 - self.p) / self.p

    @property
    def cell_id(self) -> str:
        return f"{self.n}|{self.p!r}|{self.beta_gen!r}"


@dataclass(frozen=True)
class QuantileEstimate:
    quantile: float
    std_err: float
    level: int
    kept: int
    discarded: int


@dataclass(frozen=True)
class CellResult:
    n: int
    p: float
    reps: int
    ks: dict[int, QuantileEstimate]
    ad: dict[int, QuantileEstimate]
    kept: int
    discarded: int
    failed: int


def replication_seed(master_seed: int, cell_id: str, r: int) -> int:
    """Frozen seed derivation: first 8 bytes of
    SHA-256(b"<master_seed>:<cell_id>:<r>") as a big-endian unsigned int."""
    digest = hashlib.sha256(f"{master_seed}:{cell_id}:{r}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _generator(cfg: SimConfig) -> TruncatedLogLogistic:
    if cfg.p == 0.0:
        return TruncatedLogLogistic(alpha=1.0, beta=cfg.beta_gen, x_l=0.0)
    log_alpha = math.log(cfg.lam) / cfg.beta_gen
    return TruncatedLogLogistic(alpha=math.exp(log_alpha), beta=cfg.beta_gen, x_l=1.0)


def _run_range(cfg: SimConfig, r_lo: int, r_hi: int):
    gen = _generator(cfg)
    x_l = gen.x_l
    ks_vals, ad_vals = [], []
    discarded = failed = 0
    for r in range(r_lo, r_hi):
        seed = replication_seed(cfg.master_seed, cfg.cell_id, r)
        values = gen.sample(cfg.n, seed)
        sample = Sample(values, x_l)
        try:
            outcome = fit(sample)
        except ConvergenceError:
            failed += 1
            continue
        if not isinstance(outcome, RegularFit):
            discarded += 1
            continue
        fitted = TruncatedLogLogistic(outcome.alpha, outcome.beta, x_l)
        ks_vals.append(ks_statistic(sample, fitted))
        ad_vals.append(ad_statistic(sample, fitted))
    return ks_vals, ad_vals, discarded, failed


def _star(args):
    return _run_range(*args)


def quantile_with_error(values: np.ndarray, q: float, *, level: int | None = None,
                        discarded: int = 0) -> QuantileEstimate:
    """Order-statistic quantile with a standard error.

    The quantile is the ceil(q*C)-th order statistic (1-based). Its standard
    error is sqrt(q(1-q)/C) / f_hat, where the density f_hat comes from the
    central finite difference of the order statistics ceil(sqrt(C)) positions
    to either side.
    """
    values = np.asarray(values, dtype=float)
    c = values.size
    if c < 100:
        raise InvalidParameterError(f"need at least 100 values, got {c}")
    if not 0.0 < q < 1.0:
        raise InvalidParameterError(f"q must lie in (0, 1), got {q}")
    idx = math.ceil(q * c)                      # 1-based
    d = math.ceil(math.sqrt(c))
    i_lo = max(idx - d, 1)
    i_hi = min(idx + d, c)
    spread = values[i_hi - 1] - values[i_lo - 1]
    prob = (i_hi - i_lo) / c
    f_hat = prob / spread if spread > 0 else math.inf
    std_err = math.sqrt(q * (1.0 - q) / c) / f_hat if f_hat > 0 else math.inf
    return QuantileEstimate(quantile=float(values[idx - 1]), std_err=float(std_err),
                            level=level if level is not None else round(100 * q),
                            kept=c, discarded=discarded)


def run_cell(cfg: SimConfig, dump: str | None = None,
             progress: bool = False) -> CellResult:
    """Simulate one (p, N) cell and extract critical-value quantiles.

    ``dump`` writes the raw kept statistics (one value per line) to
    ``<dump>.ks.txt`` and ``<dump>.ad.txt``. The result is a pure function of
    the config; ``workers`` only changes the wall time.
    """
    chunk = max(1, math.ceil(cfg.reps / (4 * cfg.workers)))
    ranges = [(cfg, lo, min(lo + chunk, cfg.reps))
              for lo in range(0, cfg.reps, chunk)]
    if cfg.workers == 1:
        parts = [_run_range(*args) for args in ranges]
    else:
        with multiprocessing.Pool(processes=cfg.workers) as pool:
            parts = []
            for i, part in enumerate(pool.imap(_star, ranges)):
                parts.append(part)
                if progress:
                    print(f"cell {cfg.cell_id}: chunk {i + 1}/{len(ranges)} done",
                          file=sys.stderr)
    ks_vals = np.concatenate([np.asarray(p[0]) for p in parts]) if parts else np.array([])
    ad_vals = np.concatenate([np.asarray(p[1]) for p in parts]) if parts else np.array([])
    discarded = sum(p[2] for p in parts)
    failed = sum(p[3] for p in parts)
    kept = ks_vals.size
    if dump:
        for name, vals in (("ks", ks_vals), ("ad", ad_vals)):
            with open(f"{dump}.{name}.txt", "w", encoding="utf-8") as fh:
                fh.writelines(f"{v!r}\n" for v in vals)
    ks_vals.sort()
    ad_vals.sort()
    ks_q = {lv: quantile_with_error(ks_vals, lv / 100.0, level=lv, discarded=discarded)
            for lv in cfg.levels}
    ad_q = {lv: quantile_with_error(ad_vals, lv / 100.0, level=lv, discarded=discarded)
            for lv in cfg.levels}
    return CellResult(n=cfg.n, p=cfg.p, reps=cfg.reps, ks=ks_q, ad=ad_q,
                      kept=kept, discarded=discarded, failed=failed)


def emit_table(cells: list[CellResult], out, *, master_seed: int,
               meta: dict | None = None) -> None:
    """Write cell results as a critical-value asset (same format the package
    embeds), with provenance in the header. Warns if the (p, N) grid is not
    a complete cartesian product."""
    import warnings

    ps = sorted({c.p for c in cells})
    ns = sorted({c.n for c in cells})
    seen = {(c.p, c.n) for c in cells}
    if len(seen) != len(ps) * len(ns):
        warnings.warn("incomplete (p, N) grid in emitted table", stacklevel=2)
    header = {"master_seed": master_seed,
              "reps": ",".join(str(c.reps) for c in cells)}
    header.update(meta or {})
    rows = []
    for cell in sorted(cells, key=lambda c: (c.p, c.n)):
        for test, quantiles in (("KS", cell.ks), ("AD", cell.ad)):
            for level, est in sorted(quantiles.items()):
                rows.append((test, level, cell.p, cell.n, est.quantile, est.std_err))
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    write_tables(rows, out, header=header)
