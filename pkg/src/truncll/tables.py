"""Critical-value tables: embedded data asset, loader, writer, interpolation.

The asset is plain text, one record per line::

    test level p n quantile std_err

with ``#`` comment/header lines. The same format is produced by the Monte
Carlo table generator, so regenerated tables can be dropped in as overrides.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, TextIO

import numpy as np

from .exceptions import InvalidParameterError

__all__ = [
    "CriticalValueEntry",
    "CriticalValueTable",
    "load_tables",
    "load_embedded_tables",
    "write_tables",
    "sqrt_eta_from_p",
]

TESTS = ("KS", "AD")
LEVELS = (85, 90, 95, 99)

_EMBEDDED_RESOURCE = "critical_values.txt"


def sqrt_eta_from_p(p: float) -> float:
    """Map truncation percentage p = eta/(1+eta) to sqrt(eta)."""
    if not 0.0 <= p < 1.0:
        raise InvalidParameterError(f"p must lie in [0, 1), got {p}")
    return math.sqrt(p / (1.0 - p))


@dataclass(frozen=True)
class CriticalValueEntry:
    quantile: float
    std_err: float


@dataclass(frozen=True, eq=False)
class CriticalValueTable:
    """Monte Carlo quantile grid for one test statistic at one confidence
    level, indexed by (truncation percentage, sample size)."""

    test: str
    level: int
    grid: dict[tuple[float, int], CriticalValueEntry]

    def p_values(self) -> list[float]:
        return sorted({p for p, _ in self.grid})

    def n_values(self) -> list[int]:
        return sorted({n for _, n in self.grid})

    def lookup(self, p: float, n: int) -> float | None:
        """Tabulated quantile at (p, n): exact on grid points, bilinear in
        (sqrt(eta), log n) inside the grid hull, None outside."""
        key = (float(p), int(n))
        if key in self.grid:
            return self.grid[key].quantile
        ps = self.p_values()
        ns = self.n_values()
        x = sqrt_eta_from_p(p)
        y = math.log(n)
        xs = [sqrt_eta_from_p(q) for q in ps]
        ys = [math.log(m) for m in ns]
        if not (xs[0] <= x <= xs[-1] and ys[0] <= y <= ys[-1]):
            return None
        i = int(np.searchsorted(xs, x, side="right")) - 1
        j = int(np.searchsorted(ys, y, side="right")) - 1
        i = min(max(i, 0), len(xs) - 2) if len(xs) > 1 else 0
        j = min(max(j, 0), len(ys) - 2) if len(ys) > 1 else 0
        x0, x1 = xs[i], xs[i + 1]
        y0, y1 = ys[j], ys[j + 1]
        tx = 0.0 if x1 == x0 else (x - x0) / (x1 - x0)
        ty = 0.0 if y1 == y0 else (y - y0) / (y1 - y0)
        q00 = self.grid[(ps[i], ns[j])].quantile
        q10 = self.grid[(ps[i + 1], ns[j])].quantile
        q01 = self.grid[(ps[i], ns[j + 1])].quantile
        q11 = self.grid[(ps[i + 1], ns[j + 1])].quantile
        return ((1 - tx) * (1 - ty) * q00 + tx * (1 - ty) * q10
                + (1 - tx) * ty * q01 + tx * ty * q11)


def _parse_stream(lines: Iterable[str]) -> dict[tuple[str, int], CriticalValueTable]:
    grids: dict[tuple[str, int], dict] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise InvalidParameterError(
                f"table line {lineno}: expected 6 fields, got {len(parts)}: {line!r}")
        test, level_s, p_s, n_s, q_s, se_s = parts
        if test not in TESTS:
            raise InvalidParameterError(f"table line {lineno}: unknown test {test!r}")
        key = (test, int(level_s))
        grids.setdefault(key, {})[(float(p_s), int(n_s))] = CriticalValueEntry(
            quantile=float(q_s), std_err=float(se_s))
    return {(t, lv): CriticalValueTable(test=t, level=lv, grid=grid)
            for (t, lv), grid in grids.items()}


def load_tables(path) -> dict[tuple[str, int], CriticalValueTable]:
    """Load a critical-value asset from a file path."""
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_stream(fh)


def load_embedded_tables() -> dict[tuple[str, int], CriticalValueTable]:
    """Load the asset shipped inside the package."""
    text = resources.files("truncll").joinpath("data", _EMBEDDED_RESOURCE).read_text()
    return _parse_stream(text.splitlines())


def write_tables(rows: Iterable[tuple[str, int, float, int, float, float]],
                 out: TextIO, header: dict | None = None) -> None:
    """Write records (test, level, p, n, quantile, std_err) in the asset
    format, with optional provenance key/value header lines."""
    out.write("# truncll critical-value table v1\n")
    for key, value in (header or {}).items():
        out.write(f"# {key}: {value}\n")
    out.write("# columns: test level p n quantile std_err\n")
    for test, level, p, n, quantile, std_err in rows:
        out.write(f"{test} {level} {p!r} {n} {quantile!r} {std_err!r}\n")
