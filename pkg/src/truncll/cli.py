"""Command-line interface: fit data files, run goodness-of-fit tests, draw
samples, and regenerate critical-value tables."""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .distribution import TruncatedLogLogistic
from .estimation import (NoFiniteMaximumFit, ParetoBoundaryFit, RegularFit,
                         Sample, fit)
from .exceptions import TruncllError
from .gof import run_gof
from .montecarlo import SimConfig, emit_table, run_cell
from .tables import LEVELS, load_tables

__all__ = ["main", "ingest"]

PASS, FAIL = "✓", "✗"


def ingest(path: str, x_l: float) -> tuple[Sample, int]:
    """Read one numeric value per line (single-column CSV with an optional
    header also works), drop values <= x_l, and return the sample together
    with the dropped count."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            token = raw.strip().rstrip(",").strip()
            if not token:
                continue
            try:
                values.append(float(token))
            except ValueError:
                if lineno == 1:      # header line
                    continue
                raise TruncllError(f"{path}:{lineno}: cannot parse {token!r} as a number")
    kept = [v for v in values if v > x_l]
    dropped = len(values) - len(kept)
    if not kept:
        raise TruncllError(f"{path}: no observations above x_l = {x_l}")
    if len(kept) < 2:
        raise TruncllError(f"{path}: need at least 2 observations above x_l = {x_l}, "
                           f"got {len(kept)}")
    return Sample(np.asarray(kept), x_l), dropped


def _parse_levels(text: str) -> tuple[int, ...]:
    try:
        levels = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise TruncllError(f"cannot parse levels {text!r}")
    bad = [lv for lv in levels if lv not in LEVELS]
    if bad:
        raise TruncllError(f"unsupported levels {bad}; choose from {list(LEVELS)}")
    return levels


def _parse_float_list(text: str, name: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise TruncllError(f"cannot parse {name} {text!r}")


def _outcome_json(sample: Sample, outcome, dropped: int) -> dict:
    d = outcome.diagnostics
    doc = {
        "x_l": sample.x_l,
        "n": sample.n,
        "dropped": dropped,
        "diagnostics": {"beta0": d.beta0, "beta_c": d.beta_c, "n": d.n,
                        "x_l": d.x_l, "eta_hat": d.eta_hat},
    }
    if isinstance(outcome, RegularFit):
        doc["outcome"] = {"kind": "regular", "alpha": outcome.alpha,
                          "beta": outcome.beta, "lam": outcome.lam,
                          "loglik": outcome.loglik}
    elif isinstance(outcome, ParetoBoundaryFit):
        doc["outcome"] = {"kind": "pareto_boundary", "beta0": outcome.beta0,
                          "loglik": outcome.loglik}
    else:
        doc["outcome"] = {"kind": "no_finite_maximum", "x1": outcome.x1}
    return doc


def _degenerate_text(outcome) -> str:
    if isinstance(outcome, ParetoBoundaryFit):
        d = outcome.diagnostics
        return (f"boundary maximum (Pareto limit): the scale estimate collapses to 0 "
                f"because beta0 = {outcome.beta0:.6g} <= beta_c = {d.beta_c:.6g}; "
                f"the data above x_l = {d.x_l:.6g} follow a Pareto density with "
                f"shape beta0. loglik = {outcome.loglik:.4f}")
    return (f"no finite maximum: all {outcome.diagnostics.n} observations equal "
            f"{outcome.x1:.6g}, so the profile likelihood increases without bound "
            f"and no finite estimate exists")


def _write(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_fit(args) -> int:
    sample, dropped = ingest(args.input, args.xl)
    levels = _parse_levels(args.levels)
    outcome = fit(sample)
    print(f"dropped {dropped} value(s) <= x_l = {args.xl}; n = {sample.n}",
          file=sys.stderr)
    doc = _outcome_json(sample, outcome, dropped)
    report = None
    if isinstance(outcome, RegularFit):
        tables = load_tables(args.tables) if args.tables else None
        report = run_gof(sample, outcome, levels=levels, tables=tables)
        doc["gof"] = _gof_json(report, levels)

    if args.format == "json":
        _write(json.dumps(doc, indent=2) + "\n", args.out)
        return 0
    if not isinstance(outcome, RegularFit):
        _write(f"x_l={sample.x_l:g} n={sample.n}: {_degenerate_text(outcome)}\n",
               args.out)
        return 0
    s = report.statistics
    marks = {(t, lv): (PASS if report.decisions[(t, lv)].pass_interpolated else FAIL)
             for t in ("KS", "AD") for lv in levels}
    if args.format == "csv":
        cols = ["x_l", "n", "alpha", "beta", "loglik", "ks_scaled", "ad"]
        vals = [repr(sample.x_l), str(sample.n), repr(outcome.alpha),
                repr(outcome.beta), repr(outcome.loglik), repr(s.ks_scaled), repr(s.ad)]
        for t in ("KS", "AD"):
            for lv in levels:
                cols.append(f"pass_{t.lower()}_{lv}")
                vals.append(str(report.decisions[(t, lv)].pass_interpolated).lower())
        _write(",".join(cols) + "\n" + ",".join(vals) + "\n", args.out)
        return 0
    head = f"{'x_L':>8} {'N':>6} {'alpha':>10} {'beta':>8} {'lnL':>10} {'KS(sqrt(N)D)':>13} {'AD(A^2)':>9}"
    row = (f"{sample.x_l:>8g} {sample.n:>6d} {outcome.alpha:>10.6g} "
           f"{outcome.beta:>8.5g} {outcome.loglik:>10.2f} {s.ks_scaled:>13.4f} "
           f"{s.ad:>9.4f}")
    for t in ("KS", "AD"):
        for lv in levels:
            head += " " + f"{t}{lv}".rjust(4)
            row += " " + marks[(t, lv)].rjust(4)
    _write(head + "\n" + row + "\n", args.out)
    return 0


def _gof_json(report, levels) -> dict:
    out = {"ks_scaled": report.statistics.ks_scaled, "ad": report.statistics.ad,
           "eta_hat": report.eta_hat, "levels": {}}
    for lv in levels:
        out["levels"][str(lv)] = {
            t: {"critical_interpolated": report.decisions[(t, lv)].critical_interpolated,
                "critical_table": report.decisions[(t, lv)].critical_table,
                "pass_interpolated": report.decisions[(t, lv)].pass_interpolated,
                "pass_table": report.decisions[(t, lv)].pass_table}
            for t in ("KS", "AD")}
    return out


def _cmd_gof(args) -> int:
    sample, dropped = ingest(args.input, args.xl)
    levels = _parse_levels(args.levels)
    outcome = fit(sample)
    print(f"dropped {dropped} value(s) <= x_l = {args.xl}; n = {sample.n}",
          file=sys.stderr)
    if not isinstance(outcome, RegularFit):
        text = (f"x_l={sample.x_l:g} n={sample.n}: {_degenerate_text(outcome)}\n"
                "goodness-of-fit tests are not applicable to a degenerate outcome\n")
        if args.format == "json":
            doc = _outcome_json(sample, outcome, dropped)
            doc["gof"] = None
            _write(json.dumps(doc, indent=2) + "\n", args.out)
        else:
            _write(text, args.out)
        return 0
    tables = load_tables(args.tables) if args.tables else None
    report = run_gof(sample, outcome, levels=levels, tables=tables)
    if args.format == "json":
        doc = _outcome_json(sample, outcome, dropped)
        doc["gof"] = _gof_json(report, levels)
        _write(json.dumps(doc, indent=2) + "\n", args.out)
        return 0
    s = report.statistics
    lines = [f"fit: alpha={outcome.alpha:.6g} beta={outcome.beta:.6g} "
             f"loglik={outcome.loglik:.2f} (n={sample.n}, x_l={sample.x_l:g})",
             f"statistics: KS(sqrt(N)D)={s.ks_scaled:.4f} AD(A^2)={s.ad:.4f} "
             f"eta_hat={report.eta_hat:.6g}",
             f"{'test':>4} {'level':>5} {'crit(interp)':>12} {'crit(table)':>11} "
             f"{'interp':>6} {'table':>5}"]
    if args.format == "csv":
        lines = ["test,level,statistic,critical_interpolated,critical_table,"
                 "pass_interpolated,pass_table"]
        for t, stat in (("KS", s.ks_scaled), ("AD", s.ad)):
            for lv in levels:
                d = report.decisions[(t, lv)]
                ct = "" if d.critical_table is None else repr(d.critical_table)
                pt = "" if d.pass_table is None else str(d.pass_table).lower()
                lines.append(f"{t},{lv},{stat!r},{d.critical_interpolated!r},{ct},"
                             f"{str(d.pass_interpolated).lower()},{pt}")
        _write("\n".join(lines) + "\n", args.out)
        return 0
    for t, stat in (("KS", s.ks_scaled), ("AD", s.ad)):
        for lv in levels:
            d = report.decisions[(t, lv)]
            ct = "   --  " if d.critical_table is None else f"{d.critical_table:7.4f}"
            pt = " --" if d.pass_table is None else (PASS if d.pass_table else FAIL)
            pi = PASS if d.pass_interpolated else FAIL
            lines.append(f"{t:>4} {lv:>4}% {d.critical_interpolated:>12.4f} "
                         f"{ct:>11} {pi:>6} {pt:>5}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_sample(args) -> int:
    d = TruncatedLogLogistic(args.alpha, args.beta, args.xl)
    values = d.sample(args.n, args.seed)
    text = "".join(f"{v!r}\n" for v in values)
    _write(text, args.out)
    return 0


def _cmd_mc_critical(args) -> int:
    levels = _parse_levels(args.levels)
    p_grid = _parse_float_list(args.p_grid, "p-grid")
    n_grid = [int(v) for v in _parse_float_list(args.n, "n")]
    cells = []
    for p in p_grid:
        for n in n_grid:
            cfg = SimConfig(n=n, reps=args.reps, p=p, beta_gen=args.beta_gen,
                            levels=levels, master_seed=args.seed,
                            workers=args.workers)
            dump = f"{args.dump}_p{p:g}_n{n}" if args.dump else None
            cell = run_cell(cfg, dump=dump, progress=True)
            cells.append(cell)
            for test, quantiles in (("KS", cell.ks), ("AD", cell.ad)):
                for lv in levels:
                    est = quantiles[lv]
                    print(f"p={p:g} N={n} {test}{lv}: {est.quantile:.4f} "
                          f"+/- {est.std_err:.4f}  kept={cell.kept} "
                          f"discarded={cell.discarded} failed={cell.failed}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            emit_table(cells, fh, master_seed=args.seed,
                       meta={"version": __version__, "beta_gen": args.beta_gen})
        print(f"wrote table asset to {args.out}", file=sys.stderr)
    else:
        emit_table(cells, sys.stdout, master_seed=args.seed,
                   meta={"version": __version__, "beta_gen": args.beta_gen})
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truncll",
        description="Fit left-truncated log-logistic distributions and test them")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a data file and report the estimate")
    p_gof = sub.add_parser("gof", help="fit and run the KS/AD hypothesis tests")
    for p in (p_fit, p_gof):
        p.add_argument("--input", required=True, help="data file, one value per line")
        p.add_argument("--xl", type=float, default=0.0, help="left truncation point")
        p.add_argument("--levels", default="95", help="confidence levels, e.g. 85,95")
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")
        p.add_argument("--tables", default=None,
                       help="critical-value asset overriding the embedded tables")
        p.add_argument("--out", default=None, help="write output here instead of stdout")
    p_fit.set_defaults(func=_cmd_fit)
    p_gof.set_defaults(func=_cmd_gof)

    p_sample = sub.add_parser("sample", help="draw seeded random variates")
    p_sample.add_argument("--alpha", type=float, required=True)
    p_sample.add_argument("--beta", type=float, required=True)
    p_sample.add_argument("--xl", type=float, default=0.0)
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--seed", type=int, required=True)
    p_sample.add_argument("--out", default=None)
    p_sample.set_defaults(func=_cmd_sample)

    p_mc = sub.add_parser("mc-critical",
                          help="regenerate critical-value tables by simulation")
    p_mc.add_argument("--n", required=True, help="sample sizes, e.g. 30,100")
    p_mc.add_argument("--p-grid", required=True, dest="p_grid",
                      help="truncation percentages, e.g. 0,0.5,0.9")
    p_mc.add_argument("--reps", type=int, required=True, help="replications per cell")
    p_mc.add_argument("--beta-gen", type=float, default=1.0, dest="beta_gen",
                      help="generator shape (statistics are pivotal in it)")
    p_mc.add_argument("--levels", default="85,90,95,99")
    p_mc.add_argument("--seed", type=int, default=0, help="master seed")
    p_mc.add_argument("--workers", type=int, default=1)
    p_mc.add_argument("--out", default=None, help="write the table asset here")
    p_mc.add_argument("--dump", default=None,
                      help="prefix for raw statistic dumps, one value per line")
    p_mc.set_defaults(func=_cmd_mc_critical)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TruncllError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
