"""Validation sweeps, convergence aggregation, and surrogate comparison.

Both the command line and the HTTP service call these functions, so
numbers shown on either surface come from the same computation.  All
CSV emitters format floats as %.16e, which round-trips 64-bit values
exactly; none of the persisted tables contain timings, so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import time

import numpy as np

from .assembly import AffineSystem
from .fom import fom_solve, v_norm
from .reduced import ErrorReport, ReducedModel, effectivity_report, rom_solve
from .snapshots import ParameterGrid

CONVERGENCE_HEADER = ("n,mean_en_err,max_en_err,mean_eta,max_eta,"
                      "mean_effectivity,mean_s_err")
COMPARE_HEADER = "method,mu0,mu1,rel_err,online_ms"


def sweep_reports(system: AffineSystem, model: ReducedModel,
                  grid: ParameterGrid) -> dict:
    """Full error reports for every grid point and every basis size.

    Returns {n: [ErrorReport per grid point]}; the full-order solve at
    each point is shared across all n.
    """
    points = grid.points
    solutions = [fom_solve(system, mu) for mu in points]
    reports = {}
    for n in range(1, model.dim + 1):
        reports[n] = [
            effectivity_report(system, model, mu, n=n, fom_solution=sol)
            for mu, sol in zip(points, solutions)
        ]
    return reports


def convergence_rows(system: AffineSystem, model: ReducedModel,
                     grid: ParameterGrid, reports: dict | None = None) -> list:
    """Per-n aggregates over the validation grid, as plain dicts."""
    if reports is None:
        reports = sweep_reports(system, model, grid)
    rows = []
    for n in sorted(reports):
        batch = reports[n]
        en = np.array([r.energy_norm_error for r in batch])
        eta = np.array([r.eta_en for r in batch])
        eff = np.array([r.effectivity for r in batch])
        s_err = np.array([abs(r.output_error) for r in batch])
        defined = ~np.isnan(eff)
        rows.append({
            "n": int(n),
            "mean_en_err": float(en.mean()),
            "max_en_err": float(en.max()),
            "mean_eta": float(eta.mean()),
            "max_eta": float(eta.max()),
            "mean_effectivity": float(eff[defined].mean())
            if defined.any() else float("nan"),
            "mean_s_err": float(s_err.mean()),
        })
    return rows


def convergence_csv(rows: list) -> str:
    lines = [CONVERGENCE_HEADER]
    for row in rows:
        lines.append(
            "%d,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e" % (
                row["n"], row["mean_en_err"], row["max_en_err"],
                row["mean_eta"], row["max_eta"], row["mean_effectivity"],
                row["mean_s_err"],
            )
        )
    return "\n".join(lines) + "\n"


def report_csv(reports: dict) -> str:
    """Every per-point report row, ordered by n then grid order."""
    lines = [ErrorReport.CSV_HEADER]
    for n in sorted(reports):
        lines.extend(report.csv_row() for report in reports[n])
    return "\n".join(lines) + "\n"


def compare_rows(system: AffineSystem, surrogates: dict,
                 grid: ParameterGrid) -> list:
    """Side-by-side relative V-errors of the field surrogates.

    `surrogates` maps method name to a fitted model with predict_info;
    rows appear method by method in grid order.
    """
    rows = []
    points = grid.points
    references = [fom_solve(system, mu) for mu in points]
    for method, surrogate in surrogates.items():
        for mu, reference in zip(points, references):
            info = surrogate.predict_info(mu)
            err = v_norm(system, info.field - reference.field)
            scale = v_norm(system, reference.field)
            rel = err / scale if scale > 0.0 else err
            rows.append({
                "method": method,
                "mu0": float(mu[0]),
                "mu1": float(mu[1]),
                "rel_err": float(rel),
                "online_ms": float(info.online_ms),
            })
    return rows


def compare_csv(rows: list) -> str:
    lines = [COMPARE_HEADER]
    for row in rows:
        lines.append(
            "%s,%.16e,%.16e,%.16e,%.16e" % (
                row["method"], row["mu0"], row["mu1"], row["rel_err"],
                row["online_ms"],
            )
        )
    return "\n".join(lines) + "\n"


def spectrum_csv(eigenvalues: np.ndarray,
                 cumulative_energy: np.ndarray) -> str:
    lines = ["index,lambda,cumulative_energy"]
    for i, (lam, cum) in enumerate(zip(eigenvalues, cumulative_energy)):
        lines.append("%d,%.16e,%.16e" % (i, lam, cum))
    return "\n".join(lines) + "\n"


def measure_speedup(system: AffineSystem, model: ReducedModel,
                    n_solves: int = 100) -> dict:
    """Mean full-order versus mean reduced solve time over a sweep."""
    grid = ParameterGrid.validation(10, 10)
    points = grid.points
    fom_times = []
    online_times = []
    for i in range(n_solves):
        mu = points[i % len(points)]
        start = time.perf_counter()
        fom_solve(system, mu)
        fom_times.append(time.perf_counter() - start)
        solution = rom_solve(model, mu)
        online_times.append(solution.wall_time)
    mean_fom = float(np.mean(fom_times))
    mean_online = float(np.mean(online_times))
    return {
        "mean_fom_s": mean_fom,
        "mean_online_s": mean_online,
        "speedup": mean_fom / mean_online if mean_online > 0.0 else float("inf"),
    }
