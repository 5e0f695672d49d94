"""Command-line driver for the offline pipeline, online solves,
validation sweeps, surrogate comparison, and the HTTP service.

Exit codes: 0 success, 2 argument errors, 3 numeric failures, 4 I/O
failures.  Warnings go to standard error; data goes to files; persisted
CSVs never contain timings, so identical flags give identical bytes.
The environment variable ROM_MODEL_DIR supplies a default model
directory for every subcommand that needs one.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from .analysis import (
    compare_csv,
    compare_rows,
    convergence_csv,
    convergence_rows,
    measure_speedup,
    report_csv,
    spectrum_csv,
    sweep_reports,
)
from .assembly import assemble_affine_system
from .basis import Pod
from .errors import InvalidArgument, NumericError, StoreError
from .fom import fom_solve, v_norm
from .greedy import greedy
from .mesh import build_thermal_block_mesh
from .reduced import (
    ErrorReport,
    effectivity_report,
    project,
    reconstruct,
    rom_solve,
)
from .snapshots import ParameterGrid, generate_snapshots, parse_grid_spec
from .store import fit_surrogates, load_package, save_package

METHODS = ("rb", "pod-rbf", "local-pod-rbf", "pod-nn")


def _default_model_dir() -> str | None:
    return os.environ.get("ROM_MODEL_DIR")


def _model_dir(args) -> Path:
    chosen = args.model or _default_model_dir()
    if not chosen:
        raise InvalidArgument(
            "no model directory: pass --model or set ROM_MODEL_DIR"
        )
    return Path(chosen)


def _parse_mu(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidArgument(
            f"--mu expects 'mu0,mu1' (e.g. 8,-1), got {text!r}"
        )
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise InvalidArgument(f"--mu values must be numbers: {text!r}") from exc


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / name
    target.write_text(text)
    return target


def cmd_offline(args) -> int:
    grid_shape = parse_grid_spec(args.train_grid)
    grid = ParameterGrid.training(*grid_shape, mu0_spacing=args.mu0_spacing)
    out_dir = _model_dir(args)

    started = time.perf_counter()
    system = assemble_affine_system(build_thermal_block_mesh(args.refine))
    assembled = time.perf_counter()

    config = {
        "refine": args.refine,
        "train_grid": args.train_grid,
        "mu0_spacing": args.mu0_spacing,
        "method": args.method,
        "tol": args.tol,
        "n_max": args.n_max,
        "energy": args.energy,
        "n": args.n,
        "kernel": args.kernel,
        "seed": args.seed,
    }
    surrogate_config = {
        "kernel": args.kernel,
        "seed": args.seed,
        "hidden_layers": [16],
        "activation": "tanh",
        "learning_rate": 0.05,
        "epochs": 2000,
        "local_modes": 1,
    }

    if args.method == "greedy":
        basis, trace, model = greedy(system, grid, tol=args.tol,
                                     n_max=args.n_max)
        traces = {"greedy.csv": trace.to_csv()}
        snapshots = None
        print("greedy selection trace:")
        print(f"  {'iter':>4} {'mu0':>12} {'mu1':>8} {'max_eta':>14}")
        for i, (mu, eta) in enumerate(
                zip(trace.selected_parameters, trace.max_eta_history)):
            print(f"  {i:>4} {mu[0]:>12.6g} {mu[1]:>8.4g} {eta:>14.6e}")
        print(f"converged: {trace.converged} ({trace.stopped_reason})")
    else:
        snapshots = generate_snapshots(system, grid)
        pod = Pod(gram=system.gram_x, n_components=args.n,
                  energy=args.energy).fit(snapshots.fields)
        basis = pod.basis_
        model = project(system, basis)
        traces = {"spectrum.csv": spectrum_csv(pod.eigenvalues_,
                                               pod.cumulative_energy_)}
        kept = pod.cumulative_energy_[pod.n_components_ - 1]
        print(f"spectrum: kept {pod.n_components_} modes, "
              f"cumulative energy {kept:.12f}")

    finished = time.perf_counter()
    save_package(out_dir, config=config, mesh=system.mesh, system=system,
                 basis=basis, model=model, traces=traces,
                 snapshots=snapshots, surrogate_config=surrogate_config)

    print(f"reduced dimension N = {model.dim}")
    print(f"assembly {assembled - started:.3f} s, "
          f"basis construction {finished - assembled:.3f} s")
    print(f"package written to {out_dir}")
    return 0


def _surrogate_report_rows(system, mu, n, field, compare_fom):
    s_value = float(system.l_vec_full @ field)
    if not compare_fom:
        return "mu0,mu1,n,s\n" + "%.16e,%.16e,%d,%.16e\n" % (
            mu[0], mu[1], n, s_value), s_value, None
    reference = fom_solve(system, mu)
    err = v_norm(system, field - reference.field)
    scale = v_norm(system, reference.field)
    rel = err / scale if scale > 0.0 else err
    text = "mu0,mu1,n,s,rel_err\n" + "%.16e,%.16e,%d,%.16e,%.16e\n" % (
        mu[0], mu[1], n, s_value, rel)
    return text, s_value, rel


def cmd_solve(args) -> int:
    package = load_package(_model_dir(args))
    mu = _parse_mu(args.mu)
    out_dir = Path(args.out)
    system = package.system

    if args.method == "rb":
        solution = rom_solve(package.model, mu, args.n)
        field = reconstruct(package.model, solution.coefficients)
        n = solution.coefficients.shape[0]
        if args.compare_fom:
            report = effectivity_report(system, package.model, mu, n=args.n)
            report_text = ErrorReport.CSV_HEADER + "\n" + report.csv_row() + "\n"
            print(f"energy error {report.energy_norm_error:.6e}, "
                  f"eta {report.eta_en:.6e}, "
                  f"effectivity {report.effectivity:.4f}")
        else:
            report_text = "mu0,mu1,n,s,eta_en\n" + (
                "%.16e,%.16e,%d,%.16e,%.16e\n" % (
                    mu[0], mu[1], n, solution.output_s, solution.eta_en))
        print(f"s = {solution.output_s:.12e}, eta_en = {solution.eta_en:.6e}, "
              f"online {solution.wall_time * 1e3:.3f} ms")
    else:
        surrogate = fit_surrogates(package, [args.method])[args.method]
        info = surrogate.predict_info(mu, args.n)
        field = info.field
        n = args.n if args.n is not None else surrogate.n_components_
        for warning in info.warnings:
            print(f"warning: {warning}", file=sys.stderr)
        report_text, s_value, rel = _surrogate_report_rows(
            system, mu, n, field, args.compare_fom)
        print(f"s = {s_value:.12e}, online {info.online_ms:.3f} ms"
              + (f", rel V-error vs full order {rel:.6e}"
                 if rel is not None else ""))

    mesh = package.mesh
    lines = ["node,x,y,value"]
    lines.extend(
        "%d,%.16e,%.16e,%.16e" % (i, mesh.nodes[i, 0], mesh.nodes[i, 1], v)
        for i, v in enumerate(field)
    )
    _write(out_dir, "field.csv", "\n".join(lines) + "\n")
    _write(out_dir, "report.csv", report_text)
    print(f"wrote field.csv and report.csv to {out_dir}")
    return 0


def cmd_validate(args) -> int:
    package = load_package(_model_dir(args))
    spacing = package.manifest["config"].get("mu0_spacing", "linear")
    shape = parse_grid_spec(args.grid)
    grid = ParameterGrid.validation(*shape, mu0_spacing=spacing)
    out_dir = Path(args.out)

    reports = sweep_reports(package.system, package.model, grid)
    rows = convergence_rows(package.system, package.model, grid,
                            reports=reports)
    _write(out_dir, "convergence.csv", convergence_csv(rows))
    _write(out_dir, "report.csv", report_csv(reports))

    last = rows[-1]
    print(f"validation on {len(grid)} points, N = {last['n']}:")
    for row in rows:
        print(f"  n={row['n']}: mean en err {row['mean_en_err']:.6e}, "
              f"max {row['max_en_err']:.6e}, mean eta {row['mean_eta']:.6e}")
    timing = measure_speedup(package.system, package.model)
    print(f"speed-up: mean full-order {timing['mean_fom_s'] * 1e3:.3f} ms / "
          f"mean online {timing['mean_online_s'] * 1e3:.3f} ms = "
          f"{timing['speedup']:.1f}x")
    print(f"wrote convergence.csv and report.csv to {out_dir}")
    return 0


def cmd_compare_surrogates(args) -> int:
    package = load_package(_model_dir(args))
    spacing = package.manifest["config"].get("mu0_spacing", "linear")
    shape = parse_grid_spec(args.grid)
    grid = ParameterGrid.validation(*shape, mu0_spacing=spacing)
    out_dir = Path(args.out)

    surrogates = fit_surrogates(package)
    rows = compare_rows(package.system, surrogates, grid)
    _write(out_dir, "compare.csv", compare_csv(rows))

    for method in surrogates:
        errs = [r["rel_err"] for r in rows if r["method"] == method]
        print(f"{method}: mean rel err {sum(errs) / len(errs):.6e}, "
              f"max {max(errs):.6e}")
    print(f"wrote compare.csv to {out_dir}")
    return 0


def cmd_serve(args) -> int:
    from .server import run_server

    models_dir = args.models or _default_model_dir()
    if not models_dir:
        raise InvalidArgument(
            "no models directory: pass --models or set ROM_MODEL_DIR"
        )
    run_server(models_dir, port=args.port, cors_origin=args.cors_origin)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermrom",
        description="Reduced-order thermal-block toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    offline = sub.add_parser("offline", help="build a model package")
    offline.add_argument("--refine", type=int, default=16)
    offline.add_argument("--train-grid", default="10x10")
    offline.add_argument("--method", choices=("greedy", "pod"),
                         default="greedy")
    offline.add_argument("--tol", type=float, default=1e-5)
    offline.add_argument("--n-max", type=int, default=20)
    offline.add_argument("--energy", type=float, default=None)
    offline.add_argument("--n", type=int, default=None)
    offline.add_argument("--mu0-spacing", choices=("linear", "log"),
                         default="linear")
    offline.add_argument("--kernel", default="thin_plate_spline")
    offline.add_argument("--seed", type=int, default=0)
    offline.add_argument("--out", dest="model", default=None,
                         help="package directory (default: ROM_MODEL_DIR)")
    offline.set_defaults(func=cmd_offline)

    solve = sub.add_parser("solve", help="evaluate one parameter point")
    solve.add_argument("--model", default=None)
    solve.add_argument("--mu", required=True)
    solve.add_argument("--n", type=int, default=None)
    solve.add_argument("--method", choices=METHODS, default="rb")
    solve.add_argument("--compare-fom", action="store_true")
    solve.add_argument("--out", default=".")
    solve.set_defaults(func=cmd_solve)

    validate = sub.add_parser("validate", help="error sweep over a grid")
    validate.add_argument("--model", default=None)
    validate.add_argument("--grid", default="10x10")
    validate.add_argument("--out", default=".")
    validate.set_defaults(func=cmd_validate)

    compare = sub.add_parser("compare-surrogates",
                             help="side-by-side surrogate errors")
    compare.add_argument("--model", default=None)
    compare.add_argument("--grid", default="10x10")
    compare.add_argument("--out", default=".")
    compare.set_defaults(func=cmd_compare_surrogates)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--models", default=None)
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--cors-origin", default=None)
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidArgument as exc:
        print(f"argument error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except (StoreError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
