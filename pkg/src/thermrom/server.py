"""JSON-over-HTTP service exposing loaded model packages.

Packages are loaded once at startup and shared read-only across
requests; the per-(model, grid) convergence cache is the only mutable
state, guarded by a lock.  Request validation is explicit so the error
taxonomy is exact: 400 with a field-level message for out-of-range
values, 404 for unknown models, 422 for unknown methods, 500 only for
internal faults.
"""

from __future__ import annotations

import math
import os
import threading
import time
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import JSONResponse

from ._validation import MU0_RANGE, MU1_RANGE
from .analysis import convergence_rows, sweep_reports
from .errors import InvalidArgument, NumericError
from .fom import fom_solve, energy_norm
from .reduced import reconstruct, rom_solve
from .snapshots import ParameterGrid, parse_grid_spec
from .store import fit_surrogates, load_package

SURROGATE_METHODS = ("pod-rbf", "local-pod-rbf", "pod-nn")


class ModelEntry:
    """One loaded package plus lazily fitted surrogates."""

    def __init__(self, package):
        self.package = package
        self._surrogates = {}
        self._lock = threading.Lock()

    def surrogate(self, method: str):
        with self._lock:
            if method not in self._surrogates:
                self._surrogates[method] = fit_surrogates(
                    self.package, [method])[method]
            return self._surrogates[method]


def _discover_packages(models_dir) -> dict:
    root = Path(models_dir)
    candidates = []
    if (root / "manifest.json").is_file():
        candidates.append(root)
    else:
        candidates.extend(
            sub for sub in sorted(root.iterdir())
            if sub.is_dir() and (sub / "manifest.json").is_file()
        )
    if not candidates:
        raise InvalidArgument(f"no model packages found under {root}")
    entries = {}
    for path in candidates:
        package = load_package(path)
        entries[package.model_id] = ModelEntry(package)
    return entries


def _bad_request(field: str, message: str):
    raise HTTPException(status_code=400,
                        detail={"field": field, "message": message})


def _validate_mu(payload) -> tuple:
    mu = payload.get("mu")
    if (not isinstance(mu, (list, tuple)) or len(mu) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                       for v in mu)):
        _bad_request("mu", "mu must be a pair of numbers [mu0, mu1]")
    mu0, mu1 = float(mu[0]), float(mu[1])
    if not (math.isfinite(mu0) and MU0_RANGE[0] <= mu0 <= MU0_RANGE[1]):
        _bad_request("mu", f"mu0 must be within [{MU0_RANGE[0]}, "
                           f"{MU0_RANGE[1]}], got {mu0}")
    if not (math.isfinite(mu1) and MU1_RANGE[0] <= mu1 <= MU1_RANGE[1]):
        _bad_request("mu", f"mu1 must be within [{MU1_RANGE[0]}, "
                           f"{MU1_RANGE[1]}], got {mu1}")
    return mu0, mu1


def _validate_n(payload, limit: int) -> int | None:
    n = payload.get("n")
    if n is None:
        return None
    if isinstance(n, bool) or not isinstance(n, int):
        _bad_request("n", "n must be an integer")
    if not 1 <= n <= limit:
        _bad_request("n", f"n must be within [1, {limit}], got {n}")
    return n


def create_app(models_dir, cors_origin: str | None = None,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="thermal-block reduced-order service")
    entries = _discover_packages(models_dir)
    convergence_cache: dict = {}
    cache_lock = threading.Lock()

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware, allow_origins=[cors_origin],
            allow_methods=["*"], allow_headers=["*"],
        )

    def _entry(model_id: str) -> ModelEntry:
        entry = entries.get(model_id)
        if entry is None:
            raise HTTPException(status_code=404,
                                detail=f"unknown model {model_id!r}")
        return entry

    def _metadata(entry: ModelEntry) -> dict:
        manifest = entry.package.manifest
        return {
            "id": manifest["model_id"],
            "n": manifest["reduced"]["n"],
            "parameter_box": manifest["parameter_box"],
            "mesh": manifest["mesh"],
            "methods": manifest["methods"],
        }

    @app.get("/api/models")
    def list_models():
        return [_metadata(entry) for entry in entries.values()]

    @app.get("/api/models/{model_id}")
    def model_metadata(model_id: str):
        return _metadata(_entry(model_id))

    @app.get("/api/models/{model_id}/mesh")
    def model_mesh(model_id: str):
        return _entry(model_id).package.mesh.to_json_dict()

    @app.post("/api/models/{model_id}/solve")
    def solve(model_id: str, payload: dict = Body(...)):
        entry = _entry(model_id)
        package = entry.package

        method = payload.get("method", "rb")
        if method not in package.manifest["methods"]:
            raise HTTPException(
                status_code=422,
                detail={"field": "method",
                        "message": f"unknown method {method!r}; this model "
                                   f"offers {package.manifest['methods']}"},
            )
        compare_fom = payload.get("compare_fom", False)
        if not isinstance(compare_fom, bool):
            _bad_request("compare_fom", "compare_fom must be a boolean")
        mu = _validate_mu(payload)

        try:
            if method == "rb":
                n = _validate_n(payload, package.model.dim)
                solution = rom_solve(package.model, mu, n)
                field = reconstruct(package.model, solution.coefficients)
                response = {
                    "field": field.tolist(),
                    "s": solution.output_s,
                    "s_average": solution.output_s / 2.0,
                    "eta_en": solution.eta_en,
                    "online_ms": solution.wall_time * 1e3,
                    "warnings": [],
                }
                if compare_fom:
                    start = time.perf_counter()
                    reference = fom_solve(package.system, mu)
                    response["fom_ms"] = (time.perf_counter() - start) * 1e3
                    err = energy_norm(package.system,
                                      field - reference.field, mu)
                    effectivity = (solution.eta_en / err
                                   if err > 1e-13 else None)
                    response["effectivity"] = effectivity
            else:
                surrogate = entry.surrogate(method)
                n = _validate_n(payload, surrogate.n_components_)
                info = surrogate.predict_info(mu, n)
                s_value = float(package.system.l_vec_full @ info.field)
                response = {
                    "field": info.field.tolist(),
                    "s": s_value,
                    "s_average": s_value / 2.0,
                    "online_ms": info.online_ms,
                    "warnings": list(info.warnings),
                }
                if compare_fom:
                    start = time.perf_counter()
                    fom_solve(package.system, mu)
                    response["fom_ms"] = (time.perf_counter() - start) * 1e3
        except InvalidArgument as exc:
            _bad_request("request", str(exc))
        except NumericError as exc:
            raise HTTPException(status_code=500,
                                detail=f"solver failure: {exc}") from exc
        return response

    @app.get("/api/models/{model_id}/convergence")
    def convergence(model_id: str, grid: str = "10x10"):
        entry = _entry(model_id)
        try:
            shape = parse_grid_spec(grid)
        except InvalidArgument as exc:
            _bad_request("grid", str(exc))
        key = (model_id, shape)
        with cache_lock:
            cached = convergence_cache.get(key)
        if cached is not None:
            return JSONResponse(cached, headers={"X-Cache": "hit"})

        spacing = entry.package.manifest["config"].get("mu0_spacing",
                                                       "linear")
        validation = ParameterGrid.validation(*shape, mu0_spacing=spacing)
        reports = sweep_reports(entry.package.system, entry.package.model,
                                validation)
        rows = convergence_rows(entry.package.system, entry.package.model,
                                validation, reports=reports)
        for row in rows:  # JSON has no NaN literal
            if math.isnan(row["mean_effectivity"]):
                row["mean_effectivity"] = None
        body = {"grid": f"{shape[0]}x{shape[1]}", "rows": rows}
        with cache_lock:
            convergence_cache[key] = body
        return JSONResponse(body, headers={"X-Cache": "miss"})

    static_root = static_dir or os.environ.get("ROM_STATIC_DIR")
    if static_root and Path(static_root).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_root, html=True),
                  name="explorer")

    return app


def run_server(models_dir, port: int = 8080,
               cors_origin: str | None = None) -> None:
    import uvicorn

    app = create_app(models_dir, cors_origin=cors_origin)
    uvicorn.run(app, host="0.0.0.0", port=port)
