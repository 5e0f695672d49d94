"""Versioned on-disk persistence of offline artifacts.

A model package is a directory: `manifest.json` (inventory with content
hashes, written last via atomic rename so a crash never leaves a
manifest pointing at missing files), `mesh.json`, and binary matrices
in the ROMX format below.

ROMX (little-endian): magic `ROMX`, u32 format version (=1), u8 dtype
(1 = float64), u8 layout (0 = dense column-major, 1 = compressed sparse
row), u64 rows, u64 cols.  Dense payload: rows*cols values.  CSR
payload: u64 nnz, rows+1 u64 row offsets, nnz u64 column indices, nnz
values.

Hashes are 64-bit FNV-1a over file bytes — integrity, not security.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .assembly import AffineSystem, assemble_affine_system
from .basis import ReducedBasis
from .errors import CorruptPackageError, FormatVersionError, InvalidArgument
from .mesh import Mesh, mesh_from_json_dict
from .reduced import ReducedModel
from .snapshots import SnapshotSet

ROMX_MAGIC = b"ROMX"
FORMAT_VERSION = 1
DTYPE_FLOAT64 = 1
LAYOUT_DENSE = 0
LAYOUT_CSR = 1

_HEADER = struct.Struct("<4sIBBQQ")

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> str:
    """64-bit FNV-1a hash of a byte string, as 16 hex digits."""
    value = FNV_OFFSET
    for byte in data:
        value = ((value ^ byte) * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return f"{value:016x}"


def hash_file(path) -> str:
    return fnv1a64(Path(path).read_bytes())


def write_romx(path, matrix) -> None:
    """Serialize one float64 matrix (dense 2-D or CSR) to `path`."""
    path = Path(path)
    if sp.issparse(matrix):
        csr = matrix.tocsr()
        csr.sort_indices()
        rows, cols = csr.shape
        header = _HEADER.pack(ROMX_MAGIC, FORMAT_VERSION, DTYPE_FLOAT64,
                              LAYOUT_CSR, rows, cols)
        body = b"".join([
            struct.pack("<Q", csr.nnz),
            np.asarray(csr.indptr, dtype="<u8").tobytes(),
            np.asarray(csr.indices, dtype="<u8").tobytes(),
            np.asarray(csr.data, dtype="<f8").tobytes(),
        ])
    else:
        arr = np.asarray(matrix, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidArgument(
                f"dense payloads must be 2-D, got shape {arr.shape}"
            )
        rows, cols = arr.shape
        header = _HEADER.pack(ROMX_MAGIC, FORMAT_VERSION, DTYPE_FLOAT64,
                              LAYOUT_DENSE, rows, cols)
        body = np.asarray(arr, dtype="<f8").tobytes(order="F")
    path.write_bytes(header + body)


def _need(buffer: bytes, count: int, offset: int, path, what: str) -> int:
    end = offset + count
    if end > len(buffer):
        raise CorruptPackageError(
            f"{path}: truncated {what} (need {end} bytes, have {len(buffer)})"
        )
    return end


def read_romx(path):
    """Deserialize a ROMX file to an ndarray or a CSR matrix."""
    path = Path(path)
    try:
        buffer = path.read_bytes()
    except OSError as exc:
        raise CorruptPackageError(f"{path}: cannot read ({exc})") from exc
    if len(buffer) < _HEADER.size:
        raise CorruptPackageError(f"{path}: truncated header")
    magic, version, dtype, layout, rows, cols = _HEADER.unpack_from(buffer)
    if magic != ROMX_MAGIC:
        raise CorruptPackageError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise FormatVersionError(
            f"{path}: format version {version}, supported: {FORMAT_VERSION}"
        )
    if dtype != DTYPE_FLOAT64:
        raise CorruptPackageError(f"{path}: unknown dtype code {dtype}")

    offset = _HEADER.size
    if layout == LAYOUT_DENSE:
        end = _need(buffer, rows * cols * 8, offset, path, "dense payload")
        flat = np.frombuffer(buffer[offset:end], dtype="<f8")
        return flat.reshape((rows, cols), order="F").copy(order="F")
    if layout == LAYOUT_CSR:
        end = _need(buffer, 8, offset, path, "nnz field")
        (nnz,) = struct.unpack_from("<Q", buffer, offset)
        offset = end
        end = _need(buffer, (rows + 1) * 8, offset, path, "row offsets")
        indptr = np.frombuffer(buffer[offset:end], dtype="<u8").astype(np.int64)
        offset = end
        end = _need(buffer, nnz * 8, offset, path, "column indices")
        indices = np.frombuffer(buffer[offset:end], dtype="<u8").astype(np.int64)
        offset = end
        end = _need(buffer, nnz * 8, offset, path, "values")
        data = np.frombuffer(buffer[offset:end], dtype="<f8").copy()
        return sp.csr_matrix((data, indices, indptr), shape=(rows, cols))
    raise CorruptPackageError(f"{path}: unknown layout code {layout}")


def canonical_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def model_id_for(config: dict) -> str:
    return fnv1a64(canonical_json(config).encode())


@dataclass
class ModelPackage:
    """A loaded package: rebuilt system plus the stored artifacts."""

    root: Path
    manifest: dict
    mesh: Mesh
    system: AffineSystem
    basis: ReducedBasis
    model: ReducedModel
    traces: dict
    snapshots: SnapshotSet | None = None

    @property
    def model_id(self) -> str:
        return self.manifest["model_id"]


def _local_layout_ok(parameters: np.ndarray) -> bool:
    """True when the parameters form >= 3 anchors of >= 3 flux samples."""
    keys = np.round(parameters[:, 0], 12)
    anchors, counts = np.unique(keys, return_counts=True)
    return anchors.size >= 3 and int(counts.min()) >= 3


def save_package(path, *, config: dict, mesh: Mesh, system: AffineSystem,
                 basis: ReducedBasis, model: ReducedModel,
                 traces: dict | None = None,
                 snapshots: SnapshotSet | None = None,
                 surrogate_config: dict | None = None) -> dict:
    """Write a package directory; returns the manifest dict.

    All artifact files are written first; the manifest goes last via an
    atomic rename, so a partially written package has no manifest.
    """
    root = Path(path)
    for sub in ("ops", "basis", "reduced", "traces"):
        (root / sub).mkdir(parents=True, exist_ok=True)

    n, q_a, q_f = model.dim, model.q_a, model.q_f
    k = model.riesz_coords.shape[0]

    (root / "mesh.json").write_text(mesh.to_json())
    write_romx(root / "ops/A0.romx", system.a_ops[0])
    write_romx(root / "ops/A1.romx", system.a_ops[1])
    write_romx(root / "ops/f0.romx", system.f_vecs[0][:, None])
    write_romx(root / "ops/X.romx", system.gram_x)
    write_romx(root / "basis/XI.romx", basis.vectors)
    write_romx(root / "reduced/a.romx", model.a_rb.reshape(q_a * n, n))
    write_romx(root / "reduced/f.romx", model.f_rb)
    write_romx(root / "reduced/l.romx", model.l_rb[:, None])
    write_romx(root / "reduced/riesz_ff.romx", model.riesz_ff)
    write_romx(root / "reduced/riesz_fa.romx",
               model.riesz_fa.reshape(q_f * q_a, n))
    write_romx(root / "reduced/riesz_aa.romx",
               model.riesz_aa.reshape(q_a * n, q_a * n))
    write_romx(root / "reduced/riesz_coords.romx", model.riesz_coords)

    for name, text in (traces or {}).items():
        (root / "traces" / name).write_text(text)

    manifest = {
        "format_version": FORMAT_VERSION,
        "model_id": model_id_for(config),
        "config": config,
        "mesh": {"refine": mesh.refine, "n_nodes": mesh.n_nodes,
                 "n_cells": mesh.n_cells},
        "parameter_box": {"mu0": [0.1, 10.0], "mu1": [-1.0, 1.0]},
        "reduced": {"n": n, "q_a": q_a, "q_f": q_f, "k": k},
        "methods": ["rb"],
    }
    if snapshots is not None:
        (root / "snapshots").mkdir(exist_ok=True)
        write_romx(root / "snapshots/S.romx", snapshots.fields)
        write_romx(root / "snapshots/params.romx", snapshots.parameters)
        manifest["snapshots"] = {
            "count": snapshots.count,
            "provenance": snapshots.provenance,
        }
        methods = ["rb", "pod-rbf", "pod-nn"]
        if _local_layout_ok(snapshots.parameters):
            methods.insert(2, "local-pod-rbf")
        manifest["methods"] = methods
        manifest["surrogates"] = surrogate_config or {}

    files = {}
    for file_path in sorted(root.rglob("*")):
        if file_path.is_file() and file_path.name != "manifest.json":
            rel = file_path.relative_to(root).as_posix()
            files[rel] = hash_file(file_path)
    manifest["files"] = files

    tmp = root / "manifest.json.tmp"
    tmp.write_text(canonical_json(manifest))
    os.replace(tmp, root / "manifest.json")
    return manifest


def _verify_inventory(root: Path, manifest: dict) -> None:
    for rel, expected in manifest["files"].items():
        file_path = root / rel
        if not file_path.is_file():
            raise CorruptPackageError(f"{rel}: listed in manifest but missing")
        actual = hash_file(file_path)
        if actual != expected:
            raise CorruptPackageError(
                f"{rel}: content hash {actual} does not match manifest "
                f"entry {expected}"
            )


def load_package(path) -> ModelPackage:
    """Load and verify a package directory."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise CorruptPackageError(f"{manifest_path}: no manifest found")
    try:
        manifest = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise CorruptPackageError(f"manifest.json: invalid JSON ({exc})") from exc
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionError(
            f"manifest format version {version}, supported: {FORMAT_VERSION}"
        )
    _verify_inventory(root, manifest)

    mesh = mesh_from_json_dict(json.loads((root / "mesh.json").read_text()))
    system = assemble_affine_system(mesh)

    for rel, assembled in (
        ("ops/A0.romx", system.a_ops[0]),
        ("ops/A1.romx", system.a_ops[1]),
        ("ops/X.romx", system.gram_x),
    ):
        loaded = read_romx(root / rel)
        reference = assembled.tocsr()
        reference.sort_indices()
        same = (loaded.shape == reference.shape
                and np.array_equal(loaded.indptr, reference.indptr)
                and np.array_equal(loaded.indices, reference.indices)
                and np.array_equal(loaded.data, reference.data))
        if not same:
            raise CorruptPackageError(
                f"{rel}: operator does not match the stored mesh"
            )
    f0 = read_romx(root / "ops/f0.romx")[:, 0]
    if not np.array_equal(f0, system.f_vecs[0]):
        raise CorruptPackageError(
            "ops/f0.romx: load vector does not match the stored mesh"
        )

    dims = manifest["reduced"]
    n, q_a, q_f = dims["n"], dims["q_a"], dims["q_f"]
    basis = ReducedBasis(read_romx(root / "basis/XI.romx"))
    if basis.dim != n:
        raise CorruptPackageError(
            f"basis/XI.romx: {basis.dim} columns, manifest says {n}"
        )
    model = ReducedModel(
        basis=basis,
        dof_map=system.dof_map,
        a_rb=np.ascontiguousarray(
            read_romx(root / "reduced/a.romx")).reshape(q_a, n, n),
        f_rb=np.ascontiguousarray(read_romx(root / "reduced/f.romx")),
        l_rb=np.ascontiguousarray(read_romx(root / "reduced/l.romx"))[:, 0],
        riesz_ff=np.ascontiguousarray(read_romx(root / "reduced/riesz_ff.romx")),
        riesz_fa=np.ascontiguousarray(
            read_romx(root / "reduced/riesz_fa.romx")).reshape(q_f, q_a, n),
        riesz_aa=np.ascontiguousarray(
            read_romx(root / "reduced/riesz_aa.romx")).reshape(q_a, n, q_a, n),
        riesz_coords=np.ascontiguousarray(
            read_romx(root / "reduced/riesz_coords.romx")),
    )

    traces = {}
    for rel in manifest["files"]:
        if rel.startswith("traces/"):
            traces[rel.split("/", 1)[1]] = (root / rel).read_text()

    snapshots = None
    if "snapshots" in manifest:
        fields = np.ascontiguousarray(read_romx(root / "snapshots/S.romx"))
        params = np.ascontiguousarray(read_romx(root / "snapshots/params.romx"))
        outputs = np.array([
            float(system.l_vec_full @ system.dof_map.extend(row))
            for row in fields
        ])
        snapshots = SnapshotSet(
            parameters=params, fields=fields, outputs=outputs,
            dof_map=system.dof_map,
            provenance=manifest["snapshots"]["provenance"],
        )

    return ModelPackage(root=root, manifest=manifest, mesh=mesh,
                        system=system, basis=basis, model=model,
                        traces=traces, snapshots=snapshots)


def fit_surrogates(package: ModelPackage, methods=None) -> dict:
    """Refit the data-driven surrogates from the stored snapshots.

    Fitting is deterministic (seeded, single-threaded), so a reload
    reproduces the exact surrogate that a fresh offline run would
    build.  `methods` limits which models are fitted; default is every
    surrogate method the manifest advertises.
    """
    from .surrogates import LocalPodRbf, PodNn, PodRbf

    if package.snapshots is None:
        raise InvalidArgument(
            "package holds no snapshots; rebuild the package from a "
            "snapshot-based method to enable surrogates"
        )
    available = [m for m in package.manifest["methods"] if m != "rb"]
    if methods is None:
        methods = available
    unknown = [m for m in methods if m not in available]
    if unknown:
        raise InvalidArgument(
            f"methods {unknown} not available in this package "
            f"(has: {available})"
        )

    cfg = package.manifest.get("surrogates", {})
    kernel = cfg.get("kernel", "thin_plate_spline")
    system = package.system
    X = package.snapshots.parameters
    Y = package.snapshots.fields
    fitted = {}
    for method in methods:
        if method == "pod-rbf":
            fitted[method] = PodRbf(
                gram=system.gram_x, dof_map=system.dof_map, kernel=kernel,
            ).fit(X, Y)
        elif method == "local-pod-rbf":
            fitted[method] = LocalPodRbf(
                gram=system.gram_x, dof_map=system.dof_map,
                n_components=int(cfg.get("local_modes", 1)), kernel=kernel,
            ).fit(X, Y)
        elif method == "pod-nn":
            fitted[method] = PodNn(
                gram=system.gram_x, dof_map=system.dof_map,
                hidden_layers=tuple(cfg.get("hidden_layers", [16])),
                activation=cfg.get("activation", "tanh"),
                learning_rate=float(cfg.get("learning_rate", 0.05)),
                epochs=int(cfg.get("epochs", 2000)),
                seed=int(cfg.get("seed", 0)),
            ).fit(X, Y)
        else:
            raise InvalidArgument(f"unknown surrogate method {method!r}")
    return fitted
