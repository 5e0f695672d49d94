"""Certified reduced-order modeling for a parametric thermal block.

The package covers the full workflow: structured meshing and finite
element assembly of the two-material diffusion problem, full-order
solves, proper orthogonal decomposition and greedy basis construction
with a certified energy-norm error estimator, data-driven surrogates
(RBF and neural-network regression of reduced coefficients), a binary
model-package store, a command-line driver, and an HTTP service.

Submodules with heavier dependencies are not imported here: the
command line lives in :mod:`thermrom.cli` and the HTTP service in
:mod:`thermrom.server`.
"""

from .analysis import convergence_rows, measure_speedup, sweep_reports
from .assembly import AffineSystem, DofMap, assemble_affine_system
from .basis import (
    Pod,
    PodSpectrum,
    ReducedBasis,
    kolmogorov_proxy,
    orthonormality_gap,
    orthonormalize,
    project_coefficients,
)
from .errors import (
    AssemblyError,
    CorruptPackageError,
    DependentSnapshotError,
    EmptyBasisError,
    FormatVersionError,
    InvalidArgument,
    NumericError,
    RankDeficientError,
    SingularSystemError,
    SolverError,
    StoreError,
    TrainingDivergedError,
)
from .fom import FomSolution, energy_norm, fom_solve, v_inner, v_norm
from .greedy import GreedyRb, GreedyTrace, greedy
from .mesh import Mesh, build_thermal_block_mesh, mesh_from_json_dict
from .reduced import (
    ErrorReport,
    ReducedModel,
    ReducedSolution,
    alpha_lower_bound,
    effectivity_report,
    error_estimator,
    gamma_upper_bound,
    project,
    reconstruct,
    residual_norm_squared,
    residual_norm_squared_gram,
    rom_solve,
)
from .snapshots import ParameterGrid, SnapshotSet, generate_snapshots, parse_grid_spec
from .store import (
    ModelPackage,
    fit_surrogates,
    fnv1a64,
    load_package,
    model_id_for,
    read_romx,
    save_package,
    write_romx,
)
from .surrogates import (
    LocalPodRbf,
    Mlp,
    ParameterScaler,
    PodNn,
    PodRbf,
    RbfInterpolant,
)

__version__ = "1.0.0"

__all__ = [
    "AffineSystem",
    "AssemblyError",
    "CorruptPackageError",
    "DependentSnapshotError",
    "DofMap",
    "EmptyBasisError",
    "ErrorReport",
    "FomSolution",
    "FormatVersionError",
    "GreedyRb",
    "GreedyTrace",
    "InvalidArgument",
    "LocalPodRbf",
    "Mesh",
    "Mlp",
    "ModelPackage",
    "NumericError",
    "ParameterGrid",
    "ParameterScaler",
    "Pod",
    "PodNn",
    "PodRbf",
    "PodSpectrum",
    "RankDeficientError",
    "RbfInterpolant",
    "ReducedBasis",
    "ReducedModel",
    "ReducedSolution",
    "SingularSystemError",
    "SnapshotSet",
    "SolverError",
    "StoreError",
    "TrainingDivergedError",
    "alpha_lower_bound",
    "assemble_affine_system",
    "build_thermal_block_mesh",
    "convergence_rows",
    "effectivity_report",
    "energy_norm",
    "error_estimator",
    "fit_surrogates",
    "fnv1a64",
    "fom_solve",
    "gamma_upper_bound",
    "generate_snapshots",
    "greedy",
    "kolmogorov_proxy",
    "load_package",
    "measure_speedup",
    "mesh_from_json_dict",
    "model_id_for",
    "orthonormality_gap",
    "orthonormalize",
    "parse_grid_spec",
    "project",
    "project_coefficients",
    "read_romx",
    "reconstruct",
    "residual_norm_squared",
    "residual_norm_squared_gram",
    "rom_solve",
    "save_package",
    "sweep_reports",
    "v_inner",
    "v_norm",
    "write_romx",
]
