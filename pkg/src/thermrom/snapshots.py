"""Parameter sampling and snapshot generation.

Training values of both parameters are sampled uniformly by default;
the conductivity axis also supports log-uniform spacing since its
range spans two decades.  Validation grids are shifted by half a grid
step (half a log-step under log spacing) so they never coincide with
training points.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from ._validation import MU0_RANGE, MU1_RANGE, check_positive_int
from .assembly import AffineSystem, DofMap
from .errors import InvalidArgument, SolverError
from .fom import fom_solve

_LOG_MU0 = (np.log10(MU0_RANGE[0]), np.log10(MU0_RANGE[1]))


def parse_grid_spec(spec: str) -> tuple[int, int]:
    """Parse 'AxB' into (#mu0 points, #mu1 points)."""
    match = re.fullmatch(r"(\d+)x(\d+)", str(spec).strip())
    if not match:
        raise InvalidArgument(f"grid spec must look like '10x10', got {spec!r}")
    a, b = int(match.group(1)), int(match.group(2))
    if a < 1 or b < 1:
        raise InvalidArgument(f"grid spec must be positive, got {spec!r}")
    return a, b


def _axis(lo: float, hi: float, count: int, offset: bool) -> np.ndarray:
    if count == 1:
        return np.array([0.5 * (lo + hi) if offset else lo])
    if offset:
        h = (hi - lo) / (count - 1)
        return np.linspace(lo + 0.5 * h, hi - 0.5 * h, count)
    return np.linspace(lo, hi, count)


def _mu0_axis(count: int, spacing: str, offset: bool) -> np.ndarray:
    if spacing == "linear":
        return _axis(*MU0_RANGE, count, offset)
    if spacing == "log":
        return 10.0 ** _axis(*_LOG_MU0, count, offset)
    raise InvalidArgument(f"mu0 spacing must be 'linear' or 'log', got {spacing!r}")


@dataclass
class ParameterGrid:
    """Tensor grid over the parameter box, row-major (mu0 outer)."""

    mu0_values: np.ndarray
    mu1_values: np.ndarray
    mu0_spacing: str = "linear"

    @classmethod
    def training(cls, n_mu0: int, n_mu1: int,
                 mu0_spacing: str = "linear") -> "ParameterGrid":
        n_mu0 = check_positive_int(n_mu0, "n_mu0")
        n_mu1 = check_positive_int(n_mu1, "n_mu1")
        mu0 = _mu0_axis(n_mu0, mu0_spacing, offset=False)
        mu1 = _axis(*MU1_RANGE, n_mu1, offset=False)
        return cls(mu0_values=mu0, mu1_values=mu1, mu0_spacing=mu0_spacing)

    @classmethod
    def validation(cls, n_mu0: int, n_mu1: int,
                   mu0_spacing: str = "linear") -> "ParameterGrid":
        n_mu0 = check_positive_int(n_mu0, "n_mu0")
        n_mu1 = check_positive_int(n_mu1, "n_mu1")
        mu0 = _mu0_axis(n_mu0, mu0_spacing, offset=True)
        mu1 = _axis(*MU1_RANGE, n_mu1, offset=True)
        return cls(mu0_values=mu0, mu1_values=mu1, mu0_spacing=mu0_spacing)

    @property
    def points(self) -> np.ndarray:
        """All grid points as an (M, 2) array, mu0 varying slowest."""
        m0, m1 = np.meshgrid(self.mu0_values, self.mu1_values, indexing="ij")
        return np.column_stack([m0.ravel(), m1.ravel()])

    def __len__(self) -> int:
        return len(self.mu0_values) * len(self.mu1_values)


@dataclass
class SnapshotSet:
    """Full-order solutions at the training points, as free-node rows."""

    parameters: np.ndarray           # (M, 2)
    fields: np.ndarray               # (M, n_free)
    outputs: np.ndarray              # (M,)
    dof_map: DofMap
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.parameters.shape[0] < 1:
            raise InvalidArgument("snapshot set must contain at least one field")
        if self.parameters.shape[0] != self.fields.shape[0]:
            raise InvalidArgument("parameter and field counts differ")
        rounded = {tuple(p) for p in np.round(self.parameters, 12)}
        if len(rounded) != self.parameters.shape[0]:
            raise InvalidArgument("snapshot parameters must be pairwise distinct")

    @property
    def count(self) -> int:
        return self.parameters.shape[0]


def generate_snapshots(sys: AffineSystem, grid: ParameterGrid) -> SnapshotSet:
    """One full-order solve per grid point, in deterministic grid order."""
    points = grid.points
    fields = np.empty((points.shape[0], sys.n_free))
    outputs = np.empty(points.shape[0])
    for m, mu in enumerate(points):
        try:
            sol = fom_solve(sys, mu)
        except SolverError as exc:
            raise SolverError(f"snapshot solve failed at mu={tuple(mu)}") from exc
        fields[m] = sys.dof_map.restrict(sol.field)
        outputs[m] = sol.output_s
    provenance = {
        "grid": f"{len(grid.mu0_values)}x{len(grid.mu1_values)}",
        "mu0_spacing": grid.mu0_spacing,
        "solver": "direct-lu",
    }
    return SnapshotSet(
        parameters=points,
        fields=fields,
        outputs=outputs,
        dof_map=sys.dof_map,
        provenance=provenance,
    )
