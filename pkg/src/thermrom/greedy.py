"""Certified greedy construction of a reduced basis.

Each iteration adds the full-order solution at the parameter where the
online error estimator is largest over the training grid, then
re-projects.  The sweep over the grid touches only reduced quantities,
so its cost is independent of the mesh.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_mu
from .assembly import AffineSystem
from .basis import DROP_TOL, ReducedBasis
from .errors import DependentSnapshotError, InvalidArgument
from .fom import fom_solve
from .reduced import ReducedModel, project, rom_solve
from .snapshots import ParameterGrid


@dataclass
class GreedyTrace:
    """Selection history: row k describes the basis of size k+1."""

    selected_parameters: list = field(default_factory=list)
    max_eta_history: list = field(default_factory=list)
    final_tol: float = 0.0
    converged: bool = False
    stopped_reason: str = ""

    CSV_HEADER = "iter,mu0,mu1,max_eta"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for k, (mu, eta) in enumerate(
            zip(self.selected_parameters, self.max_eta_history)
        ):
            lines.append(
                "%d,%.16e,%.16e,%.16e" % (k + 1, mu[0], mu[1], eta)
            )
        return "\n".join(lines) + "\n"


def _grid_points(train_grid) -> np.ndarray:
    if isinstance(train_grid, ParameterGrid):
        return train_grid.points
    points = np.asarray(train_grid, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 1:
        raise InvalidArgument("training grid must be a nonempty (M, 2) array")
    return points


def _locate(points: np.ndarray, mu) -> int:
    hits = np.nonzero(
        np.isclose(points[:, 0], mu[0], rtol=1e-12, atol=0.0)
        & np.isclose(points[:, 1], mu[1], rtol=0.0, atol=1e-12)
    )[0]
    if hits.size == 0:
        raise InvalidArgument(f"start point {mu} is not on the training grid")
    return int(hits[0])


def _orthogonal_complement(
    psi: np.ndarray, basis_vectors: list, gram
) -> np.ndarray | None:
    """Gram-Schmidt psi against the basis; None when dependent."""
    w = psi.astype(np.float64, copy=True)
    for _ in range(2):
        for u in basis_vectors:
            w -= float(u @ (gram @ w)) * u
    norm = np.sqrt(max(float(w @ (gram @ w)), 0.0))
    if norm < DROP_TOL:
        return None
    return w / norm


def greedy(
    sys: AffineSystem,
    train_grid,
    tol: float,
    n_max: int,
    mu_start=None,
) -> tuple[ReducedBasis, GreedyTrace, ReducedModel]:
    """Grow a basis until the worst estimated error drops below tol.

    Returns the basis, the selection trace, and the projected model of
    the final basis.  Reaching n_max with the tolerance unmet is not an
    error; the trace carries a converged flag instead.
    """
    if not tol > 0.0:
        raise InvalidArgument(f"tol must be positive, got {tol}")
    n_max = int(n_max)
    if n_max < 1:
        raise InvalidArgument(f"n_max must be >= 1, got {n_max}")
    points = _grid_points(train_grid)
    for mu in points:
        check_mu(mu)
    current_index = 0 if mu_start is None else _locate(points, check_mu(mu_start))

    trace = GreedyTrace(final_tol=float(tol))
    basis_vectors: list[np.ndarray] = []
    model = None
    while True:
        current_mu = points[current_index]
        psi = sys.dof_map.restrict(fom_solve(sys, current_mu).field)
        new_vector = _orthogonal_complement(psi, basis_vectors, sys.gram_x)
        if new_vector is None:
            if not basis_vectors:
                raise DependentSnapshotError(
                    f"starting snapshot at mu={tuple(current_mu)} is degenerate"
                )
            trace.converged = False
            trace.stopped_reason = "dependent-snapshot"
            break
        basis_vectors.append(new_vector)
        basis = ReducedBasis(vectors=np.column_stack(basis_vectors))
        model = project(sys, basis)

        etas = np.array(
            [rom_solve(model, mu).eta_en for mu in points]
        )
        max_index = int(np.argmax(etas))
        max_eta = float(etas[max_index])
        trace.selected_parameters.append(
            (float(current_mu[0]), float(current_mu[1]))
        )
        trace.max_eta_history.append(max_eta)

        if max_eta <= tol:
            trace.converged = True
            trace.stopped_reason = "tolerance"
            break
        if len(basis_vectors) >= n_max:
            trace.converged = False
            trace.stopped_reason = "n_max"
            break
        current_index = max_index

    basis = ReducedBasis(vectors=np.column_stack(basis_vectors))
    if model is None or model.dim != basis.dim:
        model = project(sys, basis)
    return basis, trace, model


class GreedyRb(BaseEstimator):
    """Estimator wrapper: fit on training parameters, predict outputs.

    fit(X) runs the greedy loop on the (M, 2) parameter sample X;
    predict(X) returns the reduced output at each query row, transform
    returns reduced coefficients.
    """

    def __init__(self, system=None, tol=1e-5, n_max=20, mu_start=None):
        self.system = system
        self.tol = tol
        self.n_max = n_max
        self.mu_start = mu_start

    def fit(self, X, y=None):
        if self.system is None:
            raise InvalidArgument("GreedyRb requires the affine system")
        basis, trace, model = greedy(
            self.system, X, self.tol, self.n_max, self.mu_start
        )
        self.basis_ = basis
        self.trace_ = trace
        self.model_ = model
        self.n_components_ = basis.dim
        self.converged_ = trace.converged
        return self

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.array([rom_solve(self.model_, mu).output_s for mu in X])

    def transform(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return np.vstack(
            [rom_solve(self.model_, mu).coefficients for mu in X]
        )
