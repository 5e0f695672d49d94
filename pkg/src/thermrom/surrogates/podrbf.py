"""Field surrogates combining a POD basis with radial-basis regression.

Two variants:

* `PodRbf` builds one global basis from all snapshots and interpolates
  the projection coefficients over the scaled parameter plane.
* `LocalPodRbf` builds one small basis per conductivity anchor (each
  anchor holding a flux sweep), interpolates the basis vectors across
  anchors mode by mode, re-orthonormalizes the interpolated basis at
  the query point, and interpolates the coefficients over the plane.

Both predict full-mesh fields (Dirichlet nodes included) once given a
degree-of-freedom map; otherwise they return free-node vectors.
"""

from __future__ import annotations

import time

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator

from .._validation import as_matrix, check_mu
from ..basis import Pod, ReducedBasis, orthonormalize, project_coefficients
from ..errors import InvalidArgument, RankDeficientError
from .common import ParameterScaler, PredictionInfo
from .rbf import RbfInterpolant

EXTRAPOLATION_WARNING = (
    "query parameter lies outside the training bounding box; "
    "the interpolant is extrapolating"
)


def _check_training_set(X, y):
    X = as_matrix(X, "parameters")
    y = as_matrix(y, "fields")
    if X.shape[1] != 2:
        raise InvalidArgument(
            f"parameters must have 2 columns, got {X.shape[1]}"
        )
    if y.shape[0] != X.shape[0]:
        raise InvalidArgument(
            f"{X.shape[0]} parameter rows but {y.shape[0]} field rows"
        )
    for row in X:
        check_mu(row)
    return X, y


def _check_mode_count(n, n_components):
    if n is None:
        return n_components
    n = int(n)
    if not 1 <= n <= n_components:
        raise InvalidArgument(
            f"n must be between 1 and {n_components}, got {n}"
        )
    return n


class PodRbf(BaseEstimator):
    """Global POD basis with coefficient interpolation.

    Parameters
    ----------
    gram : SPD matrix defining the inner product for the POD.
    dof_map : optional map used to expand predictions to the full mesh.
    n_components, energy : basis-size controls forwarded to the POD.
    kernel, epsilon : radial-kernel controls for the interpolant.
    """

    def __init__(self, gram=None, dof_map=None, n_components=None,
                 energy=None, kernel="thin_plate_spline", epsilon=None):
        self.gram = gram
        self.dof_map = dof_map
        self.n_components = n_components
        self.energy = energy
        self.kernel = kernel
        self.epsilon = epsilon

    def fit(self, X, y):
        """X: (M, 2) parameters; y: (M, n_free) snapshot fields."""
        X, y = _check_training_set(X, y)
        pod = Pod(gram=self.gram, n_components=self.n_components,
                  energy=self.energy).fit(y)
        scaler = ParameterScaler().fit(X)
        rbf = RbfInterpolant(kernel=self.kernel, epsilon=self.epsilon)
        rbf.fit(scaler.transform(X), pod.transform(y))

        self.pod_ = pod
        self.scaler_ = scaler
        self.rbf_ = rbf
        self.n_components_ = pod.n_components_
        self.training_parameters_ = X
        self.warnings_ = list(rbf.warnings_)
        return self

    def coefficients(self, mu, n=None) -> np.ndarray:
        """Interpolated basis coefficients at one parameter point."""
        mu = check_mu(mu)
        n = _check_mode_count(n, self.n_components_)
        query = self.scaler_.transform(np.asarray(mu)[None, :])
        return self.rbf_.predict(query)[0, :n]

    def predict(self, mu, n=None) -> np.ndarray:
        coeffs = self.coefficients(mu, n)
        free = self.pod_.basis_.vectors[:, : coeffs.size] @ coeffs
        if self.dof_map is None:
            return free
        return self.dof_map.extend(free)

    def predict_info(self, mu, n=None) -> PredictionInfo:
        start = time.perf_counter()
        field = self.predict(mu, n)
        elapsed_ms = (time.perf_counter() - start) * 1e3
        warnings = list(self.warnings_)
        if self.scaler_.outside_training_box(check_mu(mu)):
            warnings.append(EXTRAPOLATION_WARNING)
        return PredictionInfo(field=field, warnings=warnings,
                              online_ms=elapsed_ms)


class LocalPodRbf(BaseEstimator):
    """Anchor-local POD bases with basis and coefficient interpolation.

    Training parameters must form groups sharing the same conductivity
    value (the anchors), each group holding its own flux sweep.  At
    least 3 anchors and 3 points per anchor are required so the radial
    interpolants are well posed.

    Parameters
    ----------
    gram : SPD matrix defining the inner product for the PODs.
    dof_map : optional map used to expand predictions to the full mesh.
    n_components : number of modes kept at every anchor; an anchor whose
        flux sweep has lower numerical rank raises `RankDeficientError`
        naming that anchor.
    kernel, epsilon : radial-kernel controls for both interpolants.
    """

    def __init__(self, gram=None, dof_map=None, n_components=1,
                 kernel="thin_plate_spline", epsilon=None):
        self.gram = gram
        self.dof_map = dof_map
        self.n_components = n_components
        self.kernel = kernel
        self.epsilon = epsilon

    def _group_by_anchor(self, X):
        mu0_keys = np.round(X[:, 0], 12)
        anchors = np.unique(mu0_keys)
        if anchors.size < 3:
            raise InvalidArgument(
                f"need at least 3 conductivity anchors, got {anchors.size}"
            )
        groups = []
        for anchor in anchors:
            rows = np.nonzero(mu0_keys == anchor)[0]
            if rows.size < 3:
                raise InvalidArgument(
                    f"anchor mu0={anchor:.6g} has only {rows.size} flux "
                    "samples; need at least 3"
                )
            groups.append(rows)
        return anchors, groups

    def fit(self, X, y):
        """X: (M, 2) parameters on an anchor layout; y: (M, n_free)."""
        X, y = _check_training_set(X, y)
        n_modes = int(self.n_components)
        if n_modes < 1:
            raise InvalidArgument(
                f"n_components must be >= 1, got {n_modes}"
            )
        anchors, groups = self._group_by_anchor(X)

        anchor_bases = []
        for anchor, rows in zip(anchors, groups):
            try:
                pod = Pod(gram=self.gram, n_components=n_modes).fit(y[rows])
            except RankDeficientError as exc:
                raise RankDeficientError(
                    f"anchor mu0={anchor:.6g}: {exc}"
                ) from exc
            anchor_bases.append(pod.basis_.vectors)
        gram = (sp.identity(y.shape[1], format="csr")
                if self.gram is None else self.gram)

        # Give every anchor the sign of the first one, mode by mode, so
        # the entrywise interpolation never crosses a sign flip.
        reference = anchor_bases[0]
        for vectors in anchor_bases[1:]:
            overlap = np.einsum(
                "xi,xi->i", reference, gram @ vectors
            )
            vectors[:, overlap < 0.0] *= -1.0

        scaler = ParameterScaler().fit(X)
        anchor_coords = scaler.transform_mu0(anchors)
        basis_rbf = []
        for mode in range(n_modes):
            entries = np.stack(
                [vectors[:, mode] for vectors in anchor_bases]
            )
            interp = RbfInterpolant(kernel=self.kernel, epsilon=self.epsilon)
            basis_rbf.append(interp.fit(anchor_coords, entries))

        coeffs = np.empty((X.shape[0], n_modes))
        for rows, vectors in zip(groups, anchor_bases):
            coeffs[rows] = project_coefficients(
                y[rows], ReducedBasis(vectors), gram
            )
        coeff_rbf = RbfInterpolant(kernel=self.kernel, epsilon=self.epsilon)
        coeff_rbf.fit(scaler.transform(X), coeffs)

        self.anchors_ = anchors
        self.anchor_bases_ = anchor_bases
        self.basis_rbf_ = basis_rbf
        self.coeff_rbf_ = coeff_rbf
        self.scaler_ = scaler
        self.gram_ = gram
        self.n_components_ = n_modes
        self.training_parameters_ = X
        self.warnings_ = [
            w for interp in [*basis_rbf, coeff_rbf] for w in interp.warnings_
        ]
        return self

    def interpolated_basis(self, mu0: float) -> ReducedBasis:
        """Basis at one conductivity, re-orthonormalized after the
        entrywise interpolation."""
        coord = self.scaler_.transform_mu0([float(mu0)])
        raw = np.column_stack(
            [interp.predict(coord)[0] for interp in self.basis_rbf_]
        )
        basis, dropped = orthonormalize(raw, self.gram_)
        if dropped:
            raise RankDeficientError(
                f"interpolated basis lost modes {dropped} at mu0={mu0:.6g}"
            )
        return basis

    def coefficients(self, mu, n=None) -> np.ndarray:
        mu = check_mu(mu)
        n = _check_mode_count(n, self.n_components_)
        query = self.scaler_.transform(np.asarray(mu)[None, :])
        return self.coeff_rbf_.predict(query)[0, :n]

    def predict(self, mu, n=None) -> np.ndarray:
        mu = check_mu(mu)
        coeffs = self.coefficients(mu, n)
        basis = self.interpolated_basis(mu[0])
        free = basis.vectors[:, : coeffs.size] @ coeffs
        if self.dof_map is None:
            return free
        return self.dof_map.extend(free)

    def predict_info(self, mu, n=None) -> PredictionInfo:
        start = time.perf_counter()
        field = self.predict(mu, n)
        elapsed_ms = (time.perf_counter() - start) * 1e3
        warnings = list(self.warnings_)
        if self.scaler_.outside_training_box(check_mu(mu)):
            warnings.append(EXTRAPOLATION_WARNING)
        return PredictionInfo(field=field, warnings=warnings,
                              online_ms=elapsed_ms)
