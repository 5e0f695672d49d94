"""Reduced-basis construction: orthonormalization and POD.

All inner products here are taken in the gradient inner product given
by a Gram matrix on the free nodes.  The POD estimator follows the
sklearn conventions: hyperparameters in the constructor, ``fit``
returning self, fitted attributes with trailing underscores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator

from .errors import EmptyBasisError, InvalidArgument, RankDeficientError

DROP_TOL = 1e-10
RANK_TOL = 1e-14


@dataclass
class ReducedBasis:
    """V-orthonormal basis; ``vectors`` holds one basis field per column."""

    vectors: np.ndarray  # (n_free, N)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def leading(self, n: int) -> "ReducedBasis":
        if not 1 <= n <= self.dim:
            raise InvalidArgument(f"n must be in [1, {self.dim}], got {n}")
        return ReducedBasis(vectors=self.vectors[:, :n])


def orthonormality_gap(basis: ReducedBasis, gram) -> float:
    """Max deviation of the basis Gram matrix from the identity."""
    g = basis.vectors.T @ (gram @ basis.vectors)
    return float(np.max(np.abs(g - np.eye(basis.dim))))


def orthonormalize(vectors, gram, drop_tol: float = DROP_TOL):
    """Modified Gram-Schmidt in the Gram inner product.

    Runs one re-orthogonalization sweep per vector and drops vectors
    whose residual norm falls below ``drop_tol``.  Returns the basis
    and the list of dropped input indices.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        columns = [vectors[:, j] for j in range(vectors.shape[1])]
    else:
        columns = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not columns:
        raise InvalidArgument("orthonormalize requires at least one vector")

    kept: list[np.ndarray] = []
    dropped: list[int] = []
    for index, v in enumerate(columns):
        w = v.astype(np.float64, copy=True)
        for _ in range(2):
            for u in kept:
                w -= float(u @ (gram @ w)) * u
        norm = np.sqrt(max(float(w @ (gram @ w)), 0.0))
        if norm < drop_tol:
            dropped.append(index)
            continue
        kept.append(w / norm)
    if not kept:
        raise EmptyBasisError("every vector was dropped during orthonormalization")
    return ReducedBasis(vectors=np.column_stack(kept)), dropped


@dataclass
class PodSpectrum:
    """Eigendecomposition of the snapshot correlation matrix."""

    eigenvalues: np.ndarray         # descending, clamped at 0, length M
    eigenvectors: np.ndarray        # (M, M), columns matching eigenvalues
    cumulative_energy: np.ndarray   # partial-sum ratios in [0, 1]

    def numerical_rank(self, rank_tol: float = RANK_TOL) -> int:
        if self.eigenvalues[0] <= 0.0:
            return 0
        return int(np.sum(self.eigenvalues >= rank_tol * self.eigenvalues[0]))


def _correlation_spectrum(fields: np.ndarray, gram) -> PodSpectrum:
    m = fields.shape[0]
    corr = (fields @ (gram @ fields.T)) / m
    corr = 0.5 * (corr + corr.T)
    eigvals, eigvecs = np.linalg.eigh(corr)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    eigvecs = eigvecs[:, order]
    total = eigvals.sum()
    if total > 0.0:
        cumulative = np.cumsum(eigvals) / total
    else:
        cumulative = np.zeros(m)
    return PodSpectrum(
        eigenvalues=eigvals, eigenvectors=eigvecs, cumulative_energy=cumulative
    )


class Pod(BaseEstimator):
    """Proper orthogonal decomposition in a weighted inner product.

    Parameters
    ----------
    gram : sparse or dense SPD matrix defining the inner product; None
        means the Euclidean inner product.
    n_components : fixed basis size; mutually exclusive with `energy`.
    energy : retain the smallest N whose cumulative energy ratio
        reaches this threshold.
    rank_tol : relative eigenvalue cutoff defining the numerical rank.

    With neither `n_components` nor `energy` set, fit keeps the full
    numerical rank.
    """

    def __init__(self, gram=None, n_components=None, energy=None,
                 rank_tol=RANK_TOL):
        self.gram = gram
        self.n_components = n_components
        self.energy = energy
        self.rank_tol = rank_tol

    def _gram(self, n_free: int):
        if self.gram is None:
            return sp.identity(n_free, format="csr")
        return self.gram

    def fit(self, X, y=None):
        """X holds one snapshot per row, shape (M, n_free)."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1:
            raise InvalidArgument("snapshot matrix must be 2-D with M >= 1 rows")
        if self.n_components is not None and self.energy is not None:
            raise InvalidArgument("set either n_components or energy, not both")
        gram = self._gram(X.shape[1])

        spectrum = _correlation_spectrum(X, gram)
        rank = spectrum.numerical_rank(self.rank_tol)
        if self.n_components is not None:
            n = int(self.n_components)
            if n < 1:
                raise InvalidArgument(f"n_components must be >= 1, got {n}")
            if n > rank:
                raise RankDeficientError(
                    f"requested {n} modes but numerical rank is {rank}"
                )
        elif self.energy is not None:
            if not 0.0 < self.energy <= 1.0:
                raise InvalidArgument("energy threshold must be in (0, 1]")
            if rank == 0:
                raise RankDeficientError("snapshot set has rank 0")
            reached = np.nonzero(spectrum.cumulative_energy >= self.energy)[0]
            n = int(reached[0]) + 1 if reached.size else rank
            n = min(n, rank)
        else:
            if rank == 0:
                raise RankDeficientError("snapshot set has rank 0")
            n = rank

        m = X.shape[0]
        lam = spectrum.eigenvalues[:n]
        # xi_i = (1/sqrt(M)) sum_m (v_i)_m psi_m has norm sqrt(lambda_i);
        # scale exactly, then clean up round-off by Gram-Schmidt.
        raw = X.T @ spectrum.eigenvectors[:, :n]
        raw /= np.sqrt(m * lam)[None, :]
        basis, dropped = orthonormalize(raw, gram)
        if dropped:
            raise RankDeficientError(
                f"modes {dropped} degenerate after orthonormalization"
            )

        self.spectrum_ = spectrum
        self.eigenvalues_ = spectrum.eigenvalues
        self.cumulative_energy_ = spectrum.cumulative_energy
        self.basis_ = basis
        self.n_components_ = n
        self.gram_ = gram
        return self

    def transform(self, X):
        """Project rows of X onto the basis: coefficients (M, N)."""
        X = np.asarray(X, dtype=np.float64)
        return X @ (self.gram_ @ self.basis_.vectors)

    def inverse_transform(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.float64)
        return coeffs @ self.basis_.vectors.T

    def fit_transform(self, X, y=None):
        return self.fit(X).transform(X)


def project_coefficients(fields: np.ndarray, basis: ReducedBasis, gram) -> np.ndarray:
    """V-inner products of each field row with each basis vector."""
    fields = np.asarray(fields, dtype=np.float64)
    return fields @ (gram @ basis.vectors)


def kolmogorov_proxy(fields: np.ndarray, basis: ReducedBasis, gram) -> np.ndarray:
    """Worst best-approximation error over the snapshot set, per size.

    Entry n is max_m of the V-norm of psi_m minus its projection onto
    the leading n basis vectors, for n = 0 .. basis.dim.
    """
    fields = np.asarray(fields, dtype=np.float64)
    coeffs = project_coefficients(fields, basis, gram)
    curve = np.empty(basis.dim + 1)
    for n in range(basis.dim + 1):
        residual = fields - coeffs[:, :n] @ basis.vectors[:, :n].T
        sq = np.einsum("mi,mi->m", residual, (gram @ residual.T).T)
        curve[n] = np.sqrt(max(float(sq.max()), 0.0))
    return curve
