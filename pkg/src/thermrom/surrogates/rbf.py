"""Radial basis function interpolation with an affine polynomial tail.

The interpolant is f(x) = sum_i w_i * phi(|x - x_i|) + c0 + c . x with
the moment constraints sum_i w_i = 0 and sum_i w_i x_i = 0, solved as
one symmetric saddle-point system by dense LU with partial pivoting.
Vector-valued data shares centers and kernel; each output component
gets its own weight and polynomial columns.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator

from .._validation import as_matrix
from ..errors import InvalidArgument, SingularSystemError

KERNELS = ("thin_plate_spline", "gaussian", "multiquadric")
CONDITION_WARNING = 1e14


def _kernel_matrix(r: np.ndarray, kernel: str, epsilon: float) -> np.ndarray:
    if kernel == "thin_plate_spline":
        # phi(r) = r^2 log r, continuously extended by phi(0) = 0.
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.where(r > 0.0, r * r * np.log(r), 0.0)
        return values
    if kernel == "gaussian":
        return np.exp(-((r / epsilon) ** 2))
    if kernel == "multiquadric":
        return np.sqrt(1.0 + (r / epsilon) ** 2)
    raise InvalidArgument(f"kernel must be one of {KERNELS}, got {kernel!r}")


def _pairwise_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


class RbfInterpolant(BaseEstimator):
    """Exact interpolation of scattered data, sklearn-style.

    Parameters
    ----------
    kernel : one of thin_plate_spline (default, parameter-free),
        gaussian, multiquadric.
    epsilon : shape parameter for the scaled kernels; None picks the
        median inter-center distance at fit time.
    """

    def __init__(self, kernel: str = "thin_plate_spline", epsilon=None):
        self.kernel = kernel
        self.epsilon = epsilon

    def fit(self, X, y):
        X = as_matrix(X, "centers")
        y = np.asarray(y, dtype=np.float64)
        squeeze = y.ndim == 1
        if squeeze:
            y = y[:, None]
        if y.shape[0] != X.shape[0]:
            raise InvalidArgument(
                f"{X.shape[0]} centers but {y.shape[0]} data rows"
            )
        n, d = X.shape
        if n < d + 2:
            raise InvalidArgument(
                f"need at least {d + 2} centers for an affine tail in "
                f"{d} dimensions, got {n}"
            )
        if self.kernel not in KERNELS:
            raise InvalidArgument(
                f"kernel must be one of {KERNELS}, got {self.kernel!r}"
            )

        dist = _pairwise_distance(X, X)
        off_diag = dist[~np.eye(n, dtype=bool)]
        if off_diag.size and off_diag.min() <= 1e-14 * max(1.0, off_diag.max()):
            pair = np.argwhere(
                (dist <= 1e-14 * max(1.0, off_diag.max()))
                & ~np.eye(n, dtype=bool)
            )[0]
            raise SingularSystemError(
                f"coincident centers {pair[0]} and {pair[1]}"
            )

        if self.epsilon is not None:
            epsilon = float(self.epsilon)
            if epsilon <= 0.0:
                raise InvalidArgument(f"epsilon must be positive, got {epsilon}")
        else:
            epsilon = float(np.median(off_diag)) if off_diag.size else 1.0

        phi = _kernel_matrix(dist, self.kernel, epsilon)
        poly = np.column_stack([np.ones(n), X])           # (n, d+1)
        size = n + d + 1
        saddle = np.zeros((size, size))
        saddle[:n, :n] = phi
        saddle[:n, n:] = poly
        saddle[n:, :n] = poly.T
        rhs = np.zeros((size, y.shape[1]))
        rhs[:n] = y

        lu, piv = scipy.linalg.lu_factor(saddle)
        diag = np.abs(np.diag(lu))
        if diag.min() <= 1e-300:
            raise SingularSystemError("saddle system is exactly singular")
        solution = scipy.linalg.lu_solve((lu, piv), rhs)

        self.warnings_: list[str] = []
        condition = np.linalg.cond(saddle)
        if condition > CONDITION_WARNING:
            self.warnings_.append(
                f"interpolation system condition estimate {condition:.2e} "
                f"exceeds {CONDITION_WARNING:.0e}"
            )

        self.centers_ = X.copy()
        self.weights_ = solution[:n]
        self.poly_coeffs_ = solution[n:]
        self.epsilon_ = epsilon
        self.n_outputs_ = y.shape[1]
        self._squeeze = squeeze
        return self

    def predict(self, X):
        X = as_matrix(X, "query points")
        if X.shape[1] != self.centers_.shape[1]:
            raise InvalidArgument(
                f"query dimension {X.shape[1]} does not match centers "
                f"dimension {self.centers_.shape[1]}"
            )
        dist = _pairwise_distance(X, self.centers_)
        phi = _kernel_matrix(dist, self.kernel, self.epsilon_)
        poly = np.column_stack([np.ones(X.shape[0]), X])
        values = phi @ self.weights_ + poly @ self.poly_coeffs_
        return values[:, 0] if self._squeeze else values

    def moment_defect(self) -> tuple[float, float]:
        """Constraint residuals: (|sum w|, |sum w x|) scaled by |w|_1."""
        scale = max(np.abs(self.weights_).sum(), 1e-300)
        zeroth = float(np.max(np.abs(self.weights_.sum(axis=0)))) / scale
        first = float(
            np.max(np.abs(self.centers_.T @ self.weights_))
        ) / scale
        return zeroth, first
