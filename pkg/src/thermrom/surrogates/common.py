"""Shared pieces for the field surrogates: parameter scaling and the
prediction-with-diagnostics return type."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._validation import as_matrix
from ..errors import InvalidArgument


def scale_axis(values, lo: float, hi: float) -> np.ndarray:
    """Affine map of [lo, hi] onto [-1, 1]; degenerate ranges map to 0."""
    values = np.asarray(values, dtype=np.float64)
    if hi - lo <= 0.0:
        return np.zeros_like(values)
    return 2.0 * (values - lo) / (hi - lo) - 1.0


class ParameterScaler:
    """Normalizes (conductivity, flux) pairs for interpolation.

    The conductivity axis spans two decades, so it is taken through
    log10 before the min-max map to [-1, 1]; the flux axis is min-max
    scaled directly.  Ranges are frozen at fit time so queries can be
    checked for extrapolation.
    """

    def fit(self, params) -> "ParameterScaler":
        params = as_matrix(params, "parameters")
        if params.shape[1] != 2:
            raise InvalidArgument(
                f"parameters must have 2 columns, got {params.shape[1]}"
            )
        if np.any(params[:, 0] <= 0.0):
            raise InvalidArgument("conductivity values must be positive")
        log_mu0 = np.log10(params[:, 0])
        self.log_mu0_range_ = (float(log_mu0.min()), float(log_mu0.max()))
        self.mu1_range_ = (float(params[:, 1].min()), float(params[:, 1].max()))
        return self

    def transform(self, params) -> np.ndarray:
        params = as_matrix(params, "parameters")
        scaled = np.empty_like(params)
        scaled[:, 0] = self.transform_mu0(params[:, 0])[:, 0]
        scaled[:, 1] = scale_axis(params[:, 1], *self.mu1_range_)
        return scaled

    def transform_mu0(self, mu0_values) -> np.ndarray:
        """Scaled log-conductivity as a single-column matrix."""
        mu0_values = np.asarray(mu0_values, dtype=np.float64)
        if np.any(mu0_values <= 0.0):
            raise InvalidArgument("conductivity values must be positive")
        scaled = scale_axis(np.log10(mu0_values), *self.log_mu0_range_)
        return scaled.reshape(-1, 1)

    def outside_training_box(self, mu) -> bool:
        mu0, mu1 = float(mu[0]), float(mu[1])
        lo0, hi0 = self.log_mu0_range_
        lo1, hi1 = self.mu1_range_
        pad = 1e-12
        return (
            np.log10(mu0) < lo0 - pad
            or np.log10(mu0) > hi0 + pad
            or mu1 < lo1 - pad
            or mu1 > hi1 + pad
        )


@dataclass
class PredictionInfo:
    """A predicted field plus the diagnostics a caller may surface."""

    field: np.ndarray
    warnings: list = field(default_factory=list)
    online_ms: float = 0.0
