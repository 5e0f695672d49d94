"""Input validation helpers used across the public API."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument

MU0_RANGE = (0.1, 10.0)
MU1_RANGE = (-1.0, 1.0)


def check_mu(mu) -> tuple[float, float]:
    """Validate a parameter point against the admissible box.

    Accepts any 2-sequence (mu0, mu1) and returns it as a float tuple.
    """
    try:
        mu0, mu1 = (float(mu[0]), float(mu[1]))
    except (TypeError, IndexError, ValueError) as exc:
        raise InvalidArgument(f"mu must be a (mu0, mu1) pair, got {mu!r}") from exc
    if not np.isfinite(mu0) or not np.isfinite(mu1):
        raise InvalidArgument(f"mu must be finite, got ({mu0}, {mu1})")
    if not MU0_RANGE[0] <= mu0 <= MU0_RANGE[1]:
        raise InvalidArgument(
            f"mu0={mu0} outside admissible range [{MU0_RANGE[0]}, {MU0_RANGE[1]}]"
        )
    if not MU1_RANGE[0] <= mu1 <= MU1_RANGE[1]:
        raise InvalidArgument(
            f"mu1={mu1} outside admissible range [{MU1_RANGE[0]}, {MU1_RANGE[1]}]"
        )
    return mu0, mu1


def as_matrix(values, name: str = "array") -> np.ndarray:
    """Coerce to a 2-D float64 array with finite entries."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidArgument(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgument(f"{name} contains non-finite entries")
    return arr


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    value = int(value)
    if value < minimum:
        raise InvalidArgument(f"{name} must be >= {minimum}, got {value}")
    return value


def symmetry_gap(mat) -> float:
    """Max absolute difference between a sparse/dense matrix and its transpose."""
    diff = mat - mat.T
    if hasattr(diff, "toarray"):
        data = diff.data
        return float(np.max(np.abs(data))) if data.size else 0.0
    return float(np.max(np.abs(diff))) if diff.size else 0.0
