"""Data-driven field surrogates: radial-basis interpolation and a
small feedforward network on top of POD coefficients."""

from .common import ParameterScaler, PredictionInfo
from .mlp import Mlp
from .podnn import PRESETS, PodNn
from .podrbf import EXTRAPOLATION_WARNING, LocalPodRbf, PodRbf
from .rbf import RbfInterpolant

__all__ = [
    "EXTRAPOLATION_WARNING",
    "LocalPodRbf",
    "Mlp",
    "ParameterScaler",
    "PodNn",
    "PodRbf",
    "PredictionInfo",
    "PRESETS",
    "RbfInterpolant",
]
