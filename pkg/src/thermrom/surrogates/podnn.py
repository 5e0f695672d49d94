"""Field surrogate mapping parameters to POD coefficients with a small
feedforward network.

The network sees min-max-normalized inputs (conductivity through log10
first) and per-component standardized coefficients; both normalizations
are frozen at fit time and stored with the surrogate.
"""

from __future__ import annotations

import time

import numpy as np
from sklearn.base import BaseEstimator

from .._validation import check_mu
from ..basis import Pod
from .common import ParameterScaler, PredictionInfo
from .mlp import Mlp
from .podrbf import EXTRAPOLATION_WARNING, _check_mode_count, _check_training_set

# Named network configurations.  "large-tanh" is recorded for reference
# only; nothing in the test suite trains at that size.
PRESETS = {
    "large-tanh": {
        "hidden_layers": (1300, 1300, 1300),
        "activation": "tanh",
        "learning_rate": 1e-6,
    },
}


class PodNn(BaseEstimator):
    """Global POD basis with a network regressing the coefficients.

    Parameters
    ----------
    gram : SPD matrix defining the inner product for the POD.
    dof_map : optional map used to expand predictions to the full mesh.
    n_components, energy : basis-size controls forwarded to the POD.
    hidden_layers, activation, learning_rate, epochs, seed : network
        hyperparameters forwarded to the regressor.
    """

    def __init__(self, gram=None, dof_map=None, n_components=None,
                 energy=None, hidden_layers=(16,), activation="tanh",
                 learning_rate=1e-2, epochs=1000, seed=0):
        self.gram = gram
        self.dof_map = dof_map
        self.n_components = n_components
        self.energy = energy
        self.hidden_layers = hidden_layers
        self.activation = activation
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.seed = seed

    def fit(self, X, y):
        """X: (M, 2) parameters; y: (M, n_free) snapshot fields."""
        X, y = _check_training_set(X, y)
        pod = Pod(gram=self.gram, n_components=self.n_components,
                  energy=self.energy).fit(y)
        coeffs = pod.transform(y)

        mean = coeffs.mean(axis=0)
        std = coeffs.std(axis=0)
        std = np.where(std > 1e-300, std, 1.0)

        scaler = ParameterScaler().fit(X)
        net = Mlp(hidden_layers=self.hidden_layers,
                  activation=self.activation,
                  learning_rate=self.learning_rate,
                  epochs=self.epochs, seed=self.seed)
        net.fit(scaler.transform(X), (coeffs - mean) / std)

        self.pod_ = pod
        self.scaler_ = scaler
        self.net_ = net
        self.coeff_mean_ = mean
        self.coeff_std_ = std
        self.n_components_ = pod.n_components_
        self.loss_history_ = net.loss_history_
        self.final_loss_ = net.final_loss_
        self.training_parameters_ = X
        return self

    def coefficients(self, mu, n=None) -> np.ndarray:
        """Network-predicted basis coefficients at one parameter point."""
        mu = check_mu(mu)
        n = _check_mode_count(n, self.n_components_)
        query = self.scaler_.transform(np.asarray(mu)[None, :])
        normalized = np.atleast_2d(self.net_.predict(query))[0]
        return (normalized * self.coeff_std_ + self.coeff_mean_)[:n]

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
        warnings = []
        if self.scaler_.outside_training_box(check_mu(mu)):
            warnings.append(EXTRAPOLATION_WARNING)
        return PredictionInfo(field=field, warnings=warnings,
                              online_ms=elapsed_ms)
