"""Small feedforward network trained by full-batch gradient descent.

Hidden layers share one activation (tanh, relu or sigmoid); the output
layer is linear.  The loss is the mean squared error over all output
entries and the update is plain gradient descent, w <- w - lr * dL/dw,
with no momentum or adaptive schemes.  Initialization is deterministic
from the seed.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .._validation import as_matrix
from ..errors import InvalidArgument, TrainingDivergedError

ACTIVATIONS = ("tanh", "relu", "sigmoid")


def _activation(name: str):
    if name == "tanh":
        return np.tanh, lambda z, a: 1.0 - a * a
    if name == "relu":
        return (
            lambda z: np.maximum(z, 0.0),
            lambda z, a: (z > 0.0).astype(np.float64),
        )
    if name == "sigmoid":
        def sig(z):
            with np.errstate(over="ignore"):
                return 1.0 / (1.0 + np.exp(-z))

        return sig, lambda z, a: a * (1.0 - a)
    raise InvalidArgument(f"activation must be one of {ACTIVATIONS}, got {name!r}")


class Mlp(BaseEstimator):
    """Feedforward regressor with hand-rolled backpropagation.

    Parameters
    ----------
    hidden_layers : tuple of hidden widths; empty means pure linear.
    activation : hidden-layer nonlinearity.
    learning_rate : gradient-descent step size.
    epochs : number of full-batch updates.
    seed : RNG seed for the initial weights.
    """

    def __init__(self, hidden_layers=(16,), activation="tanh",
                 learning_rate=1e-2, epochs=1000, seed=0):
        self.hidden_layers = hidden_layers
        self.activation = activation
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.seed = seed

    def _init_params(self, n_in: int, n_out: int):
        sizes = [n_in, *map(int, self.hidden_layers), n_out]
        rng = np.random.default_rng(self.seed)
        weights = []
        biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            scale = np.sqrt(1.0 / fan_in)
            weights.append(scale * rng.standard_normal((fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return sizes, weights, biases

    def _forward_pass(self, X, weights, biases):
        """Returns per-layer pre-activations and activations."""
        act, _ = _activation(self.activation)
        zs = []
        activations = [X]
        a = X
        last = len(weights) - 1
        for k, (w, b) in enumerate(zip(weights, biases)):
            z = a @ w + b
            zs.append(z)
            a = z if k == last else act(z)
            activations.append(a)
        return zs, activations

    def _gradients(self, X, y, weights, biases):
        """Analytic MSE gradients for all layers, plus the loss."""
        _, act_grad = _activation(self.activation)
        zs, activations = self._forward_pass(X, weights, biases)
        pred = activations[-1]
        diff = pred - y
        with np.errstate(over="ignore", invalid="ignore"):
            loss = float(np.mean(diff * diff))
        if not np.isfinite(loss):
            return loss, None, None

        grad_w = [None] * len(weights)
        grad_b = [None] * len(biases)
        delta = 2.0 * diff / diff.size
        for k in range(len(weights) - 1, -1, -1):
            grad_w[k] = activations[k].T @ delta
            grad_b[k] = delta.sum(axis=0)
            if k > 0:
                delta = (delta @ weights[k].T) * act_grad(
                    zs[k - 1], activations[k]
                )
        return loss, grad_w, grad_b

    def fit(self, X, y):
        X = as_matrix(X, "inputs")
        y = np.asarray(y, dtype=np.float64)
        self._squeeze = y.ndim == 1
        if self._squeeze:
            y = y[:, None]
        if y.shape[0] != X.shape[0]:
            raise InvalidArgument(
                f"{X.shape[0]} input rows but {y.shape[0]} target rows"
            )
        epochs = int(self.epochs)
        if epochs < 0:
            raise InvalidArgument(f"epochs must be >= 0, got {epochs}")
        if self.activation not in ACTIVATIONS:
            raise InvalidArgument(
                f"activation must be one of {ACTIVATIONS}, got "
                f"{self.activation!r}"
            )

        sizes, weights, biases = self._init_params(X.shape[1], y.shape[1])
        lr = float(self.learning_rate)
        history = np.empty(epochs)
        for epoch in range(epochs):
            loss, grad_w, grad_b = self._gradients(X, y, weights, biases)
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"loss became non-finite at epoch {epoch}"
                )
            history[epoch] = loss
            for k in range(len(weights)):
                weights[k] -= lr * grad_w[k]
                biases[k] -= lr * grad_b[k]

        self.layer_sizes_ = sizes
        self.weights_ = weights
        self.biases_ = biases
        self.loss_history_ = history
        self.final_loss_ = self._gradients(X, y, weights, biases)[0]
        return self

    def predict(self, X):
        X = as_matrix(X, "inputs")
        if X.shape[1] != self.layer_sizes_[0]:
            raise InvalidArgument(
                f"input dimension {X.shape[1]} does not match network "
                f"input size {self.layer_sizes_[0]}"
            )
        _, activations = self._forward_pass(X, self.weights_, self.biases_)
        out = activations[-1]
        return out[:, 0] if self._squeeze else out

    def loss_and_gradients(self, X, y):
        """Loss and analytic gradients at the current parameters.

        Exposed so gradients can be verified against finite differences.
        """
        X = as_matrix(X, "inputs")
        y = np.asarray(y, dtype=np.float64)
        if y.ndim == 1:
            y = y[:, None]
        return self._gradients(X, y, self.weights_, self.biases_)
