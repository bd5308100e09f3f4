"""Single-hidden-layer tanh approximator with analytic gradients.

The network computes ``f(x) = a0 + sum_j a_j * tanh(b_j + sum_i W[j,i] x_i)``.
Gradients are provided both with respect to the inputs (for the Jacobian
chain) and with respect to the flattened coefficient vector (for the
least-squares fitter).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NetworkParams:
    """Coefficients of the approximator.

    ``input_weights`` has shape (q, m): row j feeds hidden unit j, column i
    multiplies input lag i. ``hidden_biases`` and ``output_weights`` have
    length q; ``output_bias`` is scalar.
    """

    input_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    output_bias: float

    def __post_init__(self):
        W = np.array(self.input_weights, dtype=float)
        b = np.array(self.hidden_biases, dtype=float)
        a = np.array(self.output_weights, dtype=float)
        if W.ndim != 2:
            raise ValueError("input_weights must be a (q, m) matrix")
        q = W.shape[0]
        if b.shape != (q,) or a.shape != (q,):
            raise ValueError("hidden_biases and output_weights must have length q")
        for arr in (W, b, a):
            if not np.all(np.isfinite(arr)):
                raise ValueError("network coefficients must be finite")
            arr.flags.writeable = False
        if not np.isfinite(self.output_bias):
            raise ValueError("network coefficients must be finite")
        object.__setattr__(self, "input_weights", W)
        object.__setattr__(self, "hidden_biases", b)
        object.__setattr__(self, "output_weights", a)
        object.__setattr__(self, "output_bias", float(self.output_bias))

    @property
    def m(self) -> int:
        return int(self.input_weights.shape[1])

    @property
    def q(self) -> int:
        return int(self.input_weights.shape[0])

    @property
    def n_params(self) -> int:
        return self.q * self.m + 2 * self.q + 1

    def to_dict(self) -> dict:
        return {
            "input_weights": self.input_weights.tolist(),
            "hidden_biases": self.hidden_biases.tolist(),
            "output_weights": self.output_weights.tolist(),
            "output_bias": self.output_bias,
            "m": self.m,
            "q": self.q,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkParams":
        return cls(
            input_weights=np.asarray(d["input_weights"], dtype=float),
            hidden_biases=np.asarray(d["hidden_biases"], dtype=float),
            output_weights=np.asarray(d["output_weights"], dtype=float),
            output_bias=float(d["output_bias"]),
        )


def _check_input(params: NetworkParams, x: np.ndarray, batch: bool) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    want = (x.ndim == 2) if batch else (x.ndim == 1)
    if not want or x.shape[-1] != params.m:
        raise ValueError(
            f"input has shape {x.shape}, expected {'(n, %d)' % params.m if batch else '(%d,)' % params.m}"
        )
    return x


def forward(params: NetworkParams, x) -> float:
    """Evaluate the network at one input vector of length m."""
    x = _check_input(params, x, batch=False)
    h = np.tanh(params.input_weights @ x + params.hidden_biases)
    return float(params.output_weights @ h + params.output_bias)


def predict(params: NetworkParams, X) -> np.ndarray:
    """Evaluate the network at every row of an (n, m) matrix."""
    X = _check_input(params, X, batch=True)
    H = np.tanh(X @ params.input_weights.T + params.hidden_biases)
    return H @ params.output_weights + params.output_bias


def input_gradient(params: NetworkParams, x) -> np.ndarray:
    """Gradient of ``forward`` with respect to the inputs (length m)."""
    x = _check_input(params, x, batch=False)
    h = np.tanh(params.input_weights @ x + params.hidden_biases)
    return (params.output_weights * (1.0 - h * h)) @ params.input_weights


def input_gradients(params: NetworkParams, X) -> np.ndarray:
    """Input gradients at every row of an (n, m) matrix, shape (n, m)."""
    X = _check_input(params, X, batch=True)
    H = np.tanh(X @ params.input_weights.T + params.hidden_biases)
    return (params.output_weights * (1.0 - H * H)) @ params.input_weights


def parameter_gradient(params: NetworkParams, x) -> np.ndarray:
    """Gradient of ``forward`` with respect to the flattened coefficients.

    Flattening order: input_weights row-major, hidden_biases,
    output_weights, output_bias (see :func:`flatten_params`).
    """
    x = _check_input(params, x, batch=False)
    return parameter_jacobian(params, x[None, :])[0]


def parameter_jacobian(params: NetworkParams, X) -> np.ndarray:
    """Rows of parameter gradients for every input row; shape (n, n_params)."""
    X = _check_input(params, X, batch=True)
    n = X.shape[0]
    H = np.tanh(X @ params.input_weights.T + params.hidden_biases)
    AG = params.output_weights * (1.0 - H * H)  # (n, q)
    dW = AG[:, :, None] * X[:, None, :]  # (n, q, m)
    return np.concatenate(
        [dW.reshape(n, -1), AG, H, np.ones((n, 1))], axis=1
    )


def flatten_params(params: NetworkParams) -> np.ndarray:
    """Flatten coefficients to one vector in the canonical order."""
    return np.concatenate(
        [
            params.input_weights.ravel(),
            params.hidden_biases,
            params.output_weights,
            [params.output_bias],
        ]
    )


def unflatten_params(theta, m: int, q: int) -> NetworkParams:
    """Inverse of :func:`flatten_params` for known dimensions."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (q * m + 2 * q + 1,):
        raise ValueError(f"theta has length {theta.size}, expected {q * m + 2 * q + 1}")
    W = theta[: q * m].reshape(q, m)
    b = theta[q * m : q * m + q]
    a = theta[q * m + q : q * m + 2 * q]
    return NetworkParams(W, b, a, float(theta[-1]))
