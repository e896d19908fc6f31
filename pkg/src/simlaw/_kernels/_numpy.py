"""Numpy implementation of the training kernels.

Both backends share one contract: model parameters arrive as plain
arrays, batches as C-contiguous log-value arrays, and the gradient of
the mean squared residual is returned in the same layout as the
parameters. Keeping the reduction order fixed (plain matmul/sum) makes
repeated runs bit-identical.
"""

import numpy as np

from ..errors import NonFiniteActivation

NAME = "numpy"


def _arguments(xi_matrix, mean, std, exp_args, log_ret, log_scl):
    # Standardization is affine in log space (scale-equivariant), applied
    # before the exponential layer.
    p = (log_ret + log_scl @ xi_matrix.T - mean) / std
    if exp_args:
        z = np.exp(p)
        bad = ~np.isfinite(z)
        if bad.any():
            row = int(np.argmax(bad.any(axis=1)))
            raise NonFiniteActivation(
                f"overflow in the exponential argument layer (batch row {row})",
                row=row,
            )
    else:
        z = p
    return z


def forward(xi_matrix, xi_target, weights, biases, mean, std, exp_args, log_ret, log_scl):
    """Predicted log Pi for a batch of log rows."""
    prefactor = -(log_scl @ xi_target)
    h = _arguments(xi_matrix, mean, std, exp_args, log_ret, log_scl)
    for w, b in zip(weights[:-1], biases[:-1]):
        h = np.tanh(h @ w + b)
    y = h @ weights[-1] + biases[-1]
    return prefactor + y[:, 0]


def loss_and_grads(
    xi_matrix, xi_target, weights, biases, mean, std, exp_args, log_ret, log_scl, log_tgt
):
    """Mean squared residual over the batch and its gradient w.r.t. every
    learnable parameter: (loss, d_xi_matrix, d_xi_target, d_weights, d_biases)."""
    n_rows = log_tgt.shape[0]
    prefactor = -(log_scl @ xi_target)
    z = _arguments(xi_matrix, mean, std, exp_args, log_ret, log_scl)

    activations = [z]
    for w, b in zip(weights[:-1], biases[:-1]):
        activations.append(np.tanh(activations[-1] @ w + b))
    y = activations[-1] @ weights[-1] + biases[-1]
    residual = prefactor + y[:, 0] - log_tgt
    loss = float(residual @ residual) / n_rows

    d_pred = (2.0 / n_rows) * residual
    d_xi_target = -(log_scl.T @ d_pred)

    d_weights = [None] * len(weights)
    d_biases = [None] * len(biases)
    d_out = d_pred[:, None]
    d_weights[-1] = activations[-1].T @ d_out
    d_biases[-1] = d_out.sum(axis=0)
    d_h = d_out @ weights[-1].T
    for i in range(len(weights) - 2, -1, -1):
        d_pre = d_h * (1.0 - activations[i + 1] ** 2)
        d_weights[i] = activations[i].T @ d_pre
        d_biases[i] = d_pre.sum(axis=0)
        d_h = d_pre @ weights[i].T

    # z = exp((p - mean)/std) gives dp = dz * z / std; without the
    # exponential layer, dp = dz / std.
    d_z = d_h
    d_p = (d_z * z if exp_args else d_z) / std
    d_xi_matrix = d_p.T @ log_scl
    return loss, d_xi_matrix, d_xi_target, d_weights, d_biases
