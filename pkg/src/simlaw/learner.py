"""Learning incomplete-similarity exponents from dimensionless data.

The model ties together:
  * learnable exponents: a prefactor exponent per scaling quantity
    (xi_target) and an argument exponent table (xi_matrix);
  * a small dense subnet approximating the logarithm of the unknown
    dimensionless law on the renormalized arguments.

For a log-row (log Pi, log Pi_1..Pi_l) split into retained arguments and
scaling variables, the prediction is

    log Pi^ = -sum_k xi_target[k] * log Pi_k
              + subnet(standardize(exp(log Pi_j + sum_k xi_matrix[j, k] log Pi_k)))

and training minimizes the mean squared residual against log Pi with
Adam over shuffled minibatches. Everything is seeded and single-threaded,
so a fixed config reproduces bit-identical results.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .errors import (
    DegenerateBins,
    NonFiniteGradient,
    NonFiniteLoss,
    SimlawError,
)
from .rational import snap_str

# Guard for degenerate per-argument spread when standardizing subnet inputs.
STD_FLOOR = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters.

    The defaults follow the source architecture: renormalized arguments
    feed the subnet raw through the exponential layer. Raw arguments are
    load-bearing, not just faithful: while large they saturate the first
    layer, so the loss can only improve by moving the exponents, which is
    exactly what drives the collapse. standardize_inputs=True instead
    applies a frozen log-space standardization (a fixed power transform of
    the arguments, absorbed into the learned law) for stability
    experiments on wilder data.
    """

    epochs: int
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    adam_epsilon: float = 1e-8
    seed: int = 0
    hidden: tuple = (64, 64)
    xi_init: float = 0.0
    exp_arguments: bool = True
    standardize_inputs: bool = False

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.epochs < 1:
            raise SimlawError("epochs must be >= 1")
        if self.learning_rate <= 0.0:
            raise SimlawError("learning_rate must be positive")
        if self.batch_size < 1:
            raise SimlawError("batch_size must be >= 1")
        if any(h < 1 for h in self.hidden):
            raise SimlawError("hidden layer widths must be >= 1")

    def to_dict(self):
        return {
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "adam_epsilon": self.adam_epsilon,
            "seed": self.seed,
            "hidden": list(self.hidden),
            "xi_init": self.xi_init,
            "exp_arguments": self.exp_arguments,
            "standardize_inputs": self.standardize_inputs,
        }

    @classmethod
    def from_dict(cls, mapping):
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(mapping) - known
        if unknown:
            raise SimlawError(f"unknown train config keys: {sorted(unknown)}")
        return cls(**mapping)


class ExponentModel:
    """Learnable exponents plus the dense subnet and its frozen input stats."""

    def __init__(self, xi_matrix, xi_target, weights, biases, input_mean, input_std,
                 exp_arguments=True):
        self.xi_matrix = np.ascontiguousarray(xi_matrix, dtype=float)
        self.xi_target = np.ascontiguousarray(xi_target, dtype=float)
        self.weights = [np.ascontiguousarray(w, dtype=float) for w in weights]
        self.biases = [np.ascontiguousarray(b, dtype=float) for b in biases]
        self.input_mean = np.ascontiguousarray(input_mean, dtype=float)
        self.input_std = np.ascontiguousarray(input_std, dtype=float)
        self.exp_arguments = bool(exp_arguments)
        n, s = self.xi_matrix.shape
        if self.xi_target.shape != (s,):
            raise SimlawError("xi_target length must match xi_matrix columns")
        if self.weights[0].shape[0] != n or self.weights[-1].shape[1] != 1:
            raise SimlawError("subnet must map the retained arguments to one output")

    @property
    def n_args(self):
        return self.xi_matrix.shape[0]

    @property
    def n_scaling(self):
        return self.xi_matrix.shape[1]

    def parameter_names(self):
        names = ["xi_matrix", "xi_target"]
        for i in range(len(self.weights)):
            names += [f"w{i}", f"b{i}"]
        return names

    def parameter_arrays(self):
        arrays = [self.xi_matrix, self.xi_target]
        for w, b in zip(self.weights, self.biases):
            arrays += [w, b]
        return arrays

    def n_parameters(self):
        return sum(a.size for a in self.parameter_arrays())

    def copy(self):
        return ExponentModel(
            self.xi_matrix.copy(),
            self.xi_target.copy(),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.input_mean.copy(),
            self.input_std.copy(),
            self.exp_arguments,
        )


def initialize_model(n_args, n_scaling, config, rng):
    """Fresh model: exponents at xi_init, weights symmetric-uniform with
    fan-in scaling, biases zero, identity input stats (set later from data)."""
    if n_args < 1:
        raise SimlawError("the learner needs at least one retained argument")
    if n_scaling < 1:
        raise SimlawError("the learner needs at least one scaling variable")
    sizes = [n_args, *config.hidden, 1]
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / math.sqrt(max(fan_in, 1))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    xi_matrix = np.full((n_args, n_scaling), float(config.xi_init))
    xi_target = np.full(n_scaling, float(config.xi_init))
    return ExponentModel(
        xi_matrix, xi_target, weights, biases,
        np.zeros(n_args), np.ones(n_args), config.exp_arguments,
    )


def input_statistics(dataset, xi_matrix):
    """Per-argument mean/std of the log-arguments at the given exponents.

    Computed once from the initial-exponent transformed data and frozen.
    Standardizing in log space (before the exponential layer) keeps the
    subnet inputs well conditioned however far the exponents move: it is
    a fixed power transform of the arguments, absorbed into the black-box
    law without changing what the exponents mean.
    """
    transformed = dataset.log_retained + dataset.log_scaling @ np.asarray(xi_matrix).T
    mean = transformed.mean(axis=0)
    std = transformed.std(axis=0)
    std = np.where(std < STD_FLOOR, 1.0, std)
    return mean, std


def _reference_predict(model, log_ret, log_scl, subnet_log_fn=None):
    """Straightforward numpy forward pass, independent of the kernel
    backends; `subnet_log_fn` may replace the dense subnet by an exact
    law acting on the (unstandardized) renormalized arguments."""
    prefactor = -(log_scl @ model.xi_target)
    log_args = log_ret + log_scl @ model.xi_matrix.T
    if subnet_log_fn is not None:
        return prefactor + subnet_log_fn(np.exp(log_args))
    h = (log_args - model.input_mean) / model.input_std
    if model.exp_arguments:
        h = np.exp(h)
    for w, b in zip(model.weights[:-1], model.biases[:-1]):
        h = np.tanh(h @ w + b)
    y = h @ model.weights[-1] + model.biases[-1]
    return prefactor + y[:, 0]


def forward(model, log_row, subnet_log_fn=None):
    """Predicted log Pi for one dataset log-row.

    Accepts either the full log-row (target first, as stored in
    DimensionlessDataset.logs) or just the argument part.
    """
    log_row = np.asarray(log_row, dtype=float)
    width = model.n_args + model.n_scaling
    if log_row.shape == (width + 1,):
        log_row = log_row[1:]
    elif log_row.shape != (width,):
        raise SimlawError(f"log_row must have {width} (or {width + 1}) entries")
    log_ret = log_row[: model.n_args][None, :]
    log_scl = log_row[model.n_args :][None, :]
    pred = _reference_predict(model, log_ret, log_scl, subnet_log_fn)
    return float(pred[0])


def loss(model, dataset, subnet_log_fn=None):
    """Mean squared residual of the model over a dataset (reference path)."""
    if dataset.n_rows == 0:
        raise SimlawError("batch must be non-empty")
    pred = _reference_predict(model, dataset.log_retained, dataset.log_scaling,
                              subnet_log_fn)
    residual = pred - dataset.log_target
    return float(residual @ residual) / dataset.n_rows


def gradients(model, dataset, backend=None):
    """Gradient of the mean squared residual for every learnable parameter,
    as a dict keyed like parameter_names()."""
    impl = kernels.get_backend(backend) if backend else kernels
    out = impl.loss_and_grads(
        model.xi_matrix, model.xi_target, model.weights, model.biases,
        model.input_mean, model.input_std, model.exp_arguments,
        np.ascontiguousarray(dataset.log_retained),
        np.ascontiguousarray(dataset.log_scaling),
        np.ascontiguousarray(dataset.log_target),
    )
    _, d_xi_m, d_xi_t, d_ws, d_bs = out
    grads = {"xi_matrix": np.asarray(d_xi_m), "xi_target": np.asarray(d_xi_t)}
    for i, (dw, db) in enumerate(zip(d_ws, d_bs)):
        grads[f"w{i}"] = np.asarray(dw)
        grads[f"b{i}"] = np.asarray(db)
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient(f"non-finite gradient in {name}")
    return grads


@dataclass(frozen=True)
class FitResult:
    xi_matrix: np.ndarray
    xi_target: np.ndarray
    final_loss: float
    loss_history: list
    seed: int
    config: TrainConfig
    backend: str
    model: ExponentModel = field(repr=False, compare=False)

    def to_dict(self):
        return {
            "xi_matrix": self.xi_matrix.tolist(),
            "xi_target": self.xi_target.tolist(),
            "xi_matrix_snapped": [[snap_str(v) for v in row] for row in self.xi_matrix],
            "xi_target_snapped": [snap_str(v) for v in self.xi_target],
            "final_loss": self.final_loss,
            "initial_loss": self.loss_history[0] if self.loss_history else None,
            "loss_history": list(self.loss_history),
            "seed": self.seed,
            "config": self.config.to_dict(),
            "backend": self.backend,
        }


def train(dataset, config, backend=None):
    """Fit exponents and subnet to a dataset with Adam.

    Deterministic for a fixed config: seeded init, seeded shuffling, fixed
    single-threaded update order. Returns the fitted exponents together
    with the per-epoch mean training loss.
    """
    impl = kernels.get_backend(backend) if backend else kernels
    rng = np.random.default_rng(config.seed)
    model = initialize_model(dataset.n_retained, dataset.n_scaling, config, rng)
    if config.standardize_inputs:
        mean, std = input_statistics(dataset, model.xi_matrix)
        model.input_mean[:] = mean
        model.input_std[:] = std

    params = model.parameter_arrays()
    m_state = [np.zeros_like(p) for p in params]
    v_state = [np.zeros_like(p) for p in params]
    n_rows = dataset.n_rows
    batch_size = min(config.batch_size, n_rows)
    log_ret = dataset.log_retained
    log_scl = dataset.log_scaling
    log_tgt = dataset.log_target

    history = []
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(n_rows)
        epoch_loss = 0.0
        for start in range(0, n_rows, batch_size):
            idx = order[start : start + batch_size]
            batch_loss, d_xi_m, d_xi_t, d_ws, d_bs = impl.loss_and_grads(
                model.xi_matrix, model.xi_target, model.weights, model.biases,
                model.input_mean, model.input_std, model.exp_arguments,
                np.ascontiguousarray(log_ret[idx]),
                np.ascontiguousarray(log_scl[idx]),
                np.ascontiguousarray(log_tgt[idx]),
            )
            if not math.isfinite(batch_loss):
                raise NonFiniteLoss(
                    f"training loss diverged at epoch {epoch}", epoch=epoch
                )
            grads = [np.asarray(d_xi_m), np.asarray(d_xi_t)]
            for dw, db in zip(d_ws, d_bs):
                grads += [np.asarray(dw), np.asarray(db)]
            step += 1
            corr1 = 1.0 - config.beta1**step
            corr2 = 1.0 - config.beta2**step
            for p, g, m1, v1 in zip(params, grads, m_state, v_state):
                m1 *= config.beta1
                m1 += (1.0 - config.beta1) * g
                v1 *= config.beta2
                v1 += (1.0 - config.beta2) * g * g
                p -= config.learning_rate * (m1 / corr1) / (
                    np.sqrt(v1 / corr2) + config.adam_epsilon
                )
            epoch_loss += batch_loss * idx.size
        history.append(epoch_loss / n_rows)

    return FitResult(
        xi_matrix=model.xi_matrix.copy(),
        xi_target=model.xi_target.copy(),
        final_loss=history[-1],
        loss_history=history,
        seed=config.seed,
        config=config,
        backend=impl.NAME if backend else kernels.BACKEND,
        model=model.copy(),
    )


@dataclass(frozen=True)
class CollapseTable:
    """Renormalized coordinates: one column per retained argument
    (Pi'_j = Pi_j * prod Pi_k**xi_matrix[j,k]) and, last, the collapsed
    target Pi * prod Pi_k**xi_target[k]."""

    columns: tuple
    values: np.ndarray


def collapse(dataset, xi_matrix, xi_target):
    """Renormalize a dataset's coordinates with the given exponents."""
    xi_matrix = np.atleast_2d(np.asarray(xi_matrix, dtype=float))
    xi_target = np.atleast_1d(np.asarray(xi_target, dtype=float))
    n = dataset.n_retained
    if xi_matrix.shape != (n, dataset.n_scaling) or xi_target.shape != (dataset.n_scaling,):
        raise SimlawError(
            f"exponent shapes {xi_matrix.shape}/{xi_target.shape} do not match "
            f"the dataset partition ({n} retained, {dataset.n_scaling} scaling)"
        )
    if not (np.all(np.isfinite(xi_matrix)) and np.all(np.isfinite(xi_target))):
        raise SimlawError("exponents must be finite")
    log_args = dataset.log_retained + dataset.log_scaling @ xi_matrix.T
    log_collapsed = dataset.log_target + dataset.log_scaling @ xi_target
    values = np.exp(np.column_stack([log_args, log_collapsed]))
    columns = tuple(f"{dataset.columns[1 + j]}_renorm" for j in range(n))
    columns += (f"{dataset.columns[0]}_renorm",)
    return CollapseTable(columns, values)


def collapse_quality(table, bins):
    """Collapse metric in [0, 1]-ish: mean within-bin standard deviation of
    the renormalized target over log-spaced abscissa bins, divided by its
    global standard deviation. 0 means a perfect single-curve collapse.
    Multi-argument tables are binned per axis (cells)."""
    if bins < 1:
        raise SimlawError("bins must be >= 1")
    values = np.asarray(table.values, dtype=float)
    if values.shape[0] == 0:
        raise SimlawError("table must be non-empty")
    ordinate = values[:, -1]
    global_std = float(ordinate.std())
    if global_std == 0.0:
        # Constant data is trivially collapsed.
        return 0.0

    n_axes = values.shape[1] - 1
    cell = np.zeros(values.shape[0], dtype=np.int64)
    for axis in range(n_axes):
        x = values[:, axis]
        lo, hi = x.min(), x.max()
        if lo == hi:
            continue
        edges = np.geomspace(lo, hi, bins + 1)
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, bins - 1)
        cell = cell * bins + idx

    within = []
    for key in np.unique(cell):
        members = ordinate[cell == key]
        if members.size >= 2:
            within.append(float(members.std()))
    if not within:
        raise DegenerateBins(
            "no abscissa bin holds two or more rows; use fewer bins"
        )
    return float(np.mean(within)) / global_std
