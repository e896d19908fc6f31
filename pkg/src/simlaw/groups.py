"""Scaling groups of dimensionless constructions.

Two kinds of parameter-rescaling groups leave a dimensionless relation
invariant:

* the Buckingham similarity group: one free positive constant per
  independent parameter, with the dependent parameters and the quantity
  of interest picking up compensating power-law factors (basis of
  scale-model experimental design);
* the renormalization group induced by an incomplete similarity: the
  independent parameters stay fixed, one free constant per scaling
  dimensionless quantity rescales the trailing dependent parameters
  directly, and the leading ones pick up compensating factors.

Both reduce to small dense linear systems in the construction exponents;
we solve them with pivot-checked LU and verify the invariance numerically.
"""

from dataclasses import dataclass

import numpy as np

from .dimensions import evaluate_pi, sample_log_vectors
from .errors import (
    NonPositiveConstant,
    SimlawError,
    SingularBeta,
    SingularDimensionMatrix,
    SingularRenormMatrix,
    ZeroTargetExponent,
)
from .linalg import pivot_rank, solve_checked
from .rational import snap_str


def _freeze(array):
    array = np.ascontiguousarray(array, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class BuckinghamGroup:
    """Exponent table of the similarity group: row i of delta_matrix gives
    the exponents of the constants (one per independent parameter) applied
    to dependent parameter i; delta_target does the same for the quantity
    of interest."""

    construction: object
    delta_matrix: np.ndarray
    delta_target: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "delta_matrix", _freeze(self.delta_matrix))
        object.__setattr__(self, "delta_target", _freeze(self.delta_target))

    @property
    def constant_names(self):
        return tuple("A_" + p for p in self.construction.system.independent_params)


@dataclass(frozen=True)
class IncompleteSimilaritySpec:
    """Incomplete-similarity exponents: the first n_retained Pi's stay as
    arguments, the remaining ones become scaling variables.

    xi_matrix[j, k] is the exponent of scaling quantity k attached to
    retained argument j; xi_target[k] is the prefactor exponent, so the
    invariant combination is Pi * prod(Pi_scaling ** xi_target).
    """

    n_retained: int
    xi_matrix: np.ndarray
    xi_target: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "n_retained", int(self.n_retained))
        object.__setattr__(self, "xi_matrix", _freeze(np.atleast_2d(self.xi_matrix)))
        object.__setattr__(self, "xi_target", _freeze(np.atleast_1d(self.xi_target)))
        n = self.n_retained
        if n < 0:
            raise SimlawError("n_retained must be nonnegative")
        s = self.xi_target.shape[0]
        if s < 1:
            raise SimlawError("need at least one scaling quantity")
        expected = (n, s) if n > 0 else (1, 0)
        if n == 0:
            object.__setattr__(self, "xi_matrix", _freeze(np.zeros((0, s))))
        elif self.xi_matrix.shape != expected:
            raise SimlawError(
                f"xi_matrix must be {n} x {s}, got {self.xi_matrix.shape}"
            )

    @property
    def n_scaling(self):
        return self.xi_target.shape[0]

    def total(self):
        return self.n_retained + self.n_scaling


@dataclass(frozen=True)
class RenormalizationGroup:
    """Exponent table of the renormalization group: one constant per
    scaling Pi. mu_matrix rows cover the first n_retained dependent
    parameters; the trailing dependent parameters are rescaled directly
    by their constant; mu_target covers the quantity of interest."""

    construction: object
    similarity: IncompleteSimilaritySpec
    mu_matrix: np.ndarray
    mu_target: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu_matrix", _freeze(self.mu_matrix))
        object.__setattr__(self, "mu_target", _freeze(self.mu_target))

    @property
    def constant_names(self):
        n = self.similarity.n_retained
        return tuple("B_" + name for name in self.construction.pi_names[n:])


def buckingham_group(construction):
    """Solve for the similarity-group exponents of a construction.

    The dependent-parameter exponents satisfy beta_matrix @ delta = -alpha
    column by column; the target exponents follow from cancelling the
    constants in the target Pi.
    """
    if abs(construction.target_exponent) < 1e-12:
        raise ZeroTargetExponent("target Pi does not contain the quantity of interest")
    delta_matrix = solve_checked(
        construction.beta_matrix,
        -construction.alpha_matrix,
        # Cannot happen for constructions validated by build_construction.
        SingularBeta("beta matrix is numerically singular"),
    )
    delta_target = -(
        construction.target_alpha + delta_matrix.T @ construction.target_beta
    ) / construction.target_exponent
    return BuckinghamGroup(construction, delta_matrix, delta_target)


def buckingham_group_closed_form(system):
    """Similarity-group exponents straight from the dimension system.

    The solve in buckingham_group yields the same matrix for every valid
    construction on the system; this closed form is that common value
    (transpose of the dependent dimension vectors expressed in the
    independent basis).
    """
    expressed = solve_checked(
        system.independent_exponents,
        system.dependent_exponents,
        SingularDimensionMatrix("independent dimension matrix is numerically singular"),
    )
    return expressed.T


def renormalization_group(construction, similarity):
    """Solve for the renormalization-group exponents induced by an
    incomplete similarity on the construction.

    Raises SingularRenormMatrix when the reduced system is singular; the
    invertibility of that matrix for independent constructions is an open
    question, so the matrix and its rank ride along in the error.
    """
    if abs(construction.target_exponent) < 1e-12:
        raise ZeroTargetExponent("target Pi does not contain the quantity of interest")
    l = construction.l
    n = similarity.n_retained
    s = similarity.n_scaling
    if similarity.total() != l:
        raise SimlawError(
            f"similarity spec covers {similarity.total()} quantities, construction has {l}"
        )
    if not 0 <= n < l:
        raise SimlawError("need 0 <= n_retained < number of Pi's")

    beta = construction.beta_matrix
    xi_m = similarity.xi_matrix
    xi_t = similarity.xi_target
    # Effective exponents of the renormalized arguments Pi'_j over the
    # dependent parameters: leading block feeds the system matrix, trailing
    # block the right-hand side.
    effective = beta[:n, :] + xi_m @ beta[n:, :]
    system_matrix = effective[:, :n]
    rhs = -effective[:, n:]
    if n == 0:
        mu_matrix = np.zeros((0, s))
    else:
        mu_matrix = solve_checked(
            system_matrix,
            rhs,
            SingularRenormMatrix(
                "renormalization system matrix is singular",
                matrix=system_matrix.copy(),
                rank=pivot_rank(system_matrix),
            ),
        )

    tb = construction.target_beta
    # Effective target exponents over the dependent parameters for the
    # invariant combination Pi * prod(Pi_scaling ** xi_target).
    target_effective = tb + xi_t @ beta[n:, :]
    mu_target = -(
        target_effective[:n] @ mu_matrix + target_effective[n:]
    ) / construction.target_exponent
    return RenormalizationGroup(construction, similarity, mu_matrix, mu_target)


def _check_constants(constants, expected):
    constants = np.asarray(constants, dtype=float)
    if constants.shape != (expected,):
        raise SimlawError(f"need {expected} group constants, got shape {constants.shape}")
    if not np.all(constants > 0.0) or not np.all(np.isfinite(constants)):
        raise NonPositiveConstant("group constants must be strictly positive and finite")
    return np.log(constants)


def apply_group(group, constants, sample):
    """Rescale a parameter sample by a group element; returns a new dict."""
    construction = group.construction
    system = construction.system
    log_c = _check_constants(constants, len(group.constant_names))
    log_a, log_b, log_target = sample_log_vectors(system, sample)

    if isinstance(group, BuckinghamGroup):
        log_a = log_a + log_c
        log_b = log_b + group.delta_matrix @ log_c
        log_target = log_target + group.delta_target @ log_c
    elif isinstance(group, RenormalizationGroup):
        n = group.similarity.n_retained
        log_b = log_b.copy()
        log_b[:n] += group.mu_matrix @ log_c
        log_b[n:] += log_c
        log_target = log_target + group.mu_target @ log_c
    else:
        raise SimlawError(f"unknown group type {type(group).__name__}")

    out = dict(sample)
    for name, value in zip(system.independent_params, np.exp(log_a)):
        out[name] = float(value)
    for name, value in zip(system.dependent_params, np.exp(log_b)):
        out[name] = float(value)
    out[system.target_param] = float(np.exp(log_target))
    return out


def renormalized_pi(construction, similarity, pi_values):
    """Map raw (Pi, Pi_1..Pi_l) values to the incomplete-similarity
    invariants (Pi * prod(Pi_k**xi_k), Pi'_1..Pi'_n)."""
    pi_values = np.asarray(pi_values, dtype=float)
    n = similarity.n_retained
    logs = np.log(pi_values)
    log_target = logs[0] + similarity.xi_target @ logs[1 + n :]
    log_args = logs[1 : 1 + n] + similarity.xi_matrix @ logs[1 + n :]
    return np.exp(np.concatenate(([log_target], log_args)))


def _invariants(group, sample):
    construction = group.construction
    values = evaluate_pi(construction, sample)
    if isinstance(group, RenormalizationGroup):
        return renormalized_pi(construction, group.similarity, values)
    return values


def verify_invariance(construction, group, trials=100, seed=0):
    """Numerically check the group's defining property.

    Draws `trials` random positive samples and group constants
    (log-uniform in [1e-2, 1e2]) from per-trial PRNG streams derived from
    the seed, and returns the maximum relative change of the invariant
    quantities under the group action.
    """
    if trials < 1:
        raise SimlawError("trials must be >= 1")
    system = construction.system
    names = list(system.independent_params) + list(system.dependent_params)
    names.append(system.target_param)
    n_constants = len(group.constant_names)
    worst = 0.0
    for trial in range(trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))
        sample = {
            name: float(np.exp(rng.uniform(np.log(1e-2), np.log(1e2)))) for name in names
        }
        constants = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=n_constants))
        before = _invariants(group, sample)
        after = _invariants(group, apply_group(group, constants, sample))
        deviation = float(np.max(np.abs(after - before) / np.abs(before)))
        worst = max(worst, deviation)
    return worst


def group_to_dict(group, include_snapped=True):
    """JSON-ready description of a group's exponent table."""
    construction = group.construction
    system = construction.system
    constants = list(group.constant_names)

    rows = {}
    if isinstance(group, BuckinghamGroup):
        kind = "buckingham"
        for k, name in enumerate(system.independent_params):
            rows[name] = np.eye(len(constants))[k]
        for i, name in enumerate(system.dependent_params):
            rows[name] = group.delta_matrix[i]
        rows[system.target_param] = group.delta_target
    else:
        kind = "renormalization"
        n = group.similarity.n_retained
        for name in system.independent_params:
            rows[name] = np.zeros(len(constants))
        for i, name in enumerate(system.dependent_params):
            if i < n:
                rows[name] = group.mu_matrix[i]
            else:
                rows[name] = np.eye(len(constants))[i - n]
        rows[system.target_param] = group.mu_target

    exponents = {
        param: {c: float(v) for c, v in zip(constants, row)} for param, row in rows.items()
    }
    payload = {"type": kind, "constants": constants, "exponents": exponents}
    if include_snapped:
        payload["snapped"] = {
            param: {c: snap_str(v) for c, v in zip(constants, row)}
            for param, row in rows.items()
        }
    return payload
