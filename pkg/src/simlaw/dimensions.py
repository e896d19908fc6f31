"""Dimension systems and dimensionless-quantity constructions.

A physical relation a = F(a_1..a_m, b_1..b_l) is described by a
DimensionSystem: the a_i are dimensionally independent (their dimension
vectors form an invertible m x m matrix), the b_j are dependent. A
construction assigns each dimensionless quantity Pi_j a row of exponents
over the b's; the matching exponents over the a's are then uniquely
determined, which is what dependent_alpha computes.

Exponent conventions (shared with `groups`):
  beta_matrix[j, i]  exponent of dependent parameter i in Pi_j
  alpha_matrix[j, k] exponent of independent parameter k in Pi_j
  target Pi = a**target_exponent * prod(b**target_beta) * prod(a_k**target_alpha)
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DependentRows,
    NonPositiveParameter,
    SimlawError,
    SingularDimensionMatrix,
    ZeroTargetExponent,
)
from .linalg import is_singular, solve_checked
from .rational import parse_exponent

# Tolerance on the net dimension vector of an accepted construction.
DIMENSIONLESS_ATOL = 1e-10


def _freeze(array):
    array = np.ascontiguousarray(array, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class DimensionSystem:
    """Base dimensions plus the dimension vectors of all governing parameters.

    independent_exponents is m x m with column k the dimension vector of
    independent parameter k; dependent_exponents is m x l; target_exponents
    is the dimension vector of the quantity of interest. Parameter order is
    the config order and is part of the data contract.
    """

    base_dims: tuple
    independent_params: tuple
    dependent_params: tuple
    target_param: str
    independent_exponents: np.ndarray
    dependent_exponents: np.ndarray
    target_exponents: np.ndarray

    def __post_init__(self):
        m = len(self.base_dims)
        l = len(self.dependent_params)
        object.__setattr__(self, "base_dims", tuple(self.base_dims))
        object.__setattr__(self, "independent_params", tuple(self.independent_params))
        object.__setattr__(self, "dependent_params", tuple(self.dependent_params))
        object.__setattr__(self, "independent_exponents", _freeze(self.independent_exponents))
        object.__setattr__(self, "dependent_exponents", _freeze(self.dependent_exponents))
        object.__setattr__(self, "target_exponents", _freeze(self.target_exponents))
        if len(self.independent_params) != m:
            raise SimlawError(
                f"need exactly {m} independent parameters (one per base dimension), "
                f"got {len(self.independent_params)}"
            )
        if self.independent_exponents.shape != (m, m):
            raise SimlawError("independent exponent matrix must be m x m")
        if self.dependent_exponents.shape != (m, l):
            raise SimlawError("dependent exponent matrix must be m x l")
        if self.target_exponents.shape != (m,):
            raise SimlawError("target dimension vector must have one entry per base dimension")
        names = self.independent_params + self.dependent_params + (self.target_param,)
        if len(set(names)) != len(names):
            raise SimlawError("parameter names must be unique")
        if is_singular(self.independent_exponents):
            raise SingularDimensionMatrix(
                "independent parameters are not dimensionally independent "
                "(dimension matrix is numerically singular)"
            )

    @property
    def m(self):
        return len(self.independent_params)

    @property
    def l(self):
        return len(self.dependent_params)

    @classmethod
    def from_config(cls, config):
        """Build from the JSON config mapping; see README for the schema."""
        try:
            base_dims = tuple(config["dimensions"])
            independent = config["independent"]
            dependent = config["dependent"]
            target = config["target"]
        except KeyError as exc:
            raise SimlawError(f"system config missing key {exc}") from exc
        if len(target) != 1:
            raise SimlawError("config 'target' must contain exactly one parameter")

        def column(vec, name):
            vec = [parse_exponent(v) for v in vec]
            if len(vec) != len(base_dims):
                raise SimlawError(
                    f"dimension vector of {name!r} has {len(vec)} entries, "
                    f"expected {len(base_dims)}"
                )
            return vec

        indep_names = tuple(independent)
        dep_names = tuple(dependent)
        lam = np.array([column(independent[p], p) for p in indep_names]).T if indep_names else np.zeros((len(base_dims), 0))
        gam = (
            np.array([column(dependent[p], p) for p in dep_names]).T
            if dep_names
            else np.zeros((len(base_dims), 0))
        )
        (target_name,) = target
        tvec = np.array(column(target[target_name], target_name))
        return cls(base_dims, indep_names, dep_names, target_name, lam, gam, tvec)


@dataclass(frozen=True)
class MDDPConstruction:
    """A set of l independent dimensionless quantities plus a target one,
    each a product of powers of the governing parameters."""

    system: DimensionSystem
    pi_names: tuple
    beta_matrix: np.ndarray
    alpha_matrix: np.ndarray
    target_pi_name: str
    target_exponent: float
    target_beta: np.ndarray
    target_alpha: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pi_names", tuple(self.pi_names))
        object.__setattr__(self, "beta_matrix", _freeze(self.beta_matrix))
        object.__setattr__(self, "alpha_matrix", _freeze(self.alpha_matrix))
        object.__setattr__(self, "target_beta", _freeze(self.target_beta))
        object.__setattr__(self, "target_alpha", _freeze(self.target_alpha))

    @property
    def l(self):
        return self.system.l

    @property
    def m(self):
        return self.system.m


def dependent_alpha(system, beta):
    """Independent-parameter exponents that make prod(b**beta) dimensionless.

    Unique solution of Lambda @ alpha = -Gamma @ beta; existence and
    uniqueness follow from the invertibility of the independent dimension
    matrix.
    """
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (system.l,):
        raise SimlawError(f"beta must have {system.l} entries")
    rhs = -(system.dependent_exponents @ beta)
    return solve_checked(
        system.independent_exponents,
        rhs,
        SingularDimensionMatrix("independent dimension matrix is numerically singular"),
    )


def _target_alpha(system, target_exponent, target_beta):
    # Same solve as dependent_alpha with the target's own dimension folded in.
    rhs = -(target_exponent * system.target_exponents + system.dependent_exponents @ target_beta)
    return solve_checked(
        system.independent_exponents,
        rhs,
        SingularDimensionMatrix("independent dimension matrix is numerically singular"),
    )


def build_construction(
    system,
    beta_rows,
    target_exponent,
    target_beta=None,
    pi_names=None,
    target_pi_name="Pi",
):
    """Assemble and validate an MDDPConstruction.

    beta_rows: l rows of dependent-parameter exponents, one per Pi_j.
    target_exponent: exponent of the quantity of interest in the target Pi.
    target_beta: dependent-parameter exponents in the target Pi (default 0).
    """
    beta_matrix = np.asarray(beta_rows, dtype=float)
    l = system.l
    if beta_matrix.shape != (l, l):
        raise SimlawError(f"need {l} beta rows of {l} entries, got shape {beta_matrix.shape}")
    if target_beta is None:
        target_beta = np.zeros(l)
    target_beta = np.asarray(target_beta, dtype=float)
    if target_beta.shape != (l,):
        raise SimlawError(f"target beta must have {l} entries")
    target_exponent = float(target_exponent)
    if abs(target_exponent) < 1e-12:
        raise ZeroTargetExponent("the quantity of interest does not appear in the target Pi")
    if is_singular(beta_matrix):
        raise DependentRows(
            "beta rows are linearly dependent; the Pi_j are not independent "
            "by exponentiation and multiplication"
        )
    if pi_names is None:
        pi_names = tuple(f"Pi{j + 1}" for j in range(l))
    pi_names = tuple(pi_names)
    if len(pi_names) != l or len(set(pi_names)) != l:
        raise SimlawError("need one distinct name per Pi")

    alpha_matrix = np.empty((l, system.m))
    for j in range(l):
        alpha_matrix[j] = dependent_alpha(system, beta_matrix[j])
    target_alpha = _target_alpha(system, target_exponent, target_beta)

    construction = MDDPConstruction(
        system,
        pi_names,
        beta_matrix,
        alpha_matrix,
        target_pi_name,
        target_exponent,
        target_beta,
        target_alpha,
    )
    residual = dimensionless_residual(construction)
    if residual >= DIMENSIONLESS_ATOL:
        raise SimlawError(
            f"construction failed the dimensionlessness check (residual {residual:.3e}); "
            "the dimension system is badly conditioned"
        )
    return construction


def dimensionless_residual(construction):
    """Largest net dimension-vector entry over all Pi's (0 for an exact
    construction)."""
    system = construction.system
    net = (
        system.dependent_exponents @ construction.beta_matrix.T
        + system.independent_exponents @ construction.alpha_matrix.T
    )
    target_net = (
        construction.target_exponent * system.target_exponents
        + system.dependent_exponents @ construction.target_beta
        + system.independent_exponents @ construction.target_alpha
    )
    worst = np.abs(target_net).max() if target_net.size else 0.0
    if net.size:
        worst = max(worst, np.abs(net).max())
    return float(worst)


def sample_log_vectors(system, sample):
    """Logs of a parameter sample, split (independent, dependent, target).

    The sample is a mapping name -> strictly positive value covering every
    governing parameter and the quantity of interest.
    """
    def log_of(name):
        try:
            value = sample[name]
        except KeyError:
            raise SimlawError(f"sample is missing parameter {name!r}") from None
        value = float(value)
        if not value > 0.0 or not np.isfinite(value):
            raise NonPositiveParameter(
                f"parameter {name!r} = {value}; samples must be strictly positive "
                "(fold signs into the parameter definition)"
            )
        return np.log(value)

    log_a = np.array([log_of(p) for p in system.independent_params])
    log_b = np.array([log_of(p) for p in system.dependent_params])
    return log_a, log_b, log_of(system.target_param)


def evaluate_pi(construction, sample):
    """Numeric values (Pi, Pi_1..Pi_l) of the construction at a sample."""
    system = construction.system
    log_a, log_b, log_target = sample_log_vectors(system, sample)
    log_pis = construction.beta_matrix @ log_b + construction.alpha_matrix @ log_a
    log_pi0 = (
        construction.target_exponent * log_target
        + construction.target_beta @ log_b
        + construction.target_alpha @ log_a
    )
    return np.exp(np.concatenate(([log_pi0], log_pis)))
