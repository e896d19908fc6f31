"""Analytic pipe/channel flow models used as dataset generators.

Laminar Newtonian channel flow in pressure-drop coordinates:
    u+ = y+ - (y+)^2 / (2 Re_tau),  0 < y+ <= Re_tau.

Herschel-Bulkley pipe flow (yield stress tau_0, consistency K, behavior
index n) in friction coordinates, with phi = tau_0/tau_w the plug radius
fraction:
    u+(r^) = Re_tau * n/(2(n+1)) * [(1-phi)^((n+1)/n) - (r^-phi)^((n+1)/n)]
for phi <= r^ <= 1, constant at the r^ = phi value inside the plug. The
bulk mean follows from integrating over the cross-section, giving
    Ubar/u_tau = (n/2) Re_tau J(phi, n)
and the friction factor f = 8 / (n^2 J^2 Re_tau^2).

Bingham (n = 1) friction in bulk coordinates obeys the implicit
Buckingham-Reiner equation, solved here by bracketed bisection with a
Newton polish.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .dataset import make_dataset, read_table
from .errors import EmptyDataset, NoConvergence, OutOfDomain, SimlawError

logger = logging.getLogger(__name__)

LAMINAR_COLUMNS = ("u_plus", "y_plus", "Re_tau")
HB_COLUMNS = ("u_plus", "r_hat", "He", "Re_tau")
ROUGH_PIPE_COLUMNS = ("f", "r_over_D", "Re")


def laminar_uplus(re_tau, y_plus):
    """Laminar Newtonian velocity in wall units at distance y+ from the wall."""
    re_tau = np.asarray(re_tau, dtype=float)
    y_plus = np.asarray(y_plus, dtype=float)
    if np.any(re_tau <= 0.0) or np.any(y_plus <= 0.0) or np.any(y_plus > re_tau):
        raise OutOfDomain("need 0 < y_plus <= Re_tau")
    out = y_plus - y_plus**2 / (2.0 * re_tau)
    return out if out.ndim else float(out)


def hb_phi(n, he, re_tau):
    """Plug radius fraction phi = (He / Re_tau^2)^(n / (2 - n))."""
    if not 0.0 < n < 2.0:
        raise OutOfDomain("behavior index must be in (0, 2)")
    he = np.asarray(he, dtype=float)
    re_tau = np.asarray(re_tau, dtype=float)
    if np.any(he <= 0.0) or np.any(re_tau <= 0.0):
        raise OutOfDomain("He and Re_tau must be positive")
    out = (he / re_tau**2) ** (n / (2.0 - n))
    return out if out.ndim else float(out)


def hb_uplus(n, phi, re_tau, r_hat):
    """Herschel-Bulkley velocity in wall units at radius fraction r^.

    Constant in the plug region r^ <= phi. The prefactor n/(2(n+1))
    follows from integrating the constitutive model; it equals 1/4 for
    n = 1 (Bingham).
    """
    if not 0.0 < n < 2.0:
        raise OutOfDomain("behavior index must be in (0, 2)")
    phi = np.asarray(phi, dtype=float)
    re_tau = np.asarray(re_tau, dtype=float)
    r_hat = np.asarray(r_hat, dtype=float)
    if np.any(phi <= 0.0) or np.any(phi >= 1.0):
        raise OutOfDomain("need 0 < phi < 1 (phi -> 1 is the no-flow limit)")
    if np.any(r_hat < 0.0) or np.any(r_hat >= 1.0):
        raise OutOfDomain("need 0 <= r_hat < 1 (u+ vanishes at the wall)")
    if np.any(re_tau <= 0.0):
        raise OutOfDomain("Re_tau must be positive")
    power = (n + 1.0) / n
    fluid_r = np.maximum(r_hat, phi)
    out = re_tau * (n / (2.0 * (n + 1.0))) * ((1.0 - phi) ** power - (fluid_r - phi) ** power)
    return out if out.ndim else float(out)


def hb_J(phi, n):
    """Bulk-mean shape factor J(phi, n) of the Herschel-Bulkley profile."""
    if n <= 0.0:
        raise OutOfDomain("behavior index must be positive")
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < 0.0) or np.any(phi >= 1.0):
        raise OutOfDomain("need 0 <= phi < 1")
    out = (1.0 - phi) ** ((n + 1.0) / n) * (
        (1.0 - phi) ** 2 / (3.0 * n + 1.0)
        + 2.0 * phi * (1.0 - phi) / (2.0 * n + 1.0)
        + phi**2 / (n + 1.0)
    )
    return out if out.ndim else float(out)


def hb_bulk_uplus(n, phi, re_tau):
    """Analytic bulk mean velocity in wall units, Ubar/u_tau = (n/2) Re_tau J."""
    return 0.5 * n * re_tau * hb_J(phi, n)


def hb_friction(n, he, re_tau):
    """Fanning friction factor in friction coordinates, f = 8/(n^2 J^2 Re_tau^2)."""
    phi = hb_phi(n, he, re_tau)
    if np.any(np.asarray(phi) >= 1.0):
        raise OutOfDomain("phi >= 1: the flow ceases")
    out = 8.0 / (n**2 * hb_J(phi, n) ** 2 * np.asarray(re_tau, dtype=float) ** 2)
    return out if out.ndim else float(out)


def buckingham_reiner_friction(re_mr, he, rtol=1e-12, max_iter=200):
    """Bingham friction factor from the implicit Buckingham-Reiner equation.

    f = (16/Re)[1 + He/(6 Re) - He^4/(3 f^3 Re^7)]. He = 0 reduces to the
    Newtonian f = 16/Re exactly. The physical root is bracketed by
    [16/Re, (16/Re)(1 + He/(6 Re))]; bisection narrows it, Newton polishes.
    """
    re_mr = float(re_mr)
    he = float(he)
    if re_mr <= 0.0 or he < 0.0:
        raise OutOfDomain("need Re_MR > 0 and He >= 0")
    f_newton = 16.0 / re_mr
    if he == 0.0:
        return f_newton

    c = f_newton * (1.0 + he / (6.0 * re_mr))
    d = f_newton * he**4 / (3.0 * re_mr**7)

    def g(f):
        return f - c + d / f**3

    def g_prime(f):
        return 1.0 - 3.0 * d / f**4

    lo, hi = f_newton, c
    g_lo, g_hi = g(lo), g(hi)
    if g_lo > 0.0 or g_hi < 0.0:
        raise NoConvergence(
            "Buckingham-Reiner bracket does not straddle the root",
            diagnostics={"lo": lo, "hi": hi, "g_lo": g_lo, "g_hi": g_hi},
        )
    f = 0.5 * (lo + hi)
    for _ in range(max_iter):
        gf = g(f)
        if abs(gf) < rtol * f:
            return f
        if gf > 0.0:
            hi = f
        else:
            lo = f
        slope = g_prime(f)
        newton = f - gf / slope if slope != 0.0 else None
        # Newton when it stays inside the bracket, bisection otherwise.
        f = newton if newton is not None and lo < newton < hi else 0.5 * (lo + hi)
    raise NoConvergence(
        "Buckingham-Reiner iteration budget exhausted",
        diagnostics={"lo": lo, "hi": hi, "f": f, "residual": g(f)},
    )


def _grid(count, lo, hi, spacing):
    if count < 2:
        raise SimlawError("grid counts must be >= 2")
    if not 0.0 < lo < hi:
        raise SimlawError("grid range must be positive and increasing")
    if spacing == "log":
        return np.geomspace(lo, hi, count)
    if spacing == "linear":
        return np.linspace(lo, hi, count)
    raise SimlawError(f"unknown spacing {spacing!r}")


@dataclass(frozen=True)
class LaminarGridSpec:
    """Sampling grid for the laminar channel dataset: per profile, y+ runs
    log-spaced over [wall_fraction * Re_tau, Re_tau] (the wall itself is
    excluded since u+ = 0 breaks the log transform)."""

    re_tau_count: int = 100
    re_tau_range: tuple = (10.0, 100.0)
    y_plus_count: int = 50
    wall_fraction: float = 0.01
    spacing: str = "log"

    def __post_init__(self):
        if not 0.0 < self.wall_fraction < 1.0:
            raise SimlawError("wall_fraction must be in (0, 1)")


@dataclass(frozen=True)
class HBGridSpec:
    """Sampling grid for one Herschel-Bulkley dataset (one behavior index).

    r^ endpoints are excluded: r^ = 1 gives u+ = 0, and the centerline is
    shifted to r_hat_range[0] so every row survives the log transform.
    """

    behavior_index: float
    he_count: int = 100
    he_range: tuple = (10.0, 100.0)
    re_tau_count: int = 100
    re_tau_range: tuple = (10.0, 100.0)
    r_hat_count: int = 32
    r_hat_range: tuple = (0.02, 0.98)
    spacing: str = "log"

    def __post_init__(self):
        if not 0.0 < self.behavior_index <= 1.0:
            raise SimlawError("behavior index must be in (0, 1]")
        lo, hi = self.r_hat_range
        if not 0.0 < lo < hi < 1.0:
            raise SimlawError("r_hat range must sit strictly inside (0, 1)")


def generate_laminar_dataset(spec=LaminarGridSpec()):
    """Laminar dataset with columns (u+, y+, Re_tau); y+ is the retained
    argument, Re_tau the scaling variable."""
    re_taus = _grid(spec.re_tau_count, *spec.re_tau_range, spec.spacing)
    omega = np.geomspace(spec.wall_fraction, 1.0, spec.y_plus_count)
    rows = []
    for re_tau in re_taus:
        y_plus = omega * re_tau
        u_plus = laminar_uplus(re_tau, y_plus)
        block = np.column_stack([u_plus, y_plus, np.full_like(y_plus, re_tau)])
        rows.append(block)
    return make_dataset(LAMINAR_COLUMNS, np.vstack(rows), n_retained=1)


def generate_hb_dataset(spec):
    """Herschel-Bulkley dataset with columns (u+, r^, He, Re_tau); r^ and
    He are retained, Re_tau is the scaling variable. Grid points with
    phi >= 1 (no flow) are skipped and counted."""
    n = spec.behavior_index
    hes = _grid(spec.he_count, *spec.he_range, spec.spacing)
    re_taus = _grid(spec.re_tau_count, *spec.re_tau_range, spec.spacing)
    r_hats = np.linspace(*spec.r_hat_range, spec.r_hat_count)
    rows = []
    n_ceased = 0
    for he in hes:
        for re_tau in re_taus:
            phi = hb_phi(n, he, re_tau)
            if phi >= 1.0:
                n_ceased += 1
                continue
            u_plus = hb_uplus(n, phi, re_tau, r_hats)
            block = np.column_stack(
                [
                    u_plus,
                    r_hats,
                    np.full_like(r_hats, he),
                    np.full_like(r_hats, re_tau),
                ]
            )
            rows.append(block)
    if not rows:
        raise EmptyDataset(
            f"all {n_ceased} (He, Re_tau) grid points have phi >= 1 (no flow)"
        )
    dataset = make_dataset(HB_COLUMNS, np.vstack(rows), n_retained=2)
    if n_ceased:
        logger.info("skipped %d (He, Re_tau) grid points with phi >= 1", n_ceased)
    return dataset


@dataclass(frozen=True)
class GoldenfeldGridSpec:
    """Synthetic rough-pipe friction data obeying an exact power-law
    collapse f = Re^-0.25 * g((r/D) Re^0.75) with g smooth and monotone;
    the Blasius prefactor and a Strickler-like large-argument branch make
    the numbers physically plausible."""

    re_count: int = 60
    re_range: tuple = (4e3, 1e6)
    roughness: tuple = (1 / 507.0, 1 / 252.0, 1 / 126.0, 1 / 60.0, 1 / 30.6, 1 / 15.0)
    amplitude: float = 0.0791
    crossover: float = 25.0


def generate_goldenfeld_dataset(spec=GoldenfeldGridSpec()):
    res = np.geomspace(*spec.re_range, spec.re_count)
    rows = []
    for r_over_d in spec.roughness:
        x = r_over_d * res**0.75
        f = res**-0.25 * spec.amplitude * (1.0 + (x / spec.crossover) ** (1.0 / 3.0))
        rows.append(np.column_stack([f, np.full_like(res, r_over_d), res]))
    return make_dataset(ROUGH_PIPE_COLUMNS, np.vstack(rows), n_retained=1)


def load_rough_pipe_csv(path):
    """Load measured rough-pipe friction data (columns f, r_over_D, Re)."""
    columns, values = read_table(path)
    if tuple(columns) != ROUGH_PIPE_COLUMNS:
        raise SimlawError(
            f"expected columns {','.join(ROUGH_PIPE_COLUMNS)}, got {','.join(columns)}"
        )
    return make_dataset(ROUGH_PIPE_COLUMNS, values, n_retained=1)
