"""Small dense solves with explicit singularity detection.

All systems in this package are tiny (at most a handful of rows), so we
use LU with partial pivoting and declare a matrix singular when its
smallest pivot falls below PIVOT_RTOL times its largest pivot.
"""

import numpy as np
import scipy.linalg

PIVOT_RTOL = 1e-9


def lu_pivots(matrix):
    """Absolute LU pivot magnitudes of a square matrix."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.size == 0:
        return np.empty(0)
    lu, _ = scipy.linalg.lu_factor(matrix, check_finite=True)
    return np.abs(np.diag(lu))


def is_singular(matrix, rtol=PIVOT_RTOL):
    pivots = lu_pivots(matrix)
    if pivots.size == 0:
        return False
    largest = pivots.max()
    return largest == 0.0 or pivots.min() < rtol * largest


def pivot_rank(matrix, rtol=PIVOT_RTOL):
    """Rank estimate: LU pivots above rtol times the largest pivot."""
    pivots = lu_pivots(matrix)
    if pivots.size == 0:
        return 0
    largest = pivots.max()
    if largest == 0.0:
        return 0
    return int(np.sum(pivots >= rtol * largest))


def solve_checked(matrix, rhs, error):
    """Solve matrix @ x = rhs, raising `error` when the pivots degenerate.

    `error` is an exception instance to raise on singularity. Handles the
    0x0 case (returns an empty solution of matching column shape).
    """
    matrix = np.asarray(matrix, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if matrix.shape[0] == 0:
        return np.zeros(rhs.shape)
    lu, piv = scipy.linalg.lu_factor(matrix)
    pivots = np.abs(np.diag(lu))
    largest = pivots.max()
    if largest == 0.0 or pivots.min() < PIVOT_RTOL * largest:
        raise error
    return scipy.linalg.lu_solve((lu, piv), rhs)
