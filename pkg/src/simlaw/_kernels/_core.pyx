# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled training kernels: fused forward/backward pass for the
exponent-learning network. Matmuls go through BLAS dgemm; elementwise
stages are fused C loops. Mirrors _numpy.py exactly (same reduction
order within float associativity of BLAS, deterministic per backend)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp as c_exp, isfinite, tanh as c_tanh
from scipy.linalg.cython_blas cimport dgemm

from ..errors import NonFiniteActivation

cnp.import_array()

NAME = "cython"


cdef void rm_gemm(bint trans_a, bint trans_b, int m, int n, int k,
                  double alpha, double* a, double* b, double beta,
                  double* c) noexcept nogil:
    """Row-major C(m,n) = alpha * op(A)(m,k) @ op(B)(k,n) + beta * C.

    Implemented as the Fortran product C^T = op(B)^T @ op(A)^T on the
    transposed (column-major) views of the same buffers.
    """
    cdef char ta, tb
    cdef int lda, ldb, ldc, i
    if m == 0 or n == 0:
        return
    if k == 0:
        for i in range(m * n):
            c[i] = beta * c[i]
        return
    ta = b'T' if trans_b else b'N'
    tb = b'T' if trans_a else b'N'
    lda = k if trans_b else n
    ldb = m if trans_a else k
    ldc = n
    dgemm(&ta, &tb, &n, &m, &k, &alpha, b, &lda, a, &ldb, &beta, c, &ldc)


def forward(xi_matrix, xi_target, weights, biases, mean, std, exp_args,
            log_ret, log_scl):
    """Predicted log Pi for a batch of log rows."""
    pred, _, _ = _forward_pass(xi_matrix, xi_target, weights, biases,
                               mean, std, exp_args, log_ret, log_scl)
    return pred


cdef _forward_pass(xi_matrix, xi_target, weights, biases, mean, std,
                   bint exp_args, log_ret, log_scl):
    cdef double[:, ::1] xi_m = np.ascontiguousarray(xi_matrix, dtype=np.float64)
    cdef double[::1] xi_t = np.ascontiguousarray(xi_target, dtype=np.float64)
    cdef double[:, ::1] lr = np.ascontiguousarray(log_ret, dtype=np.float64)
    cdef double[:, ::1] ls = np.ascontiguousarray(log_scl, dtype=np.float64)
    cdef double[::1] mu = np.ascontiguousarray(mean, dtype=np.float64)
    cdef double[::1] sd = np.ascontiguousarray(std, dtype=np.float64)

    cdef int b_rows = lr.shape[0]
    cdef int n_args = xi_m.shape[0]
    cdef int n_scl = xi_t.shape[0]
    cdef int i, j

    pref_arr = np.empty(b_rows)
    cdef double[::1] pref = pref_arr
    cdef double acc
    for i in range(b_rows):
        acc = 0.0
        for j in range(n_scl):
            acc += ls[i, j] * xi_t[j]
        pref[i] = -acc

    # Arguments: affine standardization in log space, then the optional
    # exponential layer (see _numpy._arguments).
    z_arr = np.empty((b_rows, n_args))
    cdef double[:, ::1] z = z_arr
    rm_gemm(False, True, b_rows, n_args, n_scl, 1.0,
            &ls[0, 0], &xi_m[0, 0], 0.0, &z[0, 0])
    cdef double value
    cdef int bad_row = -1
    with nogil:
        for i in range(b_rows):
            for j in range(n_args):
                value = (z[i, j] + lr[i, j] - mu[j]) / sd[j]
                if exp_args:
                    value = c_exp(value)
                    if not isfinite(value):
                        bad_row = i
                        break
                z[i, j] = value
            if bad_row >= 0:
                break
    if bad_row >= 0:
        raise NonFiniteActivation(
            f"overflow in the exponential argument layer (batch row {bad_row})",
            row=bad_row,
        )

    # NOTE: wraparound is off, so no negative indexing on inferred lists.
    cdef Py_ssize_t n_layers = len(weights)
    activations = [z_arr]
    prev_arr = z_arr
    cdef double[:, ::1] w_view, prev, curr
    cdef double[::1] b_view
    cdef int n_in, n_out
    cdef Py_ssize_t layer
    for layer in range(n_layers - 1):
        w = np.ascontiguousarray(weights[layer], dtype=np.float64)
        bv = np.ascontiguousarray(biases[layer], dtype=np.float64)
        w_view = w
        b_view = bv
        n_in = w_view.shape[0]
        n_out = w_view.shape[1]
        prev = prev_arr
        curr_arr = np.empty((b_rows, n_out))
        curr = curr_arr
        rm_gemm(False, False, b_rows, n_out, n_in, 1.0,
                &prev[0, 0], &w_view[0, 0], 0.0, &curr[0, 0])
        with nogil:
            for i in range(b_rows):
                for j in range(n_out):
                    curr[i, j] = c_tanh(curr[i, j] + b_view[j])
        activations.append(curr_arr)
        prev_arr = curr_arr

    w_last = np.ascontiguousarray(weights[n_layers - 1], dtype=np.float64)
    b_last = np.ascontiguousarray(biases[n_layers - 1], dtype=np.float64)
    cdef double[:, ::1] wl = w_last
    cdef double[::1] bl = b_last
    cdef double[:, ::1] last = prev_arr
    pred_arr = np.empty(b_rows)
    cdef double[::1] pred = pred_arr
    rm_gemm(False, False, b_rows, 1, wl.shape[0], 1.0,
            &last[0, 0], &wl[0, 0], 0.0, &pred[0])
    with nogil:
        for i in range(b_rows):
            pred[i] = pred[i] + bl[0] + pref[i]
    return pred_arr, activations, pref_arr


def loss_and_grads(xi_matrix, xi_target, weights, biases, mean, std, exp_args,
                   log_ret, log_scl, log_tgt):
    """Mean squared residual and its gradients, same layout as the inputs."""
    pred_arr, activations, _ = _forward_pass(
        xi_matrix, xi_target, weights, biases, mean, std, exp_args, log_ret, log_scl
    )
    cdef double[:, ::1] ls = np.ascontiguousarray(log_scl, dtype=np.float64)
    cdef double[::1] tgt = np.ascontiguousarray(log_tgt, dtype=np.float64)
    cdef double[::1] pred = pred_arr
    cdef double[:, ::1] z = activations[0]
    cdef double[::1] sd = np.ascontiguousarray(std, dtype=np.float64)

    cdef int b_rows = ls.shape[0]
    cdef int n_scl = ls.shape[1]
    cdef int n_args = z.shape[1]
    cdef int n_layers = len(weights)
    cdef int i, j
    cdef bint use_exp = bool(exp_args)

    resid_arr = np.empty(b_rows)
    cdef double[::1] resid = resid_arr
    cdef double loss = 0.0, r
    cdef double scale = 2.0 / b_rows
    with nogil:
        for i in range(b_rows):
            r = pred[i] - tgt[i]
            loss += r * r
            resid[i] = scale * r
    loss /= b_rows

    d_xi_t_arr = np.empty(n_scl)
    cdef double[::1] d_xi_t = d_xi_t_arr
    rm_gemm(True, False, n_scl, 1, b_rows, -1.0, &ls[0, 0], &resid[0], 0.0, &d_xi_t[0])

    d_weights = [None] * n_layers
    d_biases = [None] * n_layers

    cdef double[:, ::1] last = activations[n_layers - 1]
    cdef int last_width = last.shape[1]
    dw_arr = np.empty((last_width, 1))
    cdef double[:, ::1] dw = dw_arr
    rm_gemm(True, False, last_width, 1, b_rows, 1.0, &last[0, 0], &resid[0], 0.0, &dw[0, 0])
    d_weights[n_layers - 1] = dw_arr
    cdef double acc = 0.0
    for i in range(b_rows):
        acc += resid[i]
    d_biases[n_layers - 1] = np.array([acc])

    w_last = np.ascontiguousarray(weights[n_layers - 1], dtype=np.float64)
    cdef double[:, ::1] wl = w_last
    dh_arr = np.empty((b_rows, last_width))
    cdef double[:, ::1] dh = dh_arr
    rm_gemm(False, True, b_rows, last_width, 1, 1.0, &resid[0], &wl[0, 0], 0.0, &dh[0, 0])

    cdef double[:, ::1] act_out, act_in, w_view, dpre, dh_next, dwi
    cdef double[::1] dbi
    cdef int n_in, n_out
    cdef Py_ssize_t layer
    for layer in range(n_layers - 2, -1, -1):
        w = np.ascontiguousarray(weights[layer], dtype=np.float64)
        w_view = w
        n_in = w_view.shape[0]
        n_out = w_view.shape[1]
        act_out = activations[layer + 1]
        act_in = activations[layer]
        dpre_arr = np.empty((b_rows, n_out))
        dpre = dpre_arr
        with nogil:
            for i in range(b_rows):
                for j in range(n_out):
                    dpre[i, j] = dh[i, j] * (1.0 - act_out[i, j] * act_out[i, j])
        dwi_arr = np.empty((n_in, n_out))
        dwi = dwi_arr
        rm_gemm(True, False, n_in, n_out, b_rows, 1.0,
                &act_in[0, 0], &dpre[0, 0], 0.0, &dwi[0, 0])
        d_weights[layer] = dwi_arr
        dbi_arr = np.zeros(n_out)
        dbi = dbi_arr
        with nogil:
            for i in range(b_rows):
                for j in range(n_out):
                    dbi[j] += dpre[i, j]
        d_biases[layer] = dbi_arr
        dh_next_arr = np.empty((b_rows, n_in))
        dh_next = dh_next_arr
        rm_gemm(False, True, b_rows, n_in, n_out, 1.0,
                &dpre[0, 0], &w_view[0, 0], 0.0, &dh_next[0, 0])
        dh_arr = dh_next_arr
        dh = dh_arr

    # dh now holds the gradient w.r.t. the subnet inputs z; the chain back
    # through z = exp((p - mean)/std) multiplies by z/std.
    dp_arr = np.empty((b_rows, n_args))
    cdef double[:, ::1] dp = dp_arr
    with nogil:
        for i in range(b_rows):
            for j in range(n_args):
                if use_exp:
                    dp[i, j] = dh[i, j] * z[i, j] / sd[j]
                else:
                    dp[i, j] = dh[i, j] / sd[j]
    d_xi_m_arr = np.empty((n_args, n_scl))
    cdef double[:, ::1] d_xi_m = d_xi_m_arr
    rm_gemm(True, False, n_args, n_scl, b_rows, 1.0,
            &dp[0, 0], &ls[0, 0], 0.0, &d_xi_m[0, 0])
    return loss, d_xi_m_arr, d_xi_t_arr, d_weights, d_biases
