# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled training kernels: fused linear layers and Adam updates.

Matrix products go through BLAS dgemm; bias/ReLU/Adam arithmetic is fused
into single passes to avoid temporary arrays. Must stay call-compatible
with `_kernels_np`.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()


cdef void _gemm_rowmajor(char ta, char tb, int m, int n, int k,
                         double* a, int lda, double* b, int ldb,
                         double* c, int ldc) noexcept nogil:
    # Row-major C(m,n) = opA(m,k) @ opB(k,n), expressed to column-major BLAS
    # as C^T = opB^T @ opA^T.
    cdef double one = 1.0, zero = 0.0
    dgemm(&tb, &ta, &n, &m, &k, &one, b, &ldb, a, &lda, &zero, c, &ldc)


def linear_forward(double[:, ::1] x, double[:, ::1] w, double[::1] b, bint relu):
    cdef int bsz = x.shape[0], din = x.shape[1], dout = w.shape[1]
    out_arr = np.empty((bsz, dout), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef int i, j
    with nogil:
        _gemm_rowmajor(b'N', b'N', bsz, dout, din,
                       &x[0, 0], din, &w[0, 0], dout, &out[0, 0], dout)
        for i in range(bsz):
            for j in range(dout):
                out[i, j] += b[j]
                if relu and out[i, j] < 0.0:
                    out[i, j] = 0.0
    return out_arr


def linear_backward(double[:, ::1] g_y, double[:, ::1] x, double[:, ::1] w,
                    bint need_dx):
    cdef int bsz = g_y.shape[0], dout = g_y.shape[1], din = x.shape[1]
    dw_arr = np.empty((din, dout), dtype=np.float64)
    db_arr = np.zeros(dout, dtype=np.float64)
    cdef double[:, ::1] dw = dw_arr
    cdef double[::1] db = db_arr
    cdef double[:, ::1] dx
    cdef int i, j
    dx_arr = None
    with nogil:
        # dw (din, dout) = x^T @ g_y
        _gemm_rowmajor(b'T', b'N', din, dout, bsz,
                       &x[0, 0], din, &g_y[0, 0], dout, &dw[0, 0], dout)
        for i in range(bsz):
            for j in range(dout):
                db[j] += g_y[i, j]
    if need_dx:
        dx_arr = np.empty((bsz, din), dtype=np.float64)
        dx = dx_arr
        with nogil:
            # dx (bsz, din) = g_y @ w^T
            _gemm_rowmajor(b'N', b'T', bsz, din, dout,
                           &g_y[0, 0], dout, &w[0, 0], dout, &dx[0, 0], din)
    return dw_arr, db_arr, dx_arr


def relu_grad_inplace(double[:, ::1] g, double[:, ::1] act):
    cdef int n = g.shape[0], m = g.shape[1]
    cdef int i, j
    with nogil:
        for i in range(n):
            for j in range(m):
                if act[i, j] <= 0.0:
                    g[i, j] = 0.0


def adam_update(double[::1] p, double[::1] g, double[::1] m, double[::1] v,
                long t, double lr, double beta1, double beta2, double eps):
    cdef int n = p.shape[0]
    cdef double c1 = 1.0 - beta1 ** t
    cdef double c2 = 1.0 - beta2 ** t
    cdef double mh, vh
    cdef int i
    with nogil:
        for i in range(n):
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i]
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i]
            mh = m[i] / c1
            vh = v[i] / c2
            p[i] -= lr * mh / (sqrt(vh) + eps)


cdef double _ebs_c(double[::1] v, double xi) noexcept nogil:
    cdef double s1 = 0.0, s2 = 0.0, w
    cdef int i
    for i in range(v.shape[0]):
        w = 1.0 / (v[i] + xi)
        s1 += w
        s2 += w * w
    return s1 * s1 / s2


def solve_xi_bisect(double[::1] v, double mebs, double guess, double hi_cap,
                    double rtol):
    """Smallest xi with EBS >= mebs: doubling bracket then bisection.

    Caller guarantees EBS < mebs at xi=0+ and EBS >= mebs at hi_cap.
    """
    cdef double lo = 0.0, hi = guess, mid
    with nogil:
        while _ebs_c(v, hi) < mebs:
            lo = hi
            hi *= 2.0
            if hi >= hi_cap:
                hi = hi_cap
                break
        while hi - lo > 1e-12 + rtol * hi:
            mid = 0.5 * (lo + hi)
            if _ebs_c(v, mid) >= mebs:
                hi = mid
            else:
                lo = mid
    return hi
