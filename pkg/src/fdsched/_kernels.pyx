# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled objective kernel: ZF spectral efficiency of one selection.

Same LAPACK sequence as the pure fallback (_kernels_py): zgemm Gram
products, zpotrf/zpocon condition gate, zpotrs solves.  All buffers are
Fortran-ordered because LAPACK is column-major.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log2, sqrt
from scipy.linalg.cython_blas cimport zgemm
from scipy.linalg.cython_lapack cimport zpocon, zpotrf, zpotrs

ctypedef double complex zcx

cdef char *L_ = b"L"
cdef char *N_ = b"N"
cdef char *C_ = b"C"


cdef double _abs2(zcx v) noexcept nogil:
    return v.real * v.real + v.imag * v.imag


cdef int _chol_gate(zcx[::1, :] a, int n, double cond_cap,
                    zcx[::1] work, double[::1] rwork) noexcept:
    """In-place Cholesky of the n x n Gram block plus 1-norm rcond gate.

    Returns 0 ok, 1 not positive definite, 2 condition past the cap.
    """
    cdef int info = 0, i, j
    cdef double anorm = 0.0, col, rcond = 0.0
    for j in range(n):
        col = 0.0
        for i in range(n):
            col += sqrt(_abs2(a[i, j]))
        if col > anorm:
            anorm = col
    zpotrf(L_, &n, &a[0, 0], &n, &info)
    if info != 0:
        return 1
    zpocon(L_, &n, &a[0, 0], &n, &anorm, &rcond, &work[0], &rwork[0], &info)
    if info != 0 or not rcond == rcond or rcond < 1.0 / cond_cap:
        return 2
    return 0


def eval_mask(zcx[:, :] h_u_full, zcx[:, :] h_d_full,
              zcx[:, :] g_full, zcx[:, :] h_si_full,
              const cnp.int64_t[::1] ul, const cnp.int64_t[::1] dl,
              const cnp.int64_t[::1] ra, const cnp.int64_t[::1] ta,
              double p_u, double p_d, double sigma2_bs, double sigma2_dl,
              double cond_cap):
    """Spectral efficiency of one decoded selection; see _kernels_py.eval_mask."""
    cdef int n_u = ul.shape[0], n_d = dl.shape[0]
    cdef int m_r = ra.shape[0], m_t = ta.shape[0]
    cdef int i, j, k, info, bad, nmax
    cdef double se = 0.0, fro, sig, inter, noise, si, gamma
    cdef zcx acc
    cdef zcx one = 1.0, zero = 0.0

    nmax = n_u if n_u > n_d else n_d
    work_np = np.empty(2 * max(nmax, 1), dtype=np.complex128)
    rwork_np = np.empty(max(nmax, 1), dtype=np.float64)
    cdef zcx[::1] work = work_np
    cdef double[::1] rwork = rwork_np

    cdef zcx[::1, :] hd, a, y, w, hu, b, p, hsi, t1, t2

    if n_d > 0:
        hd_np = np.empty((n_d, m_t), dtype=np.complex128, order="F")
        hd = hd_np
        for j in range(m_t):
            for k in range(n_d):
                hd[k, j] = h_d_full[dl[k], ta[j]]
        a_np = np.empty((n_d, n_d), dtype=np.complex128, order="F")
        a = a_np
        zgemm(N_, C_, &n_d, &n_d, &m_t, &one, &hd[0, 0], &n_d,
              &hd[0, 0], &n_d, &zero, &a[0, 0], &n_d)
        bad = _chol_gate(a, n_d, cond_cap, work, rwork)
        if bad:
            return bad, 0.0
        # F_d^H = A^{-1} H_d; W = Y^H / ||Y||_F
        y_np = np.empty((n_d, m_t), dtype=np.complex128, order="F")
        y = y_np
        for j in range(m_t):
            for k in range(n_d):
                y[k, j] = hd[k, j]
        info = 0
        zpotrs(L_, &n_d, &m_t, &a[0, 0], &n_d, &y[0, 0], &n_d, &info)
        if info != 0:
            return 1, 0.0
        fro = 0.0
        for j in range(m_t):
            for k in range(n_d):
                fro += _abs2(y[k, j])
        fro = sqrt(fro)
        w_np = np.empty((m_t, n_d), dtype=np.complex128, order="F")
        w = w_np
        for k in range(n_d):
            for j in range(m_t):
                w[j, k] = y[k, j].conjugate() / fro
        for k in range(n_d):
            acc = 0.0
            for j in range(m_t):
                acc += hd[k, j] * w[j, k]
            sig = _abs2(acc)
            inter = 0.0
            for j in range(n_u):
                inter += _abs2(g_full[dl[k], ul[j]])
            gamma = p_d * sig / (p_u * inter + sigma2_dl)
            se += log2(1.0 + gamma)

    if n_u > 0:
        hu_np = np.empty((m_r, n_u), dtype=np.complex128, order="F")
        hu = hu_np
        for j in range(n_u):
            for i in range(m_r):
                hu[i, j] = h_u_full[ra[i], ul[j]]
        b_np = np.empty((n_u, n_u), dtype=np.complex128, order="F")
        b = b_np
        zgemm(C_, N_, &n_u, &n_u, &m_r, &one, &hu[0, 0], &m_r,
              &hu[0, 0], &m_r, &zero, &b[0, 0], &n_u)
        bad = _chol_gate(b, n_u, cond_cap, work, rwork)
        if bad:
            return bad + 2, 0.0
        p_np = np.empty((n_u, m_r), dtype=np.complex128, order="F")
        p = p_np
        for i in range(m_r):
            for j in range(n_u):
                p[j, i] = hu[i, j].conjugate()
        info = 0
        zpotrs(L_, &n_u, &m_r, &b[0, 0], &n_u, &p[0, 0], &n_u, &info)
        if info != 0:
            return 3, 0.0
        if n_d > 0:
            hsi_np = np.empty((m_r, m_t), dtype=np.complex128, order="F")
            hsi = hsi_np
            for j in range(m_t):
                for i in range(m_r):
                    hsi[i, j] = h_si_full[ra[i], ta[j]]
            t1_np = np.empty((n_u, m_t), dtype=np.complex128, order="F")
            t1 = t1_np
            zgemm(N_, N_, &n_u, &m_t, &m_r, &one, &p[0, 0], &n_u,
                  &hsi[0, 0], &m_r, &zero, &t1[0, 0], &n_u)
            t2_np = np.empty((n_u, n_d), dtype=np.complex128, order="F")
            t2 = t2_np
            zgemm(N_, N_, &n_u, &n_d, &m_t, &one, &t1[0, 0], &n_u,
                  &w[0, 0], &m_t, &zero, &t2[0, 0], &n_u)
        for k in range(n_u):
            noise = 0.0
            for i in range(m_r):
                noise += _abs2(p[k, i])
            si = 0.0
            if n_d > 0:
                for i in range(n_d):
                    si += _abs2(t2[k, i])
            gamma = p_u / (p_d * si + sigma2_bs * noise)
            se += log2(1.0 + gamma)

    return 0, se
