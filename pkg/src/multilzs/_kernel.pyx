# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled propagation kernel for arrow-shaped real symmetric Hamiltonians.

H(t) has diagonal (q(t), eps_1, ..., eps_N) and couplings delta_i between
the qubit (index 0) and each TLS. Each step applies exp(-i H dt) exactly
through a Jacobi eigendecomposition, warm-started from the previous
eigenvectors so that one sweep usually suffices.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, cos, sin
from libc.stdlib cimport malloc, free

cnp.import_array()

DEF MAX_SWEEPS = 60


cdef inline void _jacobi(double* a, double* v, int n) noexcept nogil:
    """Diagonalise symmetric a (row-major n x n) in place, accumulating v <- v J."""
    cdef int sweep, p, q, k
    cdef double off, scale, apq, theta, t, c, s, tau, akp, akq, vkp, vkq, app, aqq
    for sweep in range(MAX_SWEEPS):
        off = 0.0
        scale = 0.0
        for p in range(n):
            scale += a[p * n + p] * a[p * n + p]
            for q in range(p + 1, n):
                off += a[p * n + q] * a[p * n + q]
        if off <= 1e-30 * scale or off == 0.0:
            return
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p * n + q]
                if apq == 0.0:
                    continue
                app = a[p * n + p]
                aqq = a[q * n + q]
                # negligible against both diagonal entries: drop it
                if fabs(app) + 100.0 * fabs(apq) == fabs(app) and fabs(aqq) + 100.0 * fabs(apq) == fabs(aqq):
                    a[p * n + q] = 0.0
                    a[q * n + p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                a[p * n + p] = app - t * apq
                a[q * n + q] = aqq + t * apq
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
                for k in range(n):
                    if k != p and k != q:
                        akp = a[k * n + p]
                        akq = a[k * n + q]
                        a[k * n + p] = akp - s * (akq + tau * akp)
                        a[k * n + q] = akq + s * (akp - tau * akq)
                        a[p * n + k] = a[k * n + p]
                        a[q * n + k] = a[k * n + q]
                for k in range(n):
                    vkp = v[k * n + p]
                    vkq = v[k * n + q]
                    v[k * n + p] = vkp - s * (vkq + tau * vkp)
                    v[k * n + q] = vkq + s * (vkp - tau * vkq)


cdef inline void _orthonormalize(double* v, int n) noexcept nogil:
    """Modified Gram-Schmidt on the columns of v (row-major)."""
    cdef int i, j, k
    cdef double dot, nrm
    for j in range(n):
        for i in range(j):
            dot = 0.0
            for k in range(n):
                dot += v[k * n + i] * v[k * n + j]
            for k in range(n):
                v[k * n + j] -= dot * v[k * n + i]
        nrm = 0.0
        for k in range(n):
            nrm += v[k * n + j] * v[k * n + j]
        nrm = 1.0 / sqrt(nrm)
        for k in range(n):
            v[k * n + j] *= nrm


def evolve_arrow(double[::1] qubit_diag, double[::1] eps, double[::1] delta,
                 double dt, psi0, double step_tol=1e-12):
    """Propagate psi0 through len(qubit_diag) steps of length dt.

    Returns (psi, bad_step, max_step_drift): bad_step is the first step whose
    norm change exceeds step_tol, or -1.
    """
    cdef Py_ssize_t nsteps = qubit_diag.shape[0]
    cdef int ntls = eps.shape[0]
    cdef int n = ntls + 1
    cdef Py_ssize_t step
    cdef int i, j, k
    cdef double acc, lam, cr, ci, nrm_prev, nrm, drift, max_drift = 0.0
    cdef Py_ssize_t bad_step = -1
    if delta.shape[0] != ntls:
        raise ValueError("eps and delta lengths differ")
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] psi_in = np.ascontiguousarray(psi0, dtype=np.complex128)
    if psi_in.shape[0] != n:
        raise ValueError("state length must be len(eps) + 1")

    cdef double* v = <double*> malloc(n * n * sizeof(double))
    cdef double* a = <double*> malloc(n * n * sizeof(double))
    cdef double* hv = <double*> malloc(n * n * sizeof(double))
    cdef double* re = <double*> malloc(n * sizeof(double))
    cdef double* im = <double*> malloc(n * sizeof(double))
    cdef double* cre = <double*> malloc(n * sizeof(double))
    cdef double* cim = <double*> malloc(n * sizeof(double))
    if not (v and a and hv and re and im and cre and cim):
        free(v); free(a); free(hv); free(re); free(im); free(cre); free(cim)
        raise MemoryError()

    for i in range(n):
        re[i] = psi_in[i].real
        im[i] = psi_in[i].imag
        for j in range(n):
            v[i * n + j] = 1.0 if i == j else 0.0
    nrm_prev = 0.0
    for i in range(n):
        nrm_prev += re[i] * re[i] + im[i] * im[i]
    nrm_prev = sqrt(nrm_prev)

    with nogil:
        for step in range(nsteps):
            # hv = H v, using the arrow structure
            for j in range(n):
                acc = qubit_diag[step] * v[j]
                for k in range(ntls):
                    acc += delta[k] * v[(k + 1) * n + j]
                hv[j] = acc
                for i in range(1, n):
                    hv[i * n + j] = delta[i - 1] * v[j] + eps[i - 1] * v[i * n + j]
            # a = v^T H v
            for i in range(n):
                for j in range(i, n):
                    acc = 0.0
                    for k in range(n):
                        acc += v[k * n + i] * hv[k * n + j]
                    a[i * n + j] = acc
                    a[j * n + i] = acc
            _jacobi(a, v, n)
            # rotations accumulated over many steps drift off orthogonality
            if step % 64 == 63:
                _orthonormalize(v, n)
            # c = v^T psi, phase, psi = v c
            for i in range(n):
                cr = 0.0
                ci = 0.0
                for k in range(n):
                    cr += v[k * n + i] * re[k]
                    ci += v[k * n + i] * im[k]
                lam = a[i * n + i] * dt
                cre[i] = cr * cos(lam) + ci * sin(lam)
                cim[i] = ci * cos(lam) - cr * sin(lam)
            nrm = 0.0
            for k in range(n):
                cr = 0.0
                ci = 0.0
                for i in range(n):
                    cr += v[k * n + i] * cre[i]
                    ci += v[k * n + i] * cim[i]
                re[k] = cr
                im[k] = ci
                nrm += cr * cr + ci * ci
            nrm = sqrt(nrm)
            drift = fabs(nrm - nrm_prev)
            if drift > max_drift:
                max_drift = drift
            if drift > step_tol and bad_step < 0:
                bad_step = step
            nrm_prev = nrm

    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        out[i] = complex(re[i], im[i])
    free(v); free(a); free(hv); free(re); free(im); free(cre); free(cim)
    return out, bad_step, max_drift
