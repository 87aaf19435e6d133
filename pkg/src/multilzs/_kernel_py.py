"""Pure numpy version of the propagation kernel.

Same contract as the compiled ``evolve_arrow``. Step unitaries are built in
batches from ``numpy.linalg.eigh`` and multiplied by pairwise reduction, so
the Python-level loop runs per chunk rather than per step.
"""
from __future__ import annotations

import numpy as np

CHUNK = 4096


def _ordered_product(u):
    """u[-1] @ ... @ u[1] @ u[0] for a stack of matrices."""
    while u.shape[0] > 1:
        if u.shape[0] % 2:
            tail = u[-1:]
            u = np.concatenate([np.matmul(u[1:-1:2], u[0:-1:2]), tail])
        else:
            u = np.matmul(u[1::2], u[0::2])
    return u[0]


def evolve_arrow(qubit_diag, eps, delta, dt, psi0, step_tol=1e-12):
    qubit_diag = np.ascontiguousarray(qubit_diag, dtype=float)
    eps = np.asarray(eps, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if eps.shape != delta.shape:
        raise ValueError("eps and delta lengths differ")
    n = eps.size + 1
    psi = np.array(psi0, dtype=complex)
    if psi.shape != (n,):
        raise ValueError("state length must be len(eps) + 1")

    base = np.zeros((n, n))
    base[0, 1:] = base[1:, 0] = delta
    base[np.arange(1, n), np.arange(1, n)] = eps
    eye = np.eye(n)
    bad_step = -1
    max_drift = 0.0
    nrm_prev = np.linalg.norm(psi)
    for start in range(0, qubit_diag.size, CHUNK):
        q = qubit_diag[start:start + CHUNK]
        h = np.broadcast_to(base, (q.size, n, n)).copy()
        h[:, 0, 0] = q
        w, v = np.linalg.eigh(h)
        u = np.matmul(v * np.exp(-1j * w * dt)[:, None, :], np.swapaxes(v, 1, 2))
        # per-step norm change is bounded by the departure of u from unitarity
        dev = np.abs(np.matmul(np.conj(np.swapaxes(u, 1, 2)), u) - eye).max(axis=(1, 2))
        step_drift = dev * nrm_prev
        max_drift = max(max_drift, float(step_drift.max()))
        if bad_step < 0 and np.any(step_drift > step_tol):
            bad_step = start + int(np.argmax(step_drift > step_tol))
        psi = _ordered_product(u) @ psi
        nrm_prev = np.linalg.norm(psi)
    return psi, bad_step, max_drift
