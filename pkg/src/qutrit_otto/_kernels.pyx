# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled second-order Dyson sums; same contract as ``_kernels_py.dyson_sums``.

Two shortcuts over the numpy version: W(-x - i eps) = conj W(x - i eps) for
the built-in correlators (even, real on the real axis), and on a uniform
grid W only depends on k - l, so it is tabulated once per lag.
"""

import numpy as np

cdef extern from "complex.h" nogil:
    double complex csinh(double complex)
    double complex conj(double complex)

cdef double PI = 3.14159265358979323846


cdef inline double complex _w(int code, double param, double complex z) noexcept nogil:
    cdef double complex sh
    if code == 0:
        return -1.0 / (4.0 * PI * PI * z * z)
    if code == 1:
        sh = csinh(0.5 * param * z)
        return -(param * param / (16.0 * PI * PI)) / (sh * sh)
    sh = csinh(PI * param * z)
    return -(param * param / 4.0) / (sh * sh)


def _is_uniform(taus):
    if taus.size < 3:
        return True
    d = np.diff(taus)
    return bool(np.max(np.abs(d - d[0])) <= 1e-9 * abs(d[0]))


def dyson_sums(double[::1] taus, double[::1] cw, double complex[:, :, ::1] jx,
               double complex[:, ::1] rho0, int kind_code, double param, double eps):
    """Return ``(m1, m2 @ rho0)`` for a stationary built-in correlator."""
    if kind_code < 0 or kind_code > 2:
        raise ValueError(f"unknown kind code {kind_code}")
    cdef Py_ssize_t n = taus.shape[0]
    cdef Py_ssize_t k, l, a, b, c
    cdef double complex ieps = 1j * eps
    cdef double complex wlk, wkl, t
    cdef double complex B[3][3]
    cdef double complex D[3][3]
    cdef double complex A[3][3]
    cdef bint uniform = _is_uniform(np.asarray(taus))
    # structurally nonzero entries of J (4 of 9 for the ladder coupling)
    nz = np.argwhere(np.any(np.asarray(jx) != 0, axis=0)).astype(np.intp)
    cdef Py_ssize_t[:, ::1] nzv = np.ascontiguousarray(nz)
    cdef Py_ssize_t m = nz.shape[0], e
    lag_arr = np.zeros(n if uniform else 1, dtype=complex)
    cdef double complex[::1] lag = lag_arr
    m1_arr = np.zeros((3, 3), dtype=complex)
    m2_arr = np.zeros((3, 3), dtype=complex)
    cdef double complex[:, ::1] m1 = m1_arr
    cdef double complex[:, ::1] m2 = m2_arr
    with nogil:
        if uniform:
            # lag[m] = W(tau_m - tau_0 - i eps), m >= 0
            for l in range(n):
                lag[l] = _w(kind_code, param, (taus[l] - taus[0]) - ieps)
        for k in range(n):
            if cw[k] == 0.0:
                continue
            for a in range(3):
                for b in range(3):
                    B[a][b] = 0
                    D[a][b] = 0
            for l in range(n):
                if cw[l] == 0.0:
                    continue
                # wkl = W(tau_k - tau_l - i eps); W(tau_l - tau_k - i eps) is its conjugate
                if uniform:
                    wkl = lag[k - l] if k >= l else conj(lag[l - k])
                else:
                    wkl = _w(kind_code, param, (taus[k] - taus[l]) - ieps)
                wlk = cw[l] * conj(wkl)
                for e in range(m):
                    a = nzv[e, 0]
                    b = nzv[e, 1]
                    B[a][b] = B[a][b] + wlk * jx[l, a, b]
                if l <= k:
                    wkl = cw[l] * wkl
                    if l == k:
                        wkl = 0.5 * wkl
                    for e in range(m):
                        a = nzv[e, 0]
                        b = nzv[e, 1]
                        D[a][b] = D[a][b] + wkl * jx[l, a, b]
            # A = J_k rho0
            for a in range(3):
                for c in range(3):
                    t = 0
                    for b in range(3):
                        t = t + jx[k, a, b] * rho0[b, c]
                    A[a][c] = t
            for a in range(3):
                for c in range(3):
                    t = 0
                    for b in range(3):
                        t = t + A[a][b] * B[b][c]
                    m1[a, c] = m1[a, c] + cw[k] * t
                    t = 0
                    for b in range(3):
                        t = t + jx[k, a, b] * D[b][c]
                    m2[a, c] = m2[a, c] - cw[k] * t
    return m1_arr, m2_arr @ np.asarray(rho0)
