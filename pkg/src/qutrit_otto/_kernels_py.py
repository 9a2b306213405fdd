"""Pure-numpy fallback for the discretised second-order Dyson sums.

Both entry points return ``(m1, m2)`` with

    m1 = sum_{k,l} c_k c_l W(tau_l, tau_k) J_k rho0 J_l
    m2 = -sum_{k,l} Theta_kl c_k c_l W(tau_k, tau_l) J_k J_l rho0

where ``c_k = weight_k * chi(tau_k)``, ``J_k`` is the interaction-picture
coupling and Theta_kl is 1 for k > l, 1/2 on the diagonal and 0 otherwise.
Rows are processed in blocks so memory stays O(block * n).
"""

from __future__ import annotations

import math

import numpy as np

KIND_CODES = {"inertial_vacuum": 0, "accelerated_vacuum": 1, "inertial_thermal": 2}

BLOCK = 256


def stationary_w(kind_code: int, param: float, z):
    """Closed-form W(z) for the built-in kinds; z = dtau - i eps."""
    z = np.asarray(z, dtype=complex)
    if kind_code == 0:
        return -1.0 / (4.0 * math.pi ** 2 * z * z)
    if kind_code == 1:
        a = param
        sh = np.sinh(0.5 * a * z)
        return -(a * a / (16.0 * math.pi ** 2)) / (sh * sh)
    if kind_code == 2:
        t = param
        sh = np.sinh(math.pi * t * z)
        return -(t * t / 4.0) / (sh * sh)
    raise ValueError(f"unknown kind code {kind_code}")


def _block(rows, w_kl, w_lk, cw, jx, rho0):
    """m1 and (m2 without the trailing rho0) for the row block ``rows``."""
    n = cw.size
    c = cw[rows, None] * cw[None, :]
    theta = (rows[:, None] > np.arange(n)[None, :]).astype(float)
    theta[np.arange(rows.size), rows] = 0.5
    jk = jx[rows]
    m1 = np.einsum("kl,kab,bc,lcd->ad", c * w_lk, jk, rho0, jx, optimize=True)
    m2 = -np.einsum("kl,kab,lbc->ac", c * theta * w_kl, jk, jx, optimize=True)
    return m1, m2


def dyson_sums(taus, cw, jx, rho0, kind_code: int, param: float, eps: float):
    """Second-order sums for a stationary built-in correlator."""
    taus = np.asarray(taus, dtype=float)
    n = taus.size
    m1 = np.zeros((3, 3), dtype=complex)
    m2 = np.zeros((3, 3), dtype=complex)
    for start in range(0, n, BLOCK):
        rows = np.arange(start, min(n, start + BLOCK))
        dt = taus[rows, None] - taus[None, :]
        w_kl = stationary_w(kind_code, param, dt - 1j * eps)
        w_lk = stationary_w(kind_code, param, -dt - 1j * eps)
        d1, d2 = _block(rows, w_kl, w_lk, cw, jx, rho0)
        m1 += d1
        m2 += d2
    return m1, m2 @ rho0


def dyson_sums_matrix(wmat, cw, jx, rho0):
    """Same sums for a precomputed matrix ``wmat[k, l] = W(tau_k, tau_l)``."""
    n = cw.size
    m1 = np.zeros((3, 3), dtype=complex)
    m2 = np.zeros((3, 3), dtype=complex)
    for start in range(0, n, BLOCK):
        rows = np.arange(start, min(n, start + BLOCK))
        d1, d2 = _block(rows, wmat[rows, :], wmat[:, rows].T, cw, jx, rho0)
        m1 += d1
        m2 += d2
    return m1, m2 @ rho0
