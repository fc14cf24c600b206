"""Numba-compiled RK4 inner loops for the network models.

The acceptance scenario integrates 4e5 steps at h = 5e-5 s; a pure
numpy step loop is too slow for the stated runtime budget, so the hot
path is fused here. The kernels advance the state arrays in place and
return the index of the first step at which a frequency fell below
omega_min, or -1 on success.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def advance_primary(theta, omega, loads, p_m_star, j, d_total, omega_star,
                    b, bt, gamma, h, n_steps, omega_min):
    n = theta.shape[0]
    for step in range(n_steps):
        k1t, k1o = _rhs_primary(theta, omega, loads, p_m_star, j, d_total,
                                omega_star, b, bt, gamma)
        k2t, k2o = _rhs_primary(theta + 0.5 * h * k1t, omega + 0.5 * h * k1o,
                                loads, p_m_star, j, d_total, omega_star, b, bt, gamma)
        k3t, k3o = _rhs_primary(theta + 0.5 * h * k2t, omega + 0.5 * h * k2o,
                                loads, p_m_star, j, d_total, omega_star, b, bt, gamma)
        k4t, k4o = _rhs_primary(theta + h * k3t, omega + h * k3o,
                                loads, p_m_star, j, d_total, omega_star, b, bt, gamma)
        for i in range(n):
            theta[i] += h * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i]) / 6.0
            omega[i] += h * (k1o[i] + 2.0 * k2o[i] + 2.0 * k3o[i] + k4o[i]) / 6.0
        for i in range(n):
            if omega[i] < omega_min:
                return step
    return -1


@njit(cache=True)
def _rhs_primary(theta, omega, loads, p_m_star, j, d_total, omega_star, b, bt, gamma):
    flow = np.dot(b, gamma * np.sin(np.dot(bt, theta)))
    omega_dot = ((p_m_star - loads - flow) / omega
                 - d_total * (omega - omega_star)) / j
    return omega.copy(), omega_dot


@njit(cache=True)
def advance_secondary(theta, omega, xi, loads, q, lap, j, d_total, omega_star,
                      b, bt, gamma, h, n_steps, omega_min):
    n = theta.shape[0]
    for step in range(n_steps):
        k1t, k1o, k1x = _rhs_secondary(theta, omega, xi, loads, q, lap, j,
                                       d_total, omega_star, b, bt, gamma)
        k2t, k2o, k2x = _rhs_secondary(theta + 0.5 * h * k1t, omega + 0.5 * h * k1o,
                                       xi + 0.5 * h * k1x, loads, q, lap, j,
                                       d_total, omega_star, b, bt, gamma)
        k3t, k3o, k3x = _rhs_secondary(theta + 0.5 * h * k2t, omega + 0.5 * h * k2o,
                                       xi + 0.5 * h * k2x, loads, q, lap, j,
                                       d_total, omega_star, b, bt, gamma)
        k4t, k4o, k4x = _rhs_secondary(theta + h * k3t, omega + h * k3o,
                                       xi + h * k3x, loads, q, lap, j,
                                       d_total, omega_star, b, bt, gamma)
        for i in range(n):
            theta[i] += h * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i]) / 6.0
            omega[i] += h * (k1o[i] + 2.0 * k2o[i] + 2.0 * k3o[i] + k4o[i]) / 6.0
            xi[i] += h * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]) / 6.0
        for i in range(n):
            if omega[i] < omega_min:
                return step
    return -1


@njit(cache=True)
def _rhs_secondary(theta, omega, xi, loads, q, lap, j, d_total, omega_star, b, bt, gamma):
    flow = np.dot(b, gamma * np.sin(np.dot(bt, theta)))
    omega_dot = ((xi / q - loads - flow) / omega
                 - d_total * (omega - omega_star)) / j
    xi_dot = -np.dot(lap, xi) - (omega - omega_star) / (q * omega)
    return omega.copy(), omega_dot, xi_dot
