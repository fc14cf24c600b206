"""Equilibrium computation for the networked system.

Closed-form synchronous frequencies come from an aggregate droop
quadratic; the equilibrium angles solve a lossless power-flow problem
B Gamma sin(B^T theta) = r under the security constraint that every
entry of B^T theta stays inside (-pi/2, pi/2). A damped Newton iteration
with the gauge theta_1 = 0 handles the angle solve.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DroopCapabilityError, InfeasibleError, SecurityConstraintError
from .grid import GridTopology, edge_coupling, incidence_matrix
from .network import NetworkParams

_NEWTON_MAX_ITER = 50
_NEWTON_TOL = 1e-12


@dataclass(frozen=True)
class EquilibriumPrimary:
    """Synchronous equilibrium of the droop-controlled network."""

    theta: np.ndarray   # gauge theta[0] = 0
    eta: np.ndarray
    omega_s: float
    omega_u: float
    delta_n: float
    residual: float     # inf-norm of the power-balance residual, W


@dataclass(frozen=True)
class EquilibriumSecondary:
    """Regulated equilibrium of the consensus-controlled network."""

    theta: np.ndarray
    eta: np.ndarray
    omega_bar: float    # equals the nominal frequency
    xi_bar: np.ndarray
    p_m: np.ndarray     # optimal injections xi_bar / q, W
    residual: float


def delta_n(loads, setpoints, d, omega_star):
    """Aggregate droop discriminant omega*^2 - 4 * total mismatch / total damping.

    A negative value is a valid diagnostic (no synchronous point exists).
    """
    loads = np.asarray(loads, dtype=float)
    setpoints = np.asarray(setpoints, dtype=float)
    d = np.asarray(d, dtype=float)
    return omega_star**2 - 4.0 * float(np.sum(loads - setpoints)) / float(np.sum(d))


def sync_frequencies(delta, omega_star):
    """Both roots 0.5*(omega* +- sqrt(Delta_N)) of the aggregate quadratic."""
    if delta <= 0:
        raise DroopCapabilityError("no synchronous equilibrium: Delta_N <= 0")
    root = math.sqrt(delta)
    return 0.5 * (omega_star + root), 0.5 * (omega_star - root)


def solve_angles(residual_target, topology: GridTopology, gamma=None):
    """Solve B Gamma sin(B^T theta) = r for theta with theta[0] = 0.

    The target must be balanced (sum r = 0). Newton steps are damped by
    halving until the residual norm decreases; iterates whose angle
    differences leave (-pi/2, pi/2)^m are likewise damped. Raises
    SecurityConstraintError when no solution exists inside the box.
    """
    r = np.asarray(residual_target, dtype=float)
    b = incidence_matrix(topology)
    if gamma is None:
        gamma = edge_coupling(topology)
    scale = np.linalg.norm(r)
    if abs(r.sum()) > 1e-6 * max(scale, 1e-300) and scale > 0:
        raise InfeasibleError("target not in range: sum of residual target nonzero")

    n = topology.n
    theta = np.zeros(n)
    if n == 1 or topology.m == 0:
        return theta

    def flow(th):
        return b @ (gamma * np.sin(b.T @ th))

    tol = _NEWTON_TOL * max(1.0, np.max(np.abs(r)))
    f = flow(theta) - r
    fnorm = np.max(np.abs(f))
    for _ in range(_NEWTON_MAX_ITER):
        if fnorm <= tol:
            break
        eta = b.T @ theta
        jac = b @ (gamma * np.cos(eta) * b).T
        # Gauge-reduced system: node 0 angle fixed, its balance row dropped.
        try:
            step = np.linalg.solve(jac[1:, 1:], -f[1:])
        except np.linalg.LinAlgError:
            raise SecurityConstraintError(
                "security constraint infeasible: singular power-flow Jacobian")
        alpha = 1.0
        for _ in range(40):
            trial = theta.copy()
            trial[1:] += alpha * step
            if np.max(np.abs(b.T @ trial)) < 0.5 * math.pi:
                f_trial = flow(trial) - r
                if np.max(np.abs(f_trial)) < fnorm:
                    theta, f, fnorm = trial, f_trial, np.max(np.abs(f_trial))
                    break
            alpha *= 0.5
        else:
            raise SecurityConstraintError(
                "security constraint infeasible: no admissible angle solution")
    else:
        if fnorm > 1e-9 * max(1.0, np.max(np.abs(r))):
            raise SecurityConstraintError(
                "security constraint infeasible: Newton did not converge")
    if np.max(np.abs(b.T @ theta)) >= 0.5 * math.pi:
        raise SecurityConstraintError(
            "security constraint infeasible: angles outside (-pi/2, pi/2)")
    return theta


def equilibrium_primary(loads, setpoints, params: NetworkParams,
                        topology: GridTopology) -> EquilibriumPrimary:
    """Synchronous equilibrium (eta_s, 1 omega_s) of the droop-controlled grid."""
    loads = np.asarray(loads, dtype=float)
    setpoints = np.asarray(setpoints, dtype=float)
    d_total = params.d + params.d_tilde
    delta = delta_n(loads, setpoints, d_total, params.omega_star)
    omega_s, omega_u = sync_frequencies(delta, params.omega_star)
    r = setpoints - loads - d_total * omega_s * (omega_s - params.omega_star)
    theta = solve_angles(r, topology)
    b = incidence_matrix(topology)
    gamma = edge_coupling(topology)
    res = np.max(np.abs(b @ (gamma * np.sin(b.T @ theta)) - r)) if topology.m else 0.0
    return EquilibriumPrimary(theta=theta, eta=b.T @ theta, omega_s=omega_s,
                              omega_u=omega_u, delta_n=delta, residual=res)


def optimal_injection(loads, q):
    """Cost-minimizing injections covering the total load.

    Minimizes 0.5 * P^T Q P subject to sum P = sum loads; the closed form
    allocates the total inversely to the cost coefficients, so
    q_i P_i = q_j P_j for all pairs.
    """
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0):
        raise ValueError("invalid cost: all coefficients must be positive")
    total = float(np.sum(loads))
    return (1.0 / q) * total / float(np.sum(1.0 / q))


def equilibrium_secondary(loads, q, params: NetworkParams,
                          topology: GridTopology) -> EquilibriumSecondary:
    """Regulated equilibrium: omega = 1 omega*, uniform xi, optimal injections."""
    loads = np.asarray(loads, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0):
        raise ValueError("invalid cost: all coefficients must be positive")
    xi_bar = np.full(params.n, float(np.sum(loads)) / float(np.sum(1.0 / q)))
    p_m = xi_bar / q
    theta = solve_angles(p_m - loads, topology)
    b = incidence_matrix(topology)
    gamma = edge_coupling(topology)
    res = (np.max(np.abs(b @ (gamma * np.sin(b.T @ theta)) - (p_m - loads)))
           if topology.m else 0.0)
    return EquilibriumSecondary(theta=theta, eta=b.T @ theta,
                                omega_bar=params.omega_star, xi_bar=xi_bar,
                                p_m=p_m, residual=res)
