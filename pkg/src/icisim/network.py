"""Vector fields for the networked inverter system.

States are kept in absolute angles theta; the edge angle differences
eta = B^T theta are derived on demand, which keeps eta inside im B^T by
construction. All vector fields are pure functions and raise DomainError
if any frequency leaves the positive half-line.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .grid import CommGraph, GridTopology, edge_coupling, incidence_matrix, laplacian
from .inverter import InverterParams, derive_virtual_params


@dataclass(frozen=True)
class NetworkParams:
    """Per-node virtual inertia/damping plus the shared nominal frequency."""

    j: np.ndarray          # W*s^2/rad^2
    d: np.ndarray          # W*s/rad^2
    omega_star: float      # rad/s
    d_tilde: np.ndarray = None  # extra proportional damping, defaults to 0

    def __post_init__(self):
        object.__setattr__(self, "j", np.asarray(self.j, dtype=float))
        object.__setattr__(self, "d", np.asarray(self.d, dtype=float))
        if self.d_tilde is None:
            object.__setattr__(self, "d_tilde", np.zeros_like(self.j))
        else:
            object.__setattr__(self, "d_tilde", np.asarray(self.d_tilde, dtype=float))
        if np.any(self.j <= 0) or np.any(self.d <= 0) or np.any(self.d_tilde < 0):
            raise ValueError("inertia and damping must be positive")

    @classmethod
    def from_inverters(cls, inverters, d_tilde=None):
        """Derive J, D node-wise from a list of InverterParams."""
        vps = [derive_virtual_params(p) for p in inverters]
        omega_star = inverters[0].omega_star
        if any(p.omega_star != omega_star for p in inverters):
            raise ValueError("all nodes must share one nominal frequency")
        return cls(j=np.array([vp.j for vp in vps]),
                   d=np.array([vp.d for vp in vps]),
                   omega_star=omega_star, d_tilde=d_tilde)

    @property
    def n(self):
        return len(self.j)


@dataclass
class NetworkState:
    """Absolute angles, frequencies and (secondary mode) controller states."""

    theta: np.ndarray
    omega: np.ndarray
    xi: np.ndarray = None

    def eta(self, b):
        return b.T @ self.theta


def _require_positive(omega):
    if np.any(omega <= 0):
        raise DomainError("frequency left positive half-line")


def line_power(theta, b, gamma):
    """Net power each node sends into the lines: B Gamma sin(B^T theta)."""
    return b @ (gamma * np.sin(b.T @ theta))


def rhs_primary(theta, omega, loads, p_m_star, params: NetworkParams, b, gamma):
    """Closed loop under droop control with constant setpoints p_m_star."""
    _require_positive(omega)
    flow = b @ (gamma * np.sin(b.T @ theta))
    omega_dot = ((p_m_star - loads - flow) / omega
                 - (params.d + params.d_tilde) * (omega - params.omega_star)) / params.j
    return omega.copy(), omega_dot


def rhs_secondary(theta, omega, xi, loads, q, lap, params: NetworkParams, b, gamma):
    """Closed loop under the distributed consensus secondary controller.

    q is the diagonal of the cost matrix Q; lap is the communication
    Laplacian. The injections are P_m = xi / q.
    """
    _require_positive(omega)
    flow = b @ (gamma * np.sin(b.T @ theta))
    omega_dot = ((xi / q - loads - flow) / omega
                 - (params.d + params.d_tilde) * (omega - params.omega_star)) / params.j
    xi_dot = -(lap @ xi) - (omega - params.omega_star) / (q * omega)
    return omega.copy(), omega_dot, xi_dot


def jacobian_primary(theta, omega, loads, p_m_star, params: NetworkParams, b, gamma):
    """Analytic Jacobian of rhs_primary w.r.t. (theta, omega), shape 2n x 2n."""
    _require_positive(omega)
    n = params.n
    eta = b.T @ theta
    stiff = b @ (gamma * np.cos(eta) * b).T   # B Gamma [cos eta] B^T
    g = p_m_star - loads - b @ (gamma * np.sin(eta))
    jac = np.zeros((2 * n, 2 * n))
    jac[:n, n:] = np.eye(n)
    jac[n:, :n] = -stiff / (params.j * omega)[:, None]
    jac[n:, n:] = np.diag((-g / omega**2 - params.d - params.d_tilde) / params.j)
    return jac


def jacobian_secondary(theta, omega, xi, loads, q, lap, params: NetworkParams, b, gamma):
    """Analytic Jacobian of rhs_secondary w.r.t. (theta, omega, xi), 3n x 3n."""
    _require_positive(omega)
    n = params.n
    eta = b.T @ theta
    stiff = b @ (gamma * np.cos(eta) * b).T
    g = xi / q - loads - b @ (gamma * np.sin(eta))
    jac = np.zeros((3 * n, 3 * n))
    jac[:n, n:2 * n] = np.eye(n)
    jac[n:2 * n, :n] = -stiff / (params.j * omega)[:, None]
    jac[n:2 * n, n:2 * n] = np.diag((-g / omega**2 - params.d - params.d_tilde) / params.j)
    jac[n:2 * n, 2 * n:] = np.diag(1.0 / (params.j * q * omega))
    jac[2 * n:, n:2 * n] = np.diag(-params.omega_star / (q * omega**2))
    jac[2 * n:, 2 * n:] = -lap
    return jac
