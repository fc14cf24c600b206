"""Single inverter-with-capacitive-inertia model.

The DC-side capacitor plays the role of rotor inertia: the output
frequency tracks the DC voltage through omega = kappa * v_dc, which
turns the DC circuit equation into a swing-like equation

    J * d(omega)/dt = -D * omega - P_ac / omega + u

with J = C_dc / kappa^2 and D = G_dc / kappa^2. All quantities SI.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, DroopCapabilityError


@dataclass(frozen=True)
class InverterParams:
    """Physical DC-side parameters of one inverter."""

    c_dc: float        # capacitance, F
    g_dc: float        # conductance, S
    v_dc_star: float   # nominal DC voltage, V
    omega_star: float  # nominal angular frequency, rad/s

    def __post_init__(self):
        for name in ("c_dc", "g_dc", "v_dc_star", "omega_star"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class VirtualParams:
    """Derived swing-equation parameters."""

    kappa: float  # rad/(s*V)
    j: float      # virtual inertia, W*s^2/rad^2
    d: float      # damping, W*s/rad^2


@dataclass
class SingleState:
    """State of a single inverter under secondary control."""

    omega: float
    chi: float = 0.0   # integrator state, W


def derive_virtual_params(p: InverterParams) -> VirtualParams:
    """kappa = omega*/v_dc*, J = C_dc/kappa^2, D = G_dc/kappa^2."""
    kappa = p.omega_star / p.v_dc_star
    return VirtualParams(kappa=kappa, j=p.c_dc / kappa**2, d=p.g_dc / kappa**2)


def _require_positive(omega):
    if omega <= 0:
        raise DomainError("frequency left positive half-line")


def single_rhs(omega, p_ac, u, vp: VirtualParams):
    """Open-loop acceleration d(omega)/dt for a given control input u."""
    _require_positive(omega)
    return (-vp.d * omega - p_ac / omega + u) / vp.j


def primary_input(omega, p_m, vp: VirtualParams, omega_star, d_tilde=0.0):
    """Primary (droop) control input u = D*omega_star + P_m/omega.

    The optional proportional term is signed so the closed-loop damping
    coefficient becomes D + d_tilde.
    """
    _require_positive(omega)
    return vp.d * omega_star + p_m / omega - d_tilde * (omega - omega_star)


def single_equilibria(p_ell, p_ell_star, vp: VirtualParams, omega_star):
    """Both roots of the droop quadratic D*omega*(omega - omega*) = P_ell* - P_ell.

    Returns (omega_s, omega_u), the stable and unstable synchronous
    frequencies. Requires the discriminant Delta > 0.
    """
    delta = omega_star**2 - 4.0 * (p_ell - p_ell_star) / vp.d
    if delta <= 0:
        raise DroopCapabilityError(
            "no equilibrium: power mismatch exceeds droop capability")
    root = math.sqrt(delta)
    return 0.5 * (omega_star + root), 0.5 * (omega_star - root)


def secondary_rhs_single(state: SingleState, p_ell, vp: VirtualParams, omega_star):
    """Closed-loop dynamics under the integral secondary controller.

    chi integrates the (frequency-weighted) deviation; the unique fixed
    point in omega > 0 is (omega*, P_ell).
    """
    omega = state.omega
    _require_positive(omega)
    u = vp.d * omega_star + state.chi / omega
    omega_dot = (-vp.d * omega - p_ell / omega + u) / vp.j
    chi_dot = -(omega - omega_star) / omega
    return omega_dot, chi_dot


def nominal_injection(p: InverterParams, p_dc_star):
    """Power injected behind the capacitor: P_m = P_dc* - G_dc * v_dc*^2."""
    return p_dc_star - p.g_dc * p.v_dc_star**2
