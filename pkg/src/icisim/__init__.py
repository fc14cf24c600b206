"""Simulation and analysis toolkit for inverters with capacitive inertia.

Covers the single-inverter model, networked primary (droop) and
distributed secondary (consensus) control, closed-form and Newton
equilibrium computation, energy-function stability certification, and a
scenario-driven CLI.
"""

from .errors import (DomainError, DroopCapabilityError, IcisimError,
                     InfeasibleError, ScenarioError, SecurityConstraintError)
from .grid import CommGraph, GridTopology, edge_coupling, incidence_matrix, laplacian
from .inverter import (InverterParams, SingleState, VirtualParams,
                       derive_virtual_params, nominal_injection, primary_input,
                       secondary_rhs_single, single_equilibria, single_rhs)
from .network import (NetworkParams, NetworkState, jacobian_primary,
                      jacobian_secondary, line_power, rhs_primary, rhs_secondary)
from .equilibrium import (EquilibriumPrimary, EquilibriumSecondary, delta_n,
                          equilibrium_primary, equilibrium_secondary,
                          optimal_injection, solve_angles, sync_frequencies)
from .lyapunov import (BallRadii, DecreaseReport, EnergyFunction, bregman_shift,
                       check_decrease, sample_positive, second_differences)
from .scenario import (DEFAULT_COST_SCALE, IntegratorConfig, LoadEvent, Scenario,
                       bundled_path)
from .sim import (Trajectory, initial_state, rk4_step, rocof_max,
                  sharing_ratios, simulate, write_csv)

__version__ = "0.1.0"
