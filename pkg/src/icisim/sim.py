"""Deterministic fixed-step simulation and trajectory metrics.

Scheduled load steps are snapped to the nearest integration step
boundary. The default initial condition is the computed equilibrium of
the pre-event loads, so a run without events stays put up to integrator
round-off.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .equilibrium import equilibrium_primary, equilibrium_secondary
from .errors import DomainError, IcisimError
from .grid import edge_coupling, incidence_matrix, laplacian
from .scenario import PRIMARY, SECONDARY, Scenario


def rk4_step(rhs, state, h):
    """One classical Runge-Kutta step of the autonomous system x' = rhs(x).

    state may be a float or an ndarray; the update is deterministic and
    bitwise reproducible for identical inputs.
    """
    k1 = rhs(state)
    k2 = rhs(state + 0.5 * h * k1)
    k3 = rhs(state + 0.5 * h * k2)
    k4 = rhs(state + h * k3)
    return state + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


@dataclass
class Trajectory:
    """Recorded samples of one simulation run."""

    times: np.ndarray
    theta: np.ndarray            # (k, n)
    omega: np.ndarray            # (k, n)
    xi: np.ndarray = None        # (k, n), secondary mode
    p_m: np.ndarray = None       # (k, n) injections xi/q, secondary mode
    mode: str = SECONDARY

    def __post_init__(self):
        if len(self.times) < 1:
            raise IcisimError("empty trajectory")
        if np.any(np.diff(self.times) <= 0):
            raise IcisimError("trajectory times must be strictly increasing")

    @property
    def f_hz(self):
        return self.omega / (2.0 * math.pi)

    def flat_states(self, secondary=None):
        """Iterate samples as flat (theta, omega[, xi]) vectors."""
        if secondary is None:
            secondary = self.mode == SECONDARY
        for k in range(len(self.times)):
            if secondary:
                yield np.concatenate([self.theta[k], self.omega[k], self.xi[k]])
            else:
                yield np.concatenate([self.theta[k], self.omega[k]])


def initial_state(scenario: Scenario):
    """Pre-event equilibrium: (theta, omega, xi) with xi None in primary mode."""
    if scenario.mode == PRIMARY:
        eq = equilibrium_primary(scenario.loads, scenario.p_m_star,
                                 scenario.params, scenario.topology)
        return eq.theta.copy(), np.full(scenario.n, eq.omega_s), None
    eq = equilibrium_secondary(scenario.loads, scenario.q_eff,
                               scenario.params, scenario.topology)
    return eq.theta.copy(), np.full(scenario.n, eq.omega_bar), eq.xi_bar.copy()


def simulate(scenario: Scenario, start=None) -> Trajectory:
    """Integrate the scenario with RK4, applying events at step boundaries.

    start optionally overrides the initial (theta, omega[, xi]) tuple.
    Raises DomainError (with the partial trajectory attached as
    ``.trajectory``) if a frequency falls below the configured floor.
    """
    cfg = scenario.integrator
    n = scenario.n
    h = cfg.h
    n_steps = int(round(cfg.t_end / h))
    rec = cfg.record_every

    theta, omega, xi = start if start is not None else initial_state(scenario)
    theta = np.array(theta, dtype=float)
    omega = np.array(omega, dtype=float)
    secondary = scenario.mode == SECONDARY
    if secondary:
        if xi is None:
            raise IcisimError("secondary simulation needs an initial xi")
        xi = np.array(xi, dtype=float)

    b = incidence_matrix(scenario.topology)
    bt = np.ascontiguousarray(b.T)
    gamma = edge_coupling(scenario.topology)
    lap = laplacian(scenario.comm) if secondary else None
    d_total = scenario.params.d + scenario.params.d_tilde
    loads = scenario.loads.copy()
    q = scenario.q_eff if secondary else None

    # Events snapped to the nearest step boundary.
    event_steps = {}
    for ev in scenario.events:
        event_steps.setdefault(int(round(ev.time / h)), []).append(ev)

    rec_steps = list(range(0, n_steps + 1, rec))
    if rec_steps[-1] != n_steps:
        rec_steps.append(n_steps)
    times = np.array(rec_steps, dtype=float) * h
    rec_theta = np.empty((len(rec_steps), n))
    rec_omega = np.empty((len(rec_steps), n))
    rec_xi = np.empty((len(rec_steps), n)) if secondary else None

    boundaries = sorted(set(rec_steps) | set(event_steps) | {0, n_steps})
    rec_index = {s: k for k, s in enumerate(rec_steps)}

    filled = 0

    def abort(global_step):
        t_fail = (global_step + 1) * h
        k = max(filled, 1)
        traj = Trajectory(times=times[:k], theta=rec_theta[:k].copy(),
                          omega=rec_omega[:k].copy(),
                          xi=rec_xi[:k].copy() if secondary else None,
                          p_m=None, mode=scenario.mode)
        err = DomainError(
            f"frequency fell below {cfg.omega_min} rad/s at t = {t_fail:.6g} s",
            time=t_fail)
        err.trajectory = traj
        raise err

    step = 0
    for boundary in boundaries:
        if boundary > step:
            chunk = boundary - step
            if secondary:
                fail = _kernels.advance_secondary(
                    theta, omega, xi, loads, q, lap, scenario.params.j,
                    d_total, scenario.params.omega_star, b, bt, gamma,
                    h, chunk, cfg.omega_min)
            else:
                fail = _kernels.advance_primary(
                    theta, omega, loads, scenario.p_m_star, scenario.params.j,
                    d_total, scenario.params.omega_star, b, bt, gamma,
                    h, chunk, cfg.omega_min)
            if fail >= 0:
                abort(step + fail)
            step = boundary
        for ev in event_steps.get(boundary, []):
            loads[ev.node] = ev.new_load
        if boundary in rec_index:
            k = rec_index[boundary]
            rec_theta[k] = theta
            rec_omega[k] = omega
            if secondary:
                rec_xi[k] = xi
            filled = k + 1

    p_m = rec_xi / q if secondary else None
    return Trajectory(times=times, theta=rec_theta, omega=rec_omega,
                      xi=rec_xi, p_m=p_m, mode=scenario.mode)


def rocof_max(trajectory: Trajectory, window_s=None):
    """Largest rate of change of frequency over the recorded samples, Hz/s.

    With window_s unset, adjacent samples are compared. ROCOF is
    measurement-window sensitive; relay-style assessments use windows of
    a few hundred milliseconds, which is what the CLI and acceptance
    suite request.
    """
    if len(trajectory.times) < 2:
        raise IcisimError("trajectory too short for a ROCOF estimate")
    t = trajectory.times
    f = trajectory.f_hz
    if window_s is None:
        stride = 1
    else:
        dt = float(np.median(np.diff(t)))
        stride = max(1, int(round(window_s / dt)))
        stride = min(stride, len(t) - 1)
    df = np.abs(f[stride:] - f[:-stride])
    dt = (t[stride:] - t[:-stride])[:, None]
    return float(np.max(df / dt))


def sharing_ratios(trajectory: Trajectory, q):
    """Relative violation of proportional sharing q_i P_i = q_j P_j at final time."""
    if trajectory.p_m is None:
        raise IcisimError("sharing defined for secondary control")
    q = np.asarray(q, dtype=float)
    c = q * trajectory.p_m[-1]
    mean = float(np.mean(c))
    if mean == 0:
        raise IcisimError("degenerate injections: zero mean weighted power")
    return float((np.max(c) - np.min(c)) / abs(mean))


def write_csv(trajectory: Trajectory, path):
    """Write the trajectory in the stable CSV layout.

    Columns: t_s, theta_1..theta_n, omega_1..omega_n, then xi_1..xi_n and
    pm_1..pm_n in secondary mode, then f_hz_min, f_hz_max. Floats are
    printed with 12 significant digits.
    """
    n = trajectory.theta.shape[1]
    cols = (["t_s"]
            + [f"theta_{i + 1}" for i in range(n)]
            + [f"omega_{i + 1}" for i in range(n)])
    blocks = [trajectory.times[:, None], trajectory.theta, trajectory.omega]
    if trajectory.xi is not None:
        cols += [f"xi_{i + 1}" for i in range(n)] + [f"pm_{i + 1}" for i in range(n)]
        blocks += [trajectory.xi, trajectory.p_m]
    f = trajectory.f_hz
    cols += ["f_hz_min", "f_hz_max"]
    blocks += [f.min(axis=1)[:, None], f.max(axis=1)[:, None]]
    data = np.hstack(blocks)
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in data:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
