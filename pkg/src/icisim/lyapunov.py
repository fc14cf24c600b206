"""Energy functions and numerical stability certification.

The droop-controlled network admits the energy function

    V = 0.5 * omega^T J omega - (1/omega_s) * sum_k gamma_k cos(eta_k)

and the consensus-controlled one adds 0.5 * xi^T xi with the cosine term
weighted by 1/omega* instead. Shifting either function by its first-order
Taylor expansion at an equilibrium (a Bregman distance) yields a candidate
that vanishes with zero gradient at the anchor and is locally positive
definite while the anchor angles respect the security constraint. The
certification here is numerical: sampled positive definiteness plus
monotone decrease along simulated trajectories.
"""

from dataclasses import dataclass

import numpy as np

from .grid import GridTopology, edge_coupling, incidence_matrix
from .network import NetworkParams

PRIMARY = "primary"
SECONDARY = "secondary"


def _pack(theta, omega, xi=None):
    if xi is None:
        return np.concatenate([theta, omega])
    return np.concatenate([theta, omega, xi])


@dataclass(frozen=True)
class EnergyFunction:
    """Energy function of one controller mode, with its Bregman anchor.

    The state layout is the flat vector (theta, omega) for primary mode
    and (theta, omega, xi) for secondary mode.
    """

    kind: str
    params: NetworkParams
    topology: GridTopology
    anchor: np.ndarray
    omega_s: float = None   # synchronous frequency; required in primary mode

    def __post_init__(self):
        if self.kind not in (PRIMARY, SECONDARY):
            raise ValueError(f"unknown energy kind {self.kind!r}")
        if self.kind == PRIMARY and self.omega_s is None:
            raise ValueError("primary energy needs the synchronous frequency")
        object.__setattr__(self, "anchor", np.asarray(self.anchor, dtype=float))

    @property
    def _weight(self):
        return self.omega_s if self.kind == PRIMARY else self.params.omega_star

    def _split(self, x):
        n = self.params.n
        theta, omega = x[:n], x[n:2 * n]
        xi = x[2 * n:] if self.kind == SECONDARY else None
        return theta, omega, xi

    def value(self, x):
        """Unshifted energy at the flat state x."""
        theta, omega, xi = self._split(np.asarray(x, dtype=float))
        b = incidence_matrix(self.topology)
        gamma = edge_coupling(self.topology)
        v = 0.5 * float(omega @ (self.params.j * omega))
        v -= float(np.sum(gamma * np.cos(b.T @ theta))) / self._weight
        if xi is not None:
            v += 0.5 * float(xi @ xi)
        return v

    def gradient(self, x):
        """Analytic gradient of the unshifted energy."""
        theta, omega, xi = self._split(np.asarray(x, dtype=float))
        b = incidence_matrix(self.topology)
        gamma = edge_coupling(self.topology)
        g_theta = b @ (gamma * np.sin(b.T @ theta)) / self._weight
        g_omega = self.params.j * omega
        if xi is None:
            return np.concatenate([g_theta, g_omega])
        return np.concatenate([g_theta, g_omega, xi])

    def shifted(self, x):
        """Bregman shift: value minus first-order expansion at the anchor."""
        x = np.asarray(x, dtype=float)
        g0 = self.gradient(self.anchor)
        return self.value(x) - float((x - self.anchor) @ g0) - self.value(self.anchor)


def bregman_shift(x, fn: EnergyFunction):
    """Shifted energy at x; zero with zero gradient at the anchor."""
    return fn.shifted(x)


@dataclass(frozen=True)
class BallRadii:
    """Sampling neighborhood of the anchor, per state block (inf-norm)."""

    r_theta: float = 0.1   # rad
    r_omega: float = 1.0   # rad/s
    r_xi_rel: float = 0.01  # fraction of the anchor xi magnitude

    def for_anchor(self, fn: EnergyFunction):
        n = fn.params.n
        radii = [np.full(n, self.r_theta), np.full(n, self.r_omega)]
        if fn.kind == SECONDARY:
            xi_bar = fn.anchor[2 * n:]
            r_xi = self.r_xi_rel * max(np.max(np.abs(xi_bar)), 1e-12)
            radii.append(np.full(n, r_xi))
        return np.concatenate(radii)


def sample_positive(fn: EnergyFunction, radii: BallRadii = None,
                    n_samples=10_000, seed=0):
    """Sampled local positive-definiteness check of the shifted energy.

    Draws perturbations uniformly in the per-block inf-norm ball around
    the anchor and returns (passed, min value, argmin perturbation).
    """
    if radii is None:
        radii = BallRadii()
    r = radii.for_anchor(fn)
    if np.all(r == 0):
        raise ValueError("degenerate sampling ball: all radii zero")
    rng = np.random.default_rng(seed)
    worst = np.inf
    worst_delta = None
    for _ in range(n_samples):
        delta = rng.uniform(-r, r)
        val = fn.shifted(fn.anchor + delta)
        if val < worst:
            worst, worst_delta = val, delta
    return worst > 0.0, worst, worst_delta


def second_differences(fn: EnergyFunction, step=1e-4):
    """Coordinate-wise central second differences of the shifted energy at the anchor."""
    dim = len(fn.anchor)
    out = np.empty(dim)
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = step
        out[i] = (fn.shifted(fn.anchor + e) - 2.0 * fn.shifted(fn.anchor)
                  + fn.shifted(fn.anchor - e)) / step**2
    return out


@dataclass(frozen=True)
class DecreaseReport:
    """Outcome of the monotone-decrease check along a trajectory."""

    passed: bool
    max_increment: float
    tolerance: float
    initial_value: float
    final_value: float


def check_decrease(trajectory, fn: EnergyFunction) -> DecreaseReport:
    """Verify the shifted energy is non-increasing along a simulated run.

    The per-step tolerance is 1e-9 * (1 + |V_s(x(0))|), absorbing
    integrator round-off near the equilibrium.
    """
    xs = trajectory.flat_states(secondary=fn.kind == SECONDARY)
    values = np.array([fn.shifted(x) for x in xs])
    tol = 1e-9 * (1.0 + abs(values[0]))
    increments = np.diff(values)
    max_inc = float(increments.max()) if len(increments) else 0.0
    return DecreaseReport(passed=max_inc <= tol, max_increment=max_inc,
                          tolerance=tol, initial_value=float(values[0]),
                          final_value=float(values[-1]))
