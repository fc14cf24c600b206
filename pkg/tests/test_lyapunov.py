import math

import numpy as np
import pytest

from icisim import (BallRadii, EnergyFunction, GridTopology, NetworkParams,
                    InverterParams, Trajectory, bregman_shift, check_decrease,
                    equilibrium_primary, equilibrium_secondary,
                    sample_positive, second_differences)

OMEGA_STAR = 2.0 * math.pi * 50.0


def two_node_fn(kind="primary", omega_s=OMEGA_STAR):
    topo = GridTopology(2, [(0, 1)], [1.0], [1.0, 1.0])
    inv = InverterParams(c_dc=1e-3, g_dc=0.1, v_dc_star=1000.0,
                         omega_star=OMEGA_STAR)
    params = NetworkParams.from_inverters([inv, inv])
    if kind == "primary":
        anchor = np.zeros(4)
        return EnergyFunction("primary", params, topo, anchor, omega_s=omega_s)
    return EnergyFunction("secondary", params, topo, np.zeros(6))


@pytest.fixture(scope="module")
def fn_primary(table1, table1_post_loads):
    eq = equilibrium_primary(table1_post_loads, table1.loads, table1.params,
                             table1.topology)
    anchor = np.concatenate([eq.theta, np.full(5, eq.omega_s)])
    return EnergyFunction("primary", table1.params, table1.topology, anchor,
                          omega_s=eq.omega_s)


@pytest.fixture(scope="module")
def fn_secondary(table1, table1_post_loads):
    eq = equilibrium_secondary(table1_post_loads, table1.q_eff, table1.params,
                               table1.topology)
    anchor = np.concatenate([eq.theta, np.full(5, eq.omega_bar), eq.xi_bar])
    return EnergyFunction("secondary", table1.params, table1.topology, anchor)


class TestValue:
    def test_zero_at_rest_with_orthogonal_angle(self):
        fn = two_node_fn()
        x = np.array([0.0, math.pi / 2, 0.0, 0.0])
        assert fn.value(x) == pytest.approx(0.0, abs=1e-15)

    def test_omega_homogeneity_degree_two(self):
        fn = two_node_fn()
        rng = np.random.default_rng(2)
        theta = rng.uniform(-1, 1, 2)
        omega = rng.uniform(-5, 5, 2)
        rest = fn.value(np.concatenate([theta, np.zeros(2)]))
        for c in (0.5, 2.0, 3.0):
            kinetic = fn.value(np.concatenate([theta, c * omega])) - rest
            base = fn.value(np.concatenate([theta, omega])) - rest
            assert kinetic == pytest.approx(c**2 * base, rel=1e-12)

    def test_regression_at_table_equilibria(self, fn_primary, fn_secondary):
        assert fn_primary.value(fn_primary.anchor) == pytest.approx(
            -6243.238771722098, rel=1e-9)
        assert fn_secondary.value(fn_secondary.anchor) == pytest.approx(
            -3741.6130261033118, rel=1e-9)

    def test_rejects_unknown_kind(self, table1):
        with pytest.raises(ValueError, match="unknown energy kind"):
            EnergyFunction("tertiary", table1.params, table1.topology,
                           np.zeros(10))

    def test_primary_requires_omega_s(self, table1):
        with pytest.raises(ValueError, match="synchronous frequency"):
            EnergyFunction("primary", table1.params, table1.topology,
                           np.zeros(10))


class TestGradient:
    @pytest.mark.parametrize("kind", ["primary", "secondary"])
    def test_matches_finite_differences(self, kind, fn_primary, fn_secondary):
        fn = fn_primary if kind == "primary" else fn_secondary
        rng = np.random.default_rng(9)
        dim = len(fn.anchor)
        step = 1e-6
        for _ in range(100):
            x = fn.anchor + rng.uniform(-0.3, 0.3, dim)
            grad = fn.gradient(x)
            fd = np.empty(dim)
            for i in range(dim):
                e = np.zeros(dim)
                e[i] = step
                fd[i] = (fn.value(x + e) - fn.value(x - e)) / (2 * step)
            err = np.abs(grad - fd).max() / max(np.abs(grad).max(), 1.0)
            assert err < 1e-5


class TestBregmanShift:
    def test_zero_at_anchor(self, fn_primary, fn_secondary):
        for fn in (fn_primary, fn_secondary):
            assert bregman_shift(fn.anchor, fn) == 0.0

    def test_gradient_vanishes_at_anchor(self, fn_primary, fn_secondary):
        step = 1e-5
        for fn in (fn_primary, fn_secondary):
            dim = len(fn.anchor)
            scale = max(abs(fn.value(fn.anchor)), 1.0)
            for i in range(dim):
                e = np.zeros(dim)
                e[i] = step
                fd = (fn.shifted(fn.anchor + e)
                      - fn.shifted(fn.anchor - e)) / (2 * step)
                assert abs(fd) <= 1e-6 * scale

    def test_matches_quadratic_for_pure_kinetic(self):
        # with theta pinned at the anchor the shift is exactly
        # 0.5 (w - w_bar)^T J (w - w_bar)
        fn = two_node_fn()
        j = fn.params.j
        rng = np.random.default_rng(4)
        for _ in range(20):
            dw = rng.uniform(-3, 3, 2)
            x = fn.anchor.copy()
            x[2:] += dw
            assert fn.shifted(x) == pytest.approx(0.5 * dw @ (j * dw),
                                                  rel=1e-12)


class TestPositivity:
    def test_sampled_positive_primary(self, fn_primary):
        passed, worst, _ = sample_positive(fn_primary, n_samples=10_000, seed=1)
        assert passed
        assert worst > 0.0

    def test_sampled_positive_secondary(self, fn_secondary):
        passed, worst, _ = sample_positive(fn_secondary, n_samples=10_000,
                                           seed=1)
        assert passed
        assert worst > 0.0

    def test_second_differences_positive(self, fn_primary, fn_secondary):
        for fn in (fn_primary, fn_secondary):
            assert np.all(second_differences(fn) > 0.0)

    def test_degenerate_radii_rejected(self, fn_primary):
        with pytest.raises(ValueError, match="degenerate"):
            sample_positive(fn_primary,
                            BallRadii(r_theta=0.0, r_omega=0.0, r_xi_rel=0.0))


class TestDecrease:
    def test_constant_trajectory(self, fn_secondary, table1):
        n = 5
        m = 20
        anchor = fn_secondary.anchor
        traj = Trajectory(
            times=np.linspace(0.0, 1.0, m),
            theta=np.tile(anchor[:n], (m, 1)),
            omega=np.tile(anchor[n:2 * n], (m, 1)),
            xi=np.tile(anchor[2 * n:], (m, 1)),
            p_m=np.tile(anchor[2 * n:] / table1.q_eff, (m, 1)),
            mode="secondary")
        report = check_decrease(traj, fn_secondary)
        assert report.passed
        assert report.max_increment == 0.0
        assert report.initial_value == report.final_value == 0.0
