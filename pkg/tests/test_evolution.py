import math

import numpy as np
import pytest

from dqg.config import InitialDataSpec, SimConfig
from dqg.errors import CFLViolation, NumericalBlowupError
from dqg.evolution import Snapshot, Stepper, cfl_dt, nonlinear_term, run, step
from dqg.spectral import (
    GridSpec,
    SpectralField,
    dealias,
    l2_norm,
    physical_values,
    resample,
    single_mode,
)
from dqg.verification import check_temporal_order
from conftest import random_real


def fixed(**kw):
    kw.setdefault("dt_policy", "fixed")
    kw.setdefault("diagnostic_stride", 10 ** 9)
    return SimConfig(**kw)


class TestNonlinearTerm:
    def test_single_mode_is_steady_under_transport(self, grid64):
        nl = nonlinear_term(single_mode(grid64, 1, 0))
        assert np.max(np.abs(nl.coeffs)) < 1e-15

    def test_same_shell_pair_is_steady(self, grid64):
        # sin x1 + cos x2 has every mode on |xi| = 1, so J(theta) is parallel to grad theta
        theta = single_mode(grid64, 1, 0) + single_mode(grid64, 0, 1, kind="cos")
        assert np.max(np.abs(nonlinear_term(theta).coeffs)) < 1e-15

    def test_two_scale_oracle(self, grid64):
        theta = single_mode(grid64, 1, 0) + single_mode(grid64, 0, 2, kind="cos")
        x1, x2 = grid64.nodes()
        expected = np.cos(x1) * np.sin(2 * x2)
        got = physical_values(nonlinear_term(theta))
        assert np.max(np.abs(got - expected)) < 1e-13

    def test_zero_field(self, grid64):
        assert np.count_nonzero(nonlinear_term(SpectralField.zeros(grid64)).coeffs) == 0

    def test_constant_field(self, grid64):
        c = np.zeros((64, 64), complex)
        c[0, 0] = 3.0
        assert np.count_nonzero(nonlinear_term(SpectralField(grid64, c)).coeffs) == 0

    def test_mean_of_output_vanishes(self, grid64, rng):
        nl = nonlinear_term(random_real(grid64, rng))
        assert abs(nl.mean) <= 1e-12 * np.max(np.abs(nl.coeffs))

    def test_output_is_real_and_dealiased(self, grid64, rng):
        nl = nonlinear_term(random_real(grid64, rng))
        assert nl.symmetry_defect() < 1e-14
        assert np.count_nonzero(nl.coeffs[~grid64.dealias_mask]) == 0

    def test_transport_preserves_l2(self, grid64, rng):
        # int theta (u . grad theta) = 0 for divergence-free u
        theta = random_real(grid64, rng)
        nl = nonlinear_term(theta)
        dot = np.vdot(theta.coeffs, nl.coeffs).real
        assert abs(dot) < 1e-12 * l2_norm(theta) * l2_norm(nl)

    def test_quadratic(self, grid64, rng):
        theta = random_real(grid64, rng)
        a = nonlinear_term(theta).coeffs
        b = nonlinear_term(theta * 3).coeffs
        assert np.max(np.abs(b - 9 * a)) < 1e-12 * np.max(np.abs(b))


class TestStep:
    def test_single_mode_decay(self):
        cfg = fixed(n=32, alpha=0.75, kappa=1.0)
        s = single_mode(cfg.grid, 1, 0)
        dt = 0.01
        out = step(Snapshot(0.0, s), dt, cfg)
        assert out.time == dt
        assert np.max(np.abs(out.theta.coeffs - math.exp(-dt) * s.coeffs)) < 1e-10

    def test_inviscid_single_mode_unchanged(self):
        cfg = fixed(n=32, kappa=0.0)
        s = single_mode(cfg.grid, 1, 0)
        out = step(Snapshot(0.0, s), 0.1, cfg)
        assert np.max(np.abs(out.theta.coeffs - s.coeffs)) < 1e-15

    def test_mean_is_conserved(self, grid64, rng):
        cfg = fixed(n=64)
        theta = dealias(random_real(grid64, rng)) * 0.2
        c = theta.coeffs.copy()
        c[0, 0] = 0.3
        state = Snapshot(0.0, theta.with_coeffs(c))
        stepper = Stepper(cfg)
        for _ in range(5):
            state = step(state, 1e-3, cfg, stepper)
        assert state.theta.mean == pytest.approx(0.3, abs=1e-15)

    def test_realness_is_kept(self, grid64, rng):
        cfg = fixed(n=64)
        state = Snapshot(0.0, random_real(grid64, rng) * 0.2)
        for _ in range(5):
            state = step(state, 1e-3, cfg)
        assert state.theta.symmetry_defect() < 1e-14

    def test_nonpositive_dt(self, grid64):
        with pytest.raises(ValueError):
            step(Snapshot(0.0, single_mode(grid64, 1, 0)), 0.0, fixed(n=64))

    def test_cfl_violation(self, grid64):
        cfg = SimConfig(n=64, dt_policy="cfl", dt_max=10.0)
        theta = single_mode(grid64, 2, 1, amplitude=50.0)
        limit = cfl_dt(theta, cfg)
        with pytest.raises(CFLViolation) as info:
            step(Snapshot(0.0, theta), 2 * limit, cfg)
        assert info.value.required_dt == pytest.approx(limit)

    def test_blowup_on_non_finite_input(self, grid64):
        c = np.zeros((64, 64), complex)
        c[1, 2] = np.nan
        with pytest.raises(NumericalBlowupError):
            step(Snapshot(0.0, SpectralField(grid64, c)), 1e-3, fixed(n=64))


class TestCFL:
    def test_zero_field_gets_the_cap(self, grid64):
        cfg = SimConfig(n=64, dt_max=0.01)
        assert cfl_dt(SpectralField.zeros(grid64), cfg) == 0.01

    def test_formula(self, grid64):
        # sin x1 has |u| = |cos x1|, maximal on the node x1 = 0
        cfg = SimConfig(n=64, dt_max=1.0, cfl_number=0.5)
        assert cfl_dt(single_mode(grid64, 1, 0), cfg) == pytest.approx(0.5 * 2 * math.pi / 64, rel=1e-13)

    def test_doubling_n_halves_dt(self):
        cfg = SimConfig(n=64, dt_max=1.0)
        a = cfl_dt(single_mode(GridSpec(64), 3, 1), cfg)
        b = cfl_dt(single_mode(GridSpec(128), 3, 1), cfg.with_(n=128))
        assert b == pytest.approx(a / 2, rel=1e-12)

    def test_cap(self, grid64):
        cfg = SimConfig(n=64, dt_max=1e-4)
        assert cfl_dt(single_mode(grid64, 1, 0), cfg) == 1e-4


class TestRun:
    @pytest.mark.parametrize("alpha", [0.6, 0.75, 0.9])
    def test_one_dimensional_exact_decay(self, alpha):
        cfg = fixed(n=64, alpha=alpha, t_end=1.0, dt=1e-2,
                    initial_data=InitialDataSpec(kind="one_dimensional"))
        final, _ = run(cfg)
        g = cfg.grid
        exact = SpectralField.zeros(g)
        for m in range(1, 5):
            exact = exact + single_mode(g, m, 0, amplitude=math.exp(-m ** (2 * alpha)) / m ** 2)
        assert l2_norm(final.theta - exact) < 1e-8
        assert final.time == pytest.approx(1.0)

    def test_zero_duration(self):
        cfg = SimConfig(n=32, t_end=0.0, initial_data=InitialDataSpec(seed=4))
        final, series = run(cfg)
        assert final.time == 0 and len(series) == 1

    def test_cfl_run_reaches_t_end(self):
        cfg = SimConfig(n=32, t_end=0.05, initial_data=InitialDataSpec(k_hi=4, seed=2))
        final, series = run(cfg)
        assert final.time == pytest.approx(0.05, abs=1e-12)
        assert series.times[0] == 0 and series.times[-1] == pytest.approx(0.05, abs=1e-12)

    def test_snapshots_and_stride(self):
        cfg = fixed(n=32, t_end=0.1, dt=0.01, diagnostic_stride=3,
                    initial_data=InitialDataSpec(k_hi=4, seed=2))
        final, series, snaps = run(cfg, keep_snapshots=True)
        assert [round(s.time, 12) for s in snaps] == [0.0, 0.03, 0.06, 0.09, 0.1]
        assert len(series) == len(snaps)
        assert snaps[-1] is final

    def test_deterministic(self):
        cfg = fixed(n=32, t_end=0.1, dt=0.01, initial_data=InitialDataSpec(k_hi=4, seed=7))
        a, _ = run(cfg)
        b, _ = run(cfg)
        assert np.array_equal(a.theta.coeffs, b.theta.coeffs)

    def test_spatial_resolution_converged(self):
        spec = InitialDataSpec(k_hi=4, seed=11, target=5.0)
        base = dict(t_end=0.5, dt=5e-3, alpha=0.75, initial_data=spec)
        lo, _ = run(fixed(n=64, **base))
        theta0 = resample(run(fixed(n=64, **{**base, "t_end": 0.0}))[0].theta, 128)
        hi, _ = run(fixed(n=128, **base), theta0=theta0)
        assert l2_norm(resample(lo.theta, 128) - hi.theta) < 1e-8

    def test_fourth_order_in_time(self):
        rep = check_temporal_order(n=32, T=0.5, dts=(0.05, 0.025, 0.0125))
        assert rep.passed, rep.parameters
