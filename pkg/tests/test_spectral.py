import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqg.errors import ConfigurationError
from dqg.spectral import (
    PARSEVAL_CONSTANT,
    GridSpec,
    PhysicalField,
    SpectralField,
    dealias,
    fractional_laplacian,
    geostrophic_velocity,
    l2_norm,
    lambda_power,
    lp_norm,
    resample,
    riesz_transform,
    single_mode,
    to_physical,
    to_spectral,
)
from conftest import random_real


def physical(grid, fn):
    x1, x2 = grid.nodes()
    return PhysicalField(grid, fn(x1, x2))


class TestGridSpec:
    @pytest.mark.parametrize("n", [8, 48, 100, 0])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ConfigurationError):
            GridSpec(n)

    def test_rejects_bad_dealias_fraction(self):
        with pytest.raises(ConfigurationError):
            GridSpec(32, dealias_fraction=0.0)

    def test_frequencies_cover_half_open_range(self):
        f = GridSpec(16).freqs
        assert sorted(f) == list(range(-8, 8))


class TestTransforms:
    def test_zero_field(self, grid64):
        g = PhysicalField(grid64, np.zeros((64, 64)))
        assert np.all(to_spectral(g).coeffs == 0)
        assert np.all(to_physical(SpectralField.zeros(grid64)).values == 0)

    def test_cosine_has_two_coefficients(self, grid64):
        f = to_spectral(physical(grid64, lambda x1, x2: np.cos(x1)))
        mag = np.abs(f.coeffs)
        big = np.argwhere(mag > 1e-12)
        # axis 1 is xi1, axis 0 is xi2
        assert sorted(map(tuple, big)) == [(0, 1), (0, 63)]
        assert mag[0, 1] == pytest.approx(0.5, abs=1e-15)
        assert mag[0, 63] == pytest.approx(mag[0, 1], abs=1e-15)

    def test_round_trip(self, grid64, rng):
        f = random_real(grid64, rng, band_limited=False)
        back = to_spectral(to_physical(f))
        assert np.max(np.abs(back.coeffs - f.coeffs)) <= 1e-12 * np.max(np.abs(f.coeffs))

    def test_shape_mismatch(self, grid64):
        with pytest.raises(ConfigurationError):
            SpectralField(grid64, np.zeros((32, 32)))
        with pytest.raises(ConfigurationError):
            to_spectral(PhysicalField(GridSpec(32), np.zeros((32, 32))), grid64)

    def test_nan_rejected(self, grid64):
        v = np.zeros((64, 64))
        v[3, 3] = np.nan
        with pytest.raises(ConfigurationError):
            PhysicalField(grid64, v)

    def test_parseval_constant_matches_quadrature(self, rng):
        for n in (32, 64, 128):
            f = random_real(GridSpec(n), rng, band_limited=False)
            direct = lp_norm(to_physical(f), 2) ** 2
            coeff = PARSEVAL_CONSTANT * np.sum(np.abs(f.coeffs) ** 2)
            assert direct == pytest.approx(coeff, rel=1e-10)

    def test_padding_is_exact_interpolation(self, rng):
        g = GridSpec(32)
        f = random_real(g, rng, band_limited=False)
        fine = to_physical(f, 64).values
        assert np.allclose(fine[::2, ::2], to_physical(f).values, atol=1e-13)
        back = resample(resample(f, 64), 32)
        assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-15

    def test_real_fields_are_conjugate_symmetric(self, grid64, rng):
        assert random_real(grid64, rng).symmetry_defect() < 1e-15


class TestMultipliers:
    def test_lambda_on_unit_mode(self, grid64):
        f = single_mode(grid64, 1, 0)
        for s in (0.3, 1.2, 1.5, 2.0):
            assert np.allclose(lambda_power(f, s).coeffs, f.coeffs, atol=1e-15)

    def test_lambda_scales_mode_3_4_by_5(self, grid64):
        f = single_mode(grid64, 3, 4, kind="cos")
        assert np.allclose(lambda_power(f, 1).coeffs, 5 * f.coeffs, atol=1e-14)

    def test_lambda_zero_is_identity(self, grid64, rng):
        f = random_real(grid64, rng, zero_mean=True)
        assert np.array_equal(lambda_power(f, 0).coeffs, f.coeffs)

    def test_lambda_negative_kills_mean(self, grid64, rng):
        f = random_real(grid64, rng)
        out = lambda_power(f, -0.5)
        assert out.coeffs[0, 0] == 0
        assert np.all(np.isfinite(out.coeffs))

    def test_fractional_laplacian_examples(self, grid64):
        s = single_mode(grid64, 1, 0)
        assert np.allclose(fractional_laplacian(s, 0.75).coeffs, s.coeffs, atol=1e-15)
        m = single_mode(grid64, 0, 2, kind="cos")
        assert np.allclose(fractional_laplacian(m, 0.5).coeffs, 2 * m.coeffs, atol=1e-15)
        const = SpectralField(grid64, np.where(np.arange(64 * 64).reshape(64, 64) == 0, 3.0, 0))
        assert np.all(fractional_laplacian(const, 0.7).coeffs == 0)

    @pytest.mark.parametrize("alpha", [-0.1, 1.01])
    def test_fractional_laplacian_range(self, grid64, alpha):
        with pytest.raises(ConfigurationError):
            fractional_laplacian(single_mode(grid64, 1, 0), alpha)

    def test_riesz_examples(self, grid64):
        s = single_mode(grid64, 1, 0)
        expected = single_mode(grid64, 1, 0, kind="cos") * -1
        assert np.allclose(riesz_transform(s, 1).coeffs, expected.coeffs, atol=1e-15)
        assert np.all(np.abs(riesz_transform(s, 2).coeffs) < 1e-16)
        c = np.zeros((64, 64), complex)
        c[0, 0] = 2.0
        assert np.all(riesz_transform(SpectralField(grid64, c), 1).coeffs == 0)
        with pytest.raises(ConfigurationError):
            riesz_transform(s, 3)

    def test_velocity_of_sine(self, grid64):
        u = geostrophic_velocity(single_mode(grid64, 1, 0))
        assert np.all(np.abs(u.u1.coeffs) < 1e-16)
        assert np.allclose(u.u2.coeffs, -single_mode(grid64, 1, 0, kind="cos").coeffs, atol=1e-15)
        z = geostrophic_velocity(SpectralField.zeros(grid64))
        assert l2_norm(z.u1) == 0 and l2_norm(z.u2) == 0

    def test_velocity_divergence_free_100_seeds(self, grid64):
        for seed in range(100):
            theta = random_real(grid64, np.random.default_rng(seed), band_limited=False)
            u = geostrophic_velocity(theta)
            unorm = math.hypot(l2_norm(u.u1), l2_norm(u.u2))
            assert l2_norm(u.divergence()) <= 1e-12 * unorm

    def test_velocity_is_real(self, grid64, rng):
        u = geostrophic_velocity(random_real(grid64, rng, band_limited=False))
        assert u.u1.symmetry_defect() < 1e-15 and u.u2.symmetry_defect() < 1e-15

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), s=st.floats(-1.5, 2.0), j=st.sampled_from([1, 2]))
    def test_riesz_and_lambda_commute(self, seed, s, j):
        f = random_real(GridSpec(32), np.random.default_rng(seed))
        a = riesz_transform(lambda_power(f, s), j)
        b = lambda_power(riesz_transform(f, j), s)
        assert l2_norm(a - b) <= 1e-12 * max(l2_norm(a), 1e-300)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), j=st.sampled_from([1, 2]))
    def test_riesz_is_l2_contraction(self, seed, j):
        f = random_real(GridSpec(32), np.random.default_rng(seed), band_limited=False)
        assert l2_norm(riesz_transform(f, j)) <= l2_norm(f) * (1 + 1e-14)


class TestLpNorm:
    def test_constant(self, grid64):
        one = PhysicalField(grid64, np.ones((64, 64)))
        assert lp_norm(one, 2) == pytest.approx(2 * math.pi, rel=1e-14)

    def test_sine(self, grid64):
        s = physical(grid64, lambda x1, x2: np.sin(x1))
        assert lp_norm(s, 2) == pytest.approx(math.sqrt(2) * math.pi, rel=1e-14)
        # int sin^4 over the torus = 2 pi * 3 pi / 4
        assert lp_norm(s, 4) == pytest.approx((1.5 * math.pi ** 2) ** 0.25, rel=1e-14)
        assert lp_norm(s, math.inf) == pytest.approx(1.0, abs=1e-3)

    @pytest.mark.parametrize("p", [1, 2, 3.5, math.inf])
    def test_zero(self, grid64, p):
        assert lp_norm(PhysicalField(grid64, np.zeros((64, 64))), p) == 0

    def test_p_below_one(self, grid64):
        with pytest.raises(ConfigurationError):
            lp_norm(PhysicalField(grid64, np.ones((64, 64))), 0.5)


class TestDealias:
    def test_cutoff_index(self, grid64):
        assert grid64.dealias_cutoff == 21
        f = np.abs(grid64.freqs)
        kept = np.maximum(f[None, :], f[:, None])[grid64.dealias_mask]
        assert kept.max() == 21

    def test_band_limited_identity(self, grid64):
        f = single_mode(grid64, 21, -21, kind="cos")
        assert np.array_equal(dealias(f).coeffs, f.coeffs)

    def test_mode_beyond_cutoff(self, grid64):
        f = single_mode(grid64, 22, 3)
        assert np.all(dealias(f).coeffs == 0)
