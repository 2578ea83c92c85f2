import numpy as np
import pytest

from mhdlimit.littlewood_paley import gradient_components, sobolev_norm_direct, sup_norm
from mhdlimit.random_fields import random_coefficients, random_scalar_field
from mhdlimit.data import generate_data, random_solenoidal, transport_pair
from mhdlimit.spectral import divergence, make_grid


class TestRandomCoefficients:
    def test_deterministic(self, grid32):
        a = random_coefficients(grid32, 7, 0, (1, 8), 2.0, 2)
        b = random_coefficients(grid32, 7, 0, (1, 8), 2.0, 2)
        assert np.array_equal(a, b)

    def test_streams_and_seeds_differ(self, grid32):
        a = random_coefficients(grid32, 7, 0, (1, 8), 2.0, 1)
        assert not np.array_equal(a, random_coefficients(grid32, 7, 1, (1, 8), 2.0, 1))
        assert not np.array_equal(a, random_coefficients(grid32, 8, 0, (1, 8), 2.0, 1))

    def test_grid_independent(self, grid32, grid64):
        # the same continuum field on any grid resolving the band
        a = random_scalar_field(grid32, 3, 0, (1, 8), 1.5)
        b = random_scalar_field(grid64, 3, 0, (1, 8), 1.5)
        k = [(1, 0), (3, -2), (-5, 4), (0, 8)]
        for kx, ky in k:
            assert a.coeffs[kx % 32, ky % 32] == b.coeffs[kx % 64, ky % 64]

    def test_band_support(self, grid32):
        c = random_coefficients(grid32, 1, 0, (2, 6), 1.0, 1)[0]
        km = grid32.k_magnitude
        assert np.all(c[(km < 2) | (km > 6)] == 0)
        assert np.all(c[(km >= 2) & (km <= 6)] != 0)

    def test_hermitian(self, grid32):
        f = random_scalar_field(grid32, 1, 0, (1, 10), 1.0)
        assert np.array_equal(grid32.reflect(f.coeffs), np.conj(f.coeffs))
        vals = grid32.backward(f.coeffs)
        assert np.max(np.abs(vals.imag)) < 1e-14 * np.max(np.abs(vals.real))

    def test_band_beyond_cutoff(self, grid16):
        with pytest.raises(ValueError):
            random_coefficients(grid16, 0, 0, (1, 6), 1.0, 1)

    def test_empty_band(self, grid16):
        with pytest.raises(ValueError):
            random_coefficients(grid16, 0, 0, (1.1, 1.2), 1.0, 1)
        with pytest.raises(ValueError):
            random_coefficients(grid16, 0, 0, (3, 2), 1.0, 1)

    def test_shell_rms_decay(self, grid64):
        # rms coefficient amplitude per integer shell decays like |k|^-gamma
        gamma = 6.0
        c = random_coefficients(grid64, 5, 0, (1, 8), gamma, 2)
        km = grid64.k_magnitude
        shells = np.arange(1, 9)
        rms = [np.sqrt(np.mean(np.sum(np.abs(c) ** 2, axis=0)[(km >= q - 0.5) & (km < q + 0.5)]))
               for q in shells]
        slope = np.polyfit(np.log2(shells), np.log2(rms), 1)[0]
        assert gamma - 1 <= -slope <= gamma + 1


class TestData:
    def test_divergence_free(self, grid64):
        u0, b0 = generate_data(grid64, 1, 6.5, (1, 8), 20.0, 2.5)
        for v in (u0, b0):
            assert v.divergence_free
            assert np.max(np.abs(divergence(v).values)) < 1e-10 * sup_norm(v)

    def test_amplitude(self, grid64):
        u0, b0 = generate_data(grid64, 1, 6.5, (1, 8), 20.0, 2.5)
        assert sobolev_norm_direct(u0, 2.5) == pytest.approx(20.0, rel=1e-12)
        assert sobolev_norm_direct(b0, 2.5) == pytest.approx(20.0, rel=1e-12)

    def test_independent_streams(self, grid32):
        u0, b0 = generate_data(grid32, 1, 3.0, (1, 8), 1.0)
        assert not np.allclose(u0.coeffs, b0.coeffs)

    def test_bit_reproducible(self, grid32):
        a = generate_data(grid32, 9, 3.0, (1, 8), 1.0)
        b = generate_data(grid32, 9, 3.0, (1, 8), 1.0)
        assert all(np.array_equal(x.coeffs, y.coeffs) for x, y in zip(a, b))

    def test_zero_amplitude(self, grid32):
        v = random_solenoidal(grid32, 0, 0, 2.0, (1, 5), 0.0, 2.5)
        assert np.max(np.abs(v.coeffs)) == 0

    def test_rejects_nonpositive_gamma(self, grid32):
        with pytest.raises(ValueError):
            generate_data(grid32, 1, 0.0, (1, 8), 1.0)

    def test_transport_pair(self):
        g = make_grid(2, 64)
        v, f0 = transport_pair(g, 2)
        assert sup_norm(gradient_components(v)) == pytest.approx(4.0, rel=1e-12)
        assert v.divergence_free
        assert np.all(f0.coeffs[g.k_magnitude > 2] == 0)
