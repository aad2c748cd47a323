import numpy as np
import pytest
from scipy.special import spherical_jn

from bosonlab import (
    GridMismatch,
    RadialGrid,
    RadialProfile,
    SpectralProfile,
    apply_half_laplacian,
    forward_transform,
    inner_product,
    inverse_transform,
    mass,
    sector_operator_matrix,
)
from bosonlab.radial import _bessel_zeros, weighted_symmetry_defect


def smooth_profile(grid):
    return RadialProfile(grid, np.exp(-grid.r**2 / 4.0) * (1.0 + grid.r))


class TestGrid:
    def test_node_layout(self):
        g = RadialGrid(8, 9.0)
        assert g.h == 1.0
        assert np.allclose(g.r, np.arange(1, 9, dtype=float))
        assert np.allclose(g.rho, np.arange(1, 9) * np.pi / 9.0)
        assert np.allclose(g.w, 4 * np.pi * g.r**2 * g.h)
        assert g.rho_max == pytest.approx(8 * np.pi / 9.0)

    def test_arrays_immutable(self):
        g = RadialGrid(8, 9.0)
        with pytest.raises(ValueError):
            g.r[0] = 5.0

    def test_validation(self):
        with pytest.raises(ValueError):
            RadialGrid(2, 1.0)
        with pytest.raises(ValueError):
            RadialGrid(8, -1.0)

    def test_equality_by_shape(self):
        assert RadialGrid(8, 9.0) == RadialGrid(8, 9.0)
        assert RadialGrid(8, 9.0) != RadialGrid(16, 9.0)


class TestProfiles:
    def test_length_checked(self):
        g = RadialGrid(8, 9.0)
        with pytest.raises(ValueError):
            RadialProfile(g, np.ones(7))

    def test_finite_checked(self):
        g = RadialGrid(8, 9.0)
        vals = np.ones(8)
        vals[3] = np.nan
        with pytest.raises(ValueError):
            RadialProfile(g, vals)

    def test_grid_mismatch(self):
        a = RadialProfile(RadialGrid(8, 9.0), np.ones(8))
        b = RadialProfile(RadialGrid(8, 10.0), np.ones(8))
        with pytest.raises(GridMismatch):
            inner_product(a, b)


class TestTransforms:
    def test_round_trip(self):
        g = RadialGrid(256, 40.0)
        f = smooth_profile(g)
        back = inverse_transform(forward_transform(f))
        assert np.max(np.abs(back.values - f.values)) < 1e-12

    def test_half_laplacian_eigenfunction(self):
        # sin(rho_k r)/r is an exact eigenfunction with eigenvalue rho_k
        g = RadialGrid(256, 40.0)
        k = 17
        f = RadialProfile(g, np.sin(g.rho[k] * g.r) / g.r)
        out = apply_half_laplacian(f)
        assert np.max(np.abs(out.values - g.rho[k] * f.values)) < 1e-10

    def test_half_laplacian_positive_form(self):
        g = RadialGrid(256, 40.0)
        f = smooth_profile(g)
        assert inner_product(f, apply_half_laplacian(f)) > 0

    def test_mass_parseval(self):
        # the weighted mass equals the spectral-side quadrature of |F|^2
        g = RadialGrid(256, 40.0)
        f = smooth_profile(g)
        F = forward_transform(f)
        drho = np.pi / g.r_max
        spectral = np.sum(g.rho**2 * F.values**2) * drho / (2 * np.pi**2)
        assert spectral == pytest.approx(mass(f), rel=1e-12)


class TestBesselZeros:
    def test_l0_zeros(self):
        assert np.allclose(_bessel_zeros(0, 5), np.pi * np.arange(1, 6))

    @pytest.mark.parametrize("ell", [1, 2, 3, 5])
    def test_zeros_are_roots_and_ordered(self, ell):
        z = _bessel_zeros(ell, 20)
        assert len(z) == 20
        assert np.all(np.diff(z) > 0)
        assert np.max(np.abs(spherical_jn(ell, z))) < 1e-10


class TestSectorOperators:
    @pytest.mark.parametrize("ell", [0, 1, 2, 3])
    def test_weighted_symmetry(self, ell):
        g = RadialGrid(128, 30.0)
        op = sector_operator_matrix(ell, g)
        assert weighted_symmetry_defect(op.matrix, g) < 1e-8

    def test_l0_matches_transform_route(self):
        g = RadialGrid(128, 30.0)
        f = smooth_profile(g)
        op = sector_operator_matrix(0, g)
        assert np.max(np.abs(op.apply(f).values - apply_half_laplacian(f).values)) < 1e-9

    @pytest.mark.parametrize("ell", [2, 3])
    def test_dirichlet_spectrum_is_multipliers(self, ell):
        # in the Dirichlet j_l basis the operator is diag(z_k/R), so the
        # low eigenvalues must be the multipliers themselves
        from bosonlab.linearization import spectrum

        g = RadialGrid(128, 30.0)
        rep = spectrum(sector_operator_matrix(ell, g), 3)
        expected = _bessel_zeros(ell, 3) / g.r_max
        assert np.max(np.abs(rep.eigenvalues - expected)) < 1e-8

    def test_l1_commutes_with_derivative(self):
        # sqrt(-Laplacian) commutes with translations, so applying the
        # l=1 operator to u' must match differentiating the l=0 result
        from bosonlab.linearization import spectral_derivative

        g = RadialGrid(256, 30.0)
        u = RadialProfile(g, np.exp(-g.r**2 / 2.0))
        up = RadialProfile(g, -g.r * np.exp(-g.r**2 / 2.0))
        lhs = sector_operator_matrix(1, g).apply(up).values
        rhs = spectral_derivative(apply_half_laplacian(u)).values
        assert np.linalg.norm(lhs - rhs) < 1e-10 * np.linalg.norm(rhs)

    def test_apply_checks_grid(self):
        op = sector_operator_matrix(0, RadialGrid(64, 30.0))
        other = RadialProfile(RadialGrid(64, 31.0), np.ones(64))
        with pytest.raises(GridMismatch):
            op.apply(other)

    def test_negative_sector_rejected(self):
        with pytest.raises(ValueError):
            sector_operator_matrix(-1, RadialGrid(64, 30.0))


def test_spectral_profile_validation():
    g = RadialGrid(8, 9.0)
    with pytest.raises(ValueError):
        SpectralProfile(g, np.ones(5))
