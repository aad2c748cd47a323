import numpy as np
import pytest

from bosonlab import (
    GridMismatch,
    InsufficientSectors,
    RadialGrid,
    RadialProfile,
    assemble_L_plus,
    nondegeneracy_check,
    spectral_derivative,
    spectrum,
    zero_mode_residual,
)
from bosonlab.linearization import exchange_apply_direct, exchange_matrix
from bosonlab.radial import sector_operator_matrix, weighted_symmetry_defect


class TestSpectralDerivative:
    def test_gaussian(self):
        g = RadialGrid(512, 40.0)
        u = RadialProfile(g, np.exp(-g.r**2 / 2.0))
        d = spectral_derivative(u)
        exact = -g.r * np.exp(-g.r**2 / 2.0)
        assert np.max(np.abs(d.values - exact)) < 1e-8

    def test_solution_derivative_negative(self, small_sol):
        d = spectral_derivative(small_sol.Q)
        # Q is strictly decreasing, so Q' < 0 away from the boundary noise
        interior = small_sol.Q.grid.r < small_sol.Q.grid.r_max / 2
        assert np.max(d.values[interior]) < 0


class TestExchangeTerm:
    @pytest.mark.parametrize("ell", [0, 1, 2])
    def test_matrix_matches_direct(self, ell, small_sol):
        Q = small_sol.Q
        rng = np.random.default_rng(3 + ell)
        K = exchange_matrix(ell, Q)
        for _ in range(3):
            xi = rng.standard_normal(Q.grid.n)
            direct = exchange_apply_direct(ell, Q, xi)
            assert np.max(np.abs(K @ xi - direct)) < 1e-12 * np.max(np.abs(direct))

    def test_weakens_with_ell(self, small_sol):
        # the multipole prefactor 1/(2l+1) shrinks the exchange term
        n0 = np.linalg.norm(exchange_matrix(0, small_sol.Q))
        n2 = np.linalg.norm(exchange_matrix(2, small_sol.Q))
        assert n2 < n0


class TestOperatorAssembly:
    @pytest.mark.parametrize("ell", [0, 1, 2, 3])
    def test_weighted_symmetric(self, ell, small_sol):
        op = assemble_L_plus(ell, small_sol)
        assert weighted_symmetry_defect(op.matrix, op.grid) < 1e-8

    @pytest.mark.parametrize("ell", [0, 1, 2, 3])
    def test_kinetic_plus_potential_nonnegative(self, ell, small_sol):
        # Q > 0 solves (sqrt(-Laplacian) + 1 - V_Q) Q = 0, so this part of
        # the operator must be positive semidefinite in every sector
        g = small_sol.Q.grid
        kin = sector_operator_matrix(ell, g)
        V = small_sol.potential.V.values
        from bosonlab.radial import SectorOperator

        op = SectorOperator(
            ell, g, "L_plus", kin.matrix + np.diag(1.0 - V),
            basis=kin.basis, basis_norms=kin.basis_norms, basis_mult=kin.basis_mult,
            local_diag=1.0 - V, exchange=np.zeros((g.n, g.n)),
        )
        rep = spectrum(op, 1)
        assert rep.eigenvalues[0] > -1e-6

    def test_l0_has_negative_direction(self, small_sol):
        # the scaling direction pushes the l=0 operator below zero
        rep = spectrum(assemble_L_plus(0, small_sol), 1)
        assert rep.eigenvalues[0] < 0


class TestSpectrum:
    def test_k_bounds(self, small_sol):
        op = assemble_L_plus(0, small_sol)
        with pytest.raises(ValueError):
            spectrum(op, 0)
        with pytest.raises(ValueError):
            spectrum(op, op.grid.n + 1)

    def test_eigenvalues_sorted_and_normalized(self, small_sol):
        rep = spectrum(assemble_L_plus(1, small_sol), 4)
        assert np.all(np.diff(rep.eigenvalues) >= 0)
        from bosonlab.radial import norm

        for vec in rep.eigenvectors:
            assert norm(vec) == pytest.approx(1.0, rel=1e-8)

    def test_reference_grid_checked(self, small_sol):
        op = assemble_L_plus(1, small_sol)
        other = RadialProfile(RadialGrid(64, 20.0), np.ones(64))
        with pytest.raises(GridMismatch):
            spectrum(op, 2, reference=other)


class TestNondegeneracy:
    def test_zero_mode_residual_small(self, small_sol):
        assert zero_mode_residual(small_sol) < 1e-2

    def test_requires_l1(self, small_sol):
        with pytest.raises(InsufficientSectors):
            nondegeneracy_check(small_sol, ell_max=0)

    def test_survey_structure(self, small_sol):
        rep = nondegeneracy_check(small_sol, ell_max=2, k=3)
        assert set(rep.sector_gaps) == {0, 1, 2}
        assert abs(rep.zero_eigenvalue) <= rep.tolerance
        assert rep.zero_mode_overlap >= 0.999
