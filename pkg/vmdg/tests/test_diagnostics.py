"""
Diagnostics tests - errors, energies, divergence residuals and convergence orders
"""
import math

import numpy as np
import pytest

from ..Models.diagnostic_model import ConvergenceRow
from ..Models.field_model import CoupledState, DistributionField, EMField, MomentPair, SpatialField
from ..solver.basis_quadrature import l2_project
from ..solver.diagnostics import (DiagnosticsObserver, diagnostic_record, divergence_residuals,
                                  electric_energy, em_l2_errors, eoc, growth_rate, l2_error,
                                  magnetic_energy, normal_jump_norms, order, total_energy)
from ..solver.maxwell_operator import compute_moments, zero_moments
from ..solver.mesh import make_mesh
from ..solver.phase_space import phase_space
from ..solver.timestepper import rk3_step
from ..solver.vlasov_operator import RELATIVISTIC


def _space(n_x=8, lo=0.0, hi=2.0 * math.pi, k=2, v=(-1.0, 1.0), n_v=2):
    return phase_space(make_mesh((lo, hi), [v], n_x, [n_v]), k)


def _spatial_field(space, g):
    return SpatialField(space, l2_project(space.mesh.spatial, space.x_basis, g))


class TestL2Error:
    def test_field_against_itself(self):
        """Test a polynomial of degree <= k has zero error against its own formula"""
        space = _space()
        g = lambda x: 1.0 + x - 0.25 * x ** 2
        assert l2_error(_spatial_field(space, g), g) < 1e-13

    def test_zero_field_against_sine(self):
        """Test ||0 - sin|| on [0, 2 pi] is sqrt(pi)"""
        space = _space(k=1)
        zero = SpatialField(space, np.zeros((8, 2)))
        assert l2_error(zero, np.sin) == pytest.approx(math.sqrt(math.pi), abs=1e-12)

    def test_phase_space_error(self):
        """Test a projected distribution against its exact function converges"""
        g = lambda x, v: np.sin(x) * np.exp(-v ** 2)
        errors = []
        for n in (4, 8, 16):
            space = _space(n_x=n, k=1, v=(-3.0, 3.0), n_v=n)
            f = DistributionField(space, l2_project(space.mesh, space.basis, g))
            errors.append(l2_error(f, g))
        assert math.log2(errors[1] / errors[2]) >= 1.7

    def test_em_groups(self):
        """Test E and B errors are collected per group, missing exact solutions count as 0"""
        space = _space()
        em = EMField(space, ("E2", "B3"))
        em.coefficients[0] = l2_project(space.mesh.spatial, space.x_basis, np.sin)
        errors = em_l2_errors(em, {"B3": np.sin})
        assert errors["E"] == pytest.approx(l2_error(em.component_field("E2"), np.zeros_like))
        assert errors["B"] == pytest.approx(math.sqrt(math.pi), abs=1e-12)


class TestEnergies:
    def test_zero_state(self):
        """Test the zero state has no energy"""
        space = _space()
        state = CoupledState(DistributionField(space), EMField(space, ("E1",)))
        assert total_energy(state) == (0.0, 0.0)

    def test_unit_transverse_field(self):
        """Test E2 = 1 on |Omega_x| = 2 has electromagnetic energy 2"""
        space = _space(n_x=4, lo=0.0, hi=2.0)
        em = EMField(space, ("E2", "B3"))
        em.coefficients[0] = l2_project(space.mesh.spatial, space.x_basis, lambda x: 1.0 + 0.0 * x)
        _, electromagnetic = total_energy(CoupledState(DistributionField(space), em))
        assert electromagnetic == pytest.approx(2.0)
        assert electric_energy(em) == pytest.approx(2.0)
        assert magnetic_energy(em) == 0.0

    def test_constant_distribution_kinetic_energy(self):
        """Test f = c on [-1, 1] has kinetic energy c |Omega_x| (2/3)"""
        space = _space(n_x=4, lo=0.0, hi=2.0)
        f = DistributionField(space, l2_project(space.mesh, space.basis, lambda x, v: 1.5))
        kinetic, _ = total_energy(CoupledState(f, EMField(space, ())))
        assert kinetic == pytest.approx(1.5 * 2.0 * 2.0 / 3.0)

    def test_relativistic_kinetic_weight(self):
        """Test the relativistic energy uses sqrt(1 + v^2) - 1"""
        space = _space(n_x=2, lo=0.0, hi=1.0, k=3, n_v=16)
        f = DistributionField(space, l2_project(space.mesh, space.basis, lambda x, v: 1.0))
        kinetic, _ = total_energy(CoupledState(f, EMField(space, ())), RELATIVISTIC)
        exact = math.sqrt(2.0) + math.asinh(1.0) - 2.0
        assert kinetic == pytest.approx(exact, rel=1e-6)


class TestDivergence:
    def test_reduced_transverse_system(self, random_em):
        """Test only E2 and B3 active gives zero residuals"""
        space = _space()
        em = random_em(space, ("E2", "B3"))
        assert divergence_residuals(em, zero_moments(space), 0.0) == (0.0, 0.0)

    def test_exact_gauss_law(self):
        """Test E1 = x on one cell with rho - rho_i = 1"""
        space = _space(n_x=1, lo=0.0, hi=1.0, k=1)
        em = EMField(space, ("E1",))
        em.coefficients[0] = l2_project(space.mesh.spatial, space.x_basis, lambda x: x)
        moments = MomentPair(_spatial_field(space, lambda x: 3.0 + 0.0 * x), {})
        div_e, div_b = divergence_residuals(em, moments, 2.0)
        assert div_e < 1e-12 and div_b == 0.0

    def test_magnetic_divergence(self):
        """Test B1 = x has ||d_x B1|| = 1 on [0, 1]"""
        space = _space(n_x=2, lo=0.0, hi=1.0, k=1)
        em = EMField(space, ("B1",))
        em.coefficients[0] = l2_project(space.mesh.spatial, space.x_basis, lambda x: x)
        _, div_b = divergence_residuals(em, zero_moments(space), 0.0)
        assert div_b == pytest.approx(1.0)

    @pytest.mark.parametrize("k", [1, 2])
    def test_residual_decays_under_refinement(self, k):
        """Test projected constraint-satisfying fields converge at order >= k - 0.1"""
        residuals = []
        for n in (8, 16, 32):
            space = _space(n_x=n, k=k)
            em = EMField(space, ("E1",))
            em.coefficients[0] = l2_project(space.mesh.spatial, space.x_basis, np.sin)
            moments = MomentPair(_spatial_field(space, lambda x: 1.0 + np.cos(x)), {})
            residuals.append(divergence_residuals(em, moments, 1.0)[0])
        assert math.log2(residuals[-2] / residuals[-1]) >= k - 0.1


class TestRecords:
    def test_record_is_deterministic(self, space_1d1v, random_f, random_em):
        """Test the same state gives bit-identical diagnostics"""
        state = CoupledState(random_f(space_1d1v), random_em(space_1d1v, ("E1",)), 0.25)
        first = diagnostic_record(state).row()
        second = diagnostic_record(state).row()
        assert first == second
        assert first[0] == 0.25

    def test_observer_uses_background_density(self, space_1d1v, random_f):
        """Test the observer's div_e uses rho_i"""
        f = random_f(space_1d1v)
        rho_i = compute_moments(f).rho.integral() / 2.0
        state = CoupledState(f, EMField(space_1d1v, ("E1",)))
        record = DiagnosticsObserver(rho_i=rho_i)(state, 0)
        assert record.mass == pytest.approx(f.mass())
        assert record.div_E_residual >= 0.0


class TestOrders:
    def test_quartering_error(self):
        """Test errors (1, 1/4) on halved h give EOC 2"""
        assert order(1.0, 0.25, 1.0, 0.5) == pytest.approx(2.0)

    def test_flat_error(self):
        """Test errors (1, 1) give EOC 0"""
        assert order(1.0, 1.0, 1.0, 0.5) == 0.0

    def test_nonpositive_error_is_undefined(self):
        """Test EOC of a zero or missing error is None"""
        assert order(1.0, 0.0, 1.0, 0.5) is None
        assert order(None, 1.0, 1.0, 0.5) is None

    def test_synthetic_sequence(self):
        """Test err = C h^2.5 gives EOC 2.5 on every row"""
        rows = [ConvergenceRow(level, 2.0 ** -level, 0.0, {"f": 3.0 * (2.0 ** -level) ** 2.5})
                for level in range(4)]
        table = eoc(rows, ["f"])
        assert table.rows[0].eocs["f"] is None
        for row in table.rows[1:]:
            assert row.eocs["f"] == pytest.approx(2.5, abs=1e-12)
        assert table.final_eoc("f") == pytest.approx(2.5, abs=1e-12)

    def test_temporal_ladder_by_tau(self):
        """Test EOCs measured against tau with dict rows"""
        rows = [{"level": i, "h": 0.1, "tau": 0.1 / 2 ** i, "errors": {"E": 8.0 ** -i}}
                for i in range(3)]
        table = eoc(rows, ["E"], by="tau")
        assert table.final_eoc("E") == pytest.approx(3.0)

    def test_growth_rate(self):
        """Test the fitted slope of 0.5 log(energy)"""
        t = np.linspace(0.0, 5.0, 51)
        energies = 1e-8 * np.exp(2.0 * 0.3 * t)
        assert growth_rate(t, energies) == pytest.approx(0.3)
        assert growth_rate(t, energies, window=(1.0, 2.0)) == pytest.approx(0.3)
        assert growth_rate([0.0], [1.0]) is None


class TestNormalJumps:
    def test_periodic_ramp_jumps_once(self):
        """Test E1 = x on [0, 1) with two cells jumps by 1 at the periodic face only"""
        space = _space(n_x=2, lo=0.0, hi=1.0, k=1)
        em = EMField(space, ("E1",))
        em.coefficients[0] = l2_project(space.mesh.spatial, space.x_basis, lambda x: x)
        assert normal_jump_norms(em) == pytest.approx((1.0, 0.0))

    def test_record_carries_jumps(self, space_1d1v, random_f):
        """Test a constant E1 has no jump and the record reports it"""
        em = EMField(space_1d1v, ("E1",))
        em.coefficients[0] = l2_project(space_1d1v.mesh.spatial, space_1d1v.x_basis,
                                        lambda x: 0.7 + 0.0 * x)
        record = diagnostic_record(CoupledState(random_f(space_1d1v), em))
        assert record.jump_E < 1e-13 and record.jump_B == 0.0


class TestEnergyChange:
    def test_central_flux_energy_change_is_fourth_order(self, random_em):
        """Test without current one RK3 step changes the conserved EM energy by O(tau^4)"""
        space = _space(n_x=4, lo=0.0, hi=2.0, k=1)
        em = random_em(space, ("E1", "E2", "E3", "B1", "B2", "B3"))
        state = CoupledState(DistributionField(space), em)

        def energy_change(tau, substeps=1):
            current = state
            for _ in range(substeps):
                current = rk3_step(current, tau / substeps, "central", evolve_kinetic=False)
            return total_energy(current)[1] - total_energy(state)[1]

        defects = [abs(energy_change(tau) - energy_change(tau, 64)) for tau in (0.004, 0.002)]
        assert math.log2(defects[0] / defects[1]) == pytest.approx(4.0, abs=0.4)
