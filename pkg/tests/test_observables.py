import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kfgm import linalg_core as lc
from kfgm import observables as obs
from kfgm import states_grid as sg
from kfgm.bc_families import Branch, NMatrixParams, build_N, flux_balanced_transfer
from kfgm.errors import InternalConsistencyError, InvalidParameterError
from kfgm.solvers import observed_order

GRID = sg.Grid(0.0, 2 * math.pi, 129)
UNITS = sg.Units()


def zero_fv(grid=GRID):
    return sg.FvState(grid, np.zeros((2, grid.n), dtype=complex), exact_dx=np.zeros((2, grid.n), dtype=complex))


def with_endpoint(grid, comp_b=None, dx_b=None):
    comp = np.zeros((2, grid.n), dtype=complex)
    dx = np.zeros((2, grid.n), dtype=complex)
    if comp_b is not None:
        comp[:, -1] = comp_b
    if dx_b is not None:
        dx[:, -1] = dx_b
    return sg.FvState(grid, comp, exact_dx=dx)


def majorana_pair(seed, bc="periodic", sign=sg.PLUS, grid=GRID):
    ms = sg.random_mode_sum(seed, grid, bc, sign)
    return ms.fv_state(grid, 0.0, bc=bc), ms.fv_dot_state(grid, 0.0, bc=bc)


class TestDensities:
    def test_rho_examples(self):
        up = sg.FvState.from_components(GRID, 1.0 + 0j, 0j)
        down = sg.FvState.from_components(GRID, 0j, 1.0 + 0j)
        assert np.all(obs.density_rho(up).values == 1.0)
        assert np.all(obs.density_rho(down).values == -1.0)

    @given(seed=st.integers(0, 5000), anti=st.booleans(), minus=st.booleans())
    def test_majorana_identities(self, seed, anti, minus):
        s, sd = majorana_pair(seed, "antiperiodic" if anti else "periodic", sg.MINUS if minus else sg.PLUS)
        assert obs.density_rho(s).max_abs <= 1e-13
        assert obs.current_j(s).max_abs <= 1e-13
        assert obs.energy_density_rho_en(s, sd).max_imag <= 1e-12
        assert obs.energy_current_j_en(s, sd).max_imag <= 1e-12

    def test_static_state_has_no_energy_density(self):
        s, _ = majorana_pair(2)
        assert obs.energy_density_rho_en(s, zero_fv()).max_abs == 0.0
        assert obs.energy_current_j_en(s, zero_fv()).max_abs == 0.0

    def test_energy_integral_is_time_independent(self):
        ms = sg.ModeSum.from_real_data([1.0], [1.0], [0.0], [0.0], [0.0], x0=0.0)
        vals = [obs.energy_integral(ms.fv_state(GRID, t), ms.fv_dot_state(GRID, t)) for t in (0.0, 0.7, 3.1)]
        assert max(abs(v - vals[0]) for v in vals) <= 1e-12
        assert abs(vals[0].imag) <= 1e-12 and vals[0].real > 0


class TestCurrents:
    def test_plane_wave_current(self):
        k = 2.0
        phi = np.exp(1j * k * GRID.x)
        s = sg.FvState.from_components(GRID, phi / 2, phi / 2, exact_dx=np.vstack([1j * k * phi / 2] * 2))
        j = obs.current_j(s, UNITS).values
        assert np.allclose(j, UNITS.hbar * k / UNITS.m, atol=1e-14)
        assert np.allclose(j, obs.current_j_matrix(s, UNITS), atol=1e-14)

    def test_real_cosine_has_no_current(self):
        phi = np.cos(GRID.x) + 0j
        s = sg.FvState.from_components(GRID, phi / 2, phi / 2)
        assert obs.current_j(s).max_abs == 0.0

    def test_scalar_and_matrix_energy_currents_agree(self):
        ms = sg.random_complex_mode_sum(9, GRID, "periodic")
        s, sd = ms.fv_state(GRID, 0.2), ms.fv_dot_state(GRID, 0.2)
        scalar = obs.energy_current_j_en(s, sd).values
        assert np.max(np.abs(scalar - obs.energy_current_matrix(s, sd))) <= 1e-12

    def test_mismatch_signal(self):
        s, sd = majorana_pair(4)
        with pytest.raises(InternalConsistencyError):
            obs.energy_current_j_en(s, sd, check_tol=-1.0)

    def test_antiperiodic_wall_balance(self):
        s, sd = majorana_pair(8, "antiperiodic")
        j = obs.energy_current_j_en(s, sd)
        assert abs(j.jump) <= 1e-12


class TestBoundaryTerms:
    def test_f_single_entry(self):
        s = with_endpoint(GRID, comp_b=[1.0, 0.0])
        assert obs.boundary_term_f(s, s, UNITS) == 1j * UNITS.hbar

    def test_f_vanishes_for_unitary_n(self, rng):
        for _ in range(20):
            n = build_N(NMatrixParams.random(rng))
            states = []
            for _ in range(2):
                comp = rng.normal(size=(2, GRID.n)) + 1j * rng.normal(size=(2, GRID.n))
                phi1_b, phi2_a = n @ np.array([comp[1, -1], comp[0, 0]])
                comp[0, -1], comp[1, 0] = phi1_b, phi2_a
                states.append(sg.FvState(GRID, comp))
            for p in states:
                for q in states:
                    assert abs(obs.boundary_term_f(p, q)) <= 1e-12
            d = obs.density_rho(states[0])
            assert abs(d.at_b - d.at_a) <= 1e-10

    def test_g_single_term(self):
        phi = with_endpoint(GRID, comp_b=[0.5, 0.5])
        psi = with_endpoint(GRID, dx_b=[0.5, 0.5])
        assert obs.boundary_term_g(psi, phi, UNITS) == pytest.approx(-UNITS.hbar**2 / (2 * UNITS.m))

    def test_g_majorana_periodic(self):
        s, _ = majorana_pair(12)
        assert abs(obs.boundary_term_g(s, s)) <= 1e-12

    def test_g_flux_balanced_state(self, rng):
        v = flux_balanced_transfer(1.0, Branch.LOWER)
        s = sg.state_with_transfer(GRID, v, rng)
        sd = sg.state_with_transfer(GRID, v, rng)
        assert abs(obs.boundary_term_g(s, sd)) <= 1e-12
        assert abs(obs.boundary_term_g(s, s)) <= 1e-12


class TestInnerProduct:
    def test_majorana_self_product(self):
        s, _ = majorana_pair(3)
        assert abs(obs.indefinite_inner_product(s, s)) <= 1e-13

    def test_unit_constant(self):
        g = sg.Grid(0.0, 1.0, 33)
        up = sg.FvState.from_components(g, 1.0 + 0j, 0j)
        assert obs.indefinite_inner_product(up, up) == pytest.approx(1.0, abs=1e-15)

    @given(seed=st.integers(0, 10_000))
    def test_conjugate_symmetry(self, seed):
        r = np.random.default_rng(seed)
        p, q = (sg.FvState(GRID, r.normal(size=(2, GRID.n)) + 1j * r.normal(size=(2, GRID.n))) for _ in range(2))
        a, b = obs.indefinite_inner_product(p, q), obs.indefinite_inner_product(q, p)
        assert abs(a - np.conj(b)) <= 1e-12 * max(1.0, abs(a))

    def test_invariant_under_exact_evolution(self):
        ms1 = sg.random_complex_mode_sum(1, GRID, "periodic")
        ms2 = sg.random_complex_mode_sum(2, GRID, "periodic")
        vals = [obs.indefinite_inner_product(ms1.fv_state(GRID, t), ms2.fv_state(GRID, t)) for t in (0, 1.3, 4.0)]
        assert max(abs(v - vals[0]) for v in vals) <= 1e-10


class TestTensors:
    def test_static_constant_field(self):
        hist = sg.KfgHistory(GRID, 0.1, np.full((6, GRID.n), 0.7 + 0j), np.zeros((6, GRID.n), dtype=complex),
                             bc="periodic")
        tf = obs.tensor_fields(hist)
        assert np.max(np.abs(tf.K00)) == 0.0

    def test_symmetry_for_majorana(self):
        ms = sg.random_mode_sum(5, GRID, "periodic")
        hist = sg.KfgHistory.from_mode_sum(ms, GRID, 0.01, 6, bc="periodic")
        assert obs.tensor_fields(hist).symmetry_residual <= 1e-12

    @pytest.mark.parametrize("bc", ["periodic", "antiperiodic"])
    def test_identities_converge(self, bc):
        kt, div = [], []
        for n in (65, 129, 257):
            g = sg.Grid(0.0, 2 * math.pi, n)
            ms = sg.random_mode_sum(5, g, bc)
            hist = sg.KfgHistory.from_mode_sum(ms, g, 0.5 * g.spacing, 7, bc=bc)
            tf = obs.tensor_fields(hist)
            kt.append(tf.kt_residual)
            div.append(tf.divergence_residual)
        assert observed_order(kt) >= 1.9
        assert observed_order(div) >= 1.9

    def test_too_few_levels(self):
        hist = sg.KfgHistory(GRID, 0.1, np.zeros((3, GRID.n)), np.zeros((3, GRID.n)))
        with pytest.raises(InvalidParameterError):
            obs.tensor_fields(hist)


class TestContinuity:
    def test_majorana_charge_trivial(self):
        zeros = np.zeros((4, GRID.n))
        assert obs.continuity_residual(zeros, zeros, 0.1, GRID.spacing) == 0.0

    def test_too_few_levels(self):
        with pytest.raises(InvalidParameterError):
            obs.continuity_residual(np.zeros((2, 5)), np.zeros((2, 5)), 0.1, 0.1)

    def test_energy_continuity_converges(self):
        errs = []
        for n in (129, 257, 513):
            g = sg.Grid(0.0, 2 * math.pi, n)
            hist = sg.KfgHistory.from_mode_sum(sg.random_mode_sum(6, g, "periodic"), g, 0.5 * g.spacing, 7,
                                               bc="periodic")
            rho, j = obs.history_energy_fields(hist)
            errs.append(obs.continuity_residual(rho, j, hist.dt, g.spacing, wrap=1.0))
        assert observed_order(errs) >= 1.9

    def test_integrated_balance_on_open_interval(self):
        # d/dt of the energy integral equals minus the wall flux difference
        g = sg.Grid(0.0, 1.7, 257)
        ms = sg.random_complex_mode_sum(3, sg.Grid(0.0, 2 * math.pi, 129), "periodic")
        dt = 1e-3
        e = [obs.energy_integral(ms.fv_state(g, t), ms.fv_dot_state(g, t)) for t in (-dt, dt)]
        j = obs.energy_current_j_en(ms.fv_state(g, 0.0), ms.fv_dot_state(g, 0.0))
        lhs = (e[1] - e[0]) / (2 * dt)
        assert abs(lhs + j.jump) <= 1e-4 * max(1.0, abs(lhs))


class TestSeparatedWalls:
    @pytest.mark.parametrize("sign", [1, -1])
    def test_wall_current_converges(self, sign):
        walls = obs.separated_wall_currents(sign, (65, 129, 257, 513), seed=1)
        assert observed_order(walls) >= 1.9
        assert walls[-1] < 1e-2
