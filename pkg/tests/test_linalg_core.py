import numpy as np
import pytest
from hypothesis import given, strategies as st

from kfgm import linalg_core as lc
from kfgm.bc_families import NMatrixParams, build_N


class TestConstants:
    def test_pauli_squares_are_identity(self):
        for t in (lc.TAU1, lc.TAU2, lc.TAU3):
            assert np.array_equal(t @ t, lc.I2)

    def test_constants_are_read_only(self):
        with pytest.raises(ValueError):
            lc.TAU1[0, 0] = 5

    def test_w_maps_spinor_to_phi_minus_phi(self):
        out = lc.W @ np.array([2.0 + 1j, 3.0 - 1j])
        assert np.allclose(out, [5.0, -5.0])


class TestMatMul:
    def test_identity_times_tau1(self):
        assert np.array_equal(lc.mat_mul(lc.I2, lc.TAU1), lc.TAU1)

    def test_tau1_tau2_is_i_tau3(self):
        assert np.allclose(lc.mat_mul(lc.TAU1, lc.TAU2), 1j * lc.TAU3, atol=0)

    def test_associativity(self, rng):
        for _ in range(50):
            a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
            left = lc.mat_mul(lc.mat_mul(a, b), c)
            right = lc.mat_mul(a, lc.mat_mul(b, c))
            assert lc.max_abs(left - right) <= 1e-14 * max(1.0, lc.max_abs(left))

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            lc.mat_mul(np.eye(3), lc.I2)


class TestPredicates:
    def test_unitary_examples(self):
        assert lc.is_unitary(lc.I2)
        assert lc.is_unitary(lc.TAU1)
        assert not lc.is_unitary(np.diag([2.0, 1.0]))

    def test_symmetric_examples(self):
        assert lc.is_symmetric(lc.TAU1)
        assert not lc.is_symmetric(lc.TAU2)

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            lc.is_unitary(lc.I2, tol=0.0)
        with pytest.raises(ValueError):
            lc.is_symmetric(lc.I2, tol=-1.0)

    def test_tolerance_boundary(self):
        m = lc.I2 + np.diag([1e-8, 0.0])
        assert lc.is_symmetric(m, 1e-12)
        assert not lc.is_unitary(m, 1e-12)
        assert lc.is_unitary(m, 1e-7)

    @given(
        mu=st.floats(0.0, np.pi, exclude_max=True),
        a=st.floats(-1.0, 1.0),
        b=st.floats(-1.0, 1.0),
        c=st.floats(-1.0, 1.0),
    )
    def test_n_matrix_is_unitary_symmetric_with_det(self, mu, a, b, c):
        v = np.array([a, b, c])
        if np.linalg.norm(v) < 1e-3:
            v = np.array([1.0, 0.0, 0.0])
        v = v / np.linalg.norm(v)
        n = build_N(NMatrixParams(mu, *v))
        assert lc.is_unitary(n) and lc.is_symmetric(n)
        assert abs(lc.det(n) - np.exp(2j * mu)) <= 1e-12


class TestHelpers:
    def test_adjoint_and_transpose(self):
        m = np.array([[1, 2j], [3, 4 - 1j]])
        assert np.array_equal(lc.adjoint(m), np.array([[1, 3], [-2j, 4 + 1j]]))
        assert np.array_equal(lc.transpose(m), np.array([[1, 3], [2j, 4 - 1j]]))

    def test_det(self):
        assert lc.det(lc.TAU2) == -1
        assert lc.det(lc.TAU1) == -1

    def test_tau3_pairing(self):
        assert lc.tau3_pairing([1, 0], [1, 0]) == 1
        assert lc.tau3_pairing([0, 1], [0, 1]) == -1
        assert lc.tau3_pairing([1, 1], [1, 1]) == 0
        assert lc.tau3_pairing([1j, 0], [1, 0]) == -1j
