import numpy as np
import pytest
from hypothesis import given, strategies as st

from kfgm.errors import ConvergenceError, InvalidParameterError
from kfgm.solvers import jacobi


def random_symmetric(rng, m):
    a = rng.normal(size=(m, m))
    return a + a.T


class TestSchedule:
    @pytest.mark.parametrize("m", [2, 5, 8, 13])
    def test_round_robin_covers_all_pairs_once(self, m):
        seen = []
        for p, q in jacobi.round_robin_pairs(m):
            idx = np.concatenate([p, q])
            assert len(set(idx.tolist())) == len(idx)
            seen.extend(zip(p.tolist(), q.tolist()))
        assert sorted(seen) == [(i, j) for i in range(m) for j in range(i + 1, m)]

    def test_off_norm(self):
        a = np.array([[1.0, 3.0], [4.0, 100.0]])
        assert jacobi.off_norm(a) == 5.0


class TestScalarJacobi:
    @given(seed=st.integers(0, 10_000), m=st.integers(2, 24))
    def test_matches_lapack(self, seed, m):
        a = random_symmetric(np.random.default_rng(seed), m)
        got = jacobi.jacobi_eigenvalues(a)
        ref = np.linalg.eigvalsh(a)
        assert np.max(np.abs(got - ref)) <= 1e-10 * max(1.0, np.abs(ref).max())

    def test_diagonal_input(self):
        assert np.array_equal(jacobi.jacobi_eigenvalues(np.diag([3.0, -1.0, 2.0])), [-1.0, 2.0, 3.0])

    def test_rejects_nonsymmetric(self):
        with pytest.raises(InvalidParameterError):
            jacobi.jacobi_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_sweep_budget(self):
        a = random_symmetric(np.random.default_rng(1), 30)
        with pytest.raises(ConvergenceError):
            jacobi.jacobi_eigenvalues(a, max_sweeps=1)


class TestBlockJacobi:
    @pytest.mark.parametrize("m,block", [(50, 8), (121, 16), (200, 40)])
    def test_matches_lapack(self, m, block):
        a = random_symmetric(np.random.default_rng(m), m)
        got = jacobi.block_jacobi_eigenvalues(a, block=block)
        ref = np.linalg.eigvalsh(a)
        assert np.max(np.abs(got - ref)) <= 1e-10 * np.abs(ref).max()

    def test_agrees_with_scalar(self):
        a = random_symmetric(np.random.default_rng(7), 60)
        assert np.allclose(jacobi.block_jacobi_eigenvalues(a, block=10), jacobi.jacobi_eigenvalues(a),
                           atol=1e-10, rtol=0)

    def test_trace_preserved(self):
        a = random_symmetric(np.random.default_rng(3), 90)
        assert abs(jacobi.block_jacobi_eigenvalues(a, block=12).sum() - np.trace(a)) <= 1e-9
