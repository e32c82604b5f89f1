import numpy as np
import pytest

from krr.linalg import (
    LinearOperator,
    dense_operator,
    householder_qr,
    jacobi_svd,
    solve_upper_triangular,
)


class TestHouseholderQR:
    def test_identity(self):
        Q, R = householder_qr(np.eye(3))
        assert np.allclose(Q, np.eye(3))
        assert np.allclose(R, np.eye(3))

    def test_single_column_pythagorean(self):
        # non-negative diagonal convention forces R = [5; 0], Q[:,0] = M/5
        Q, R = householder_qr(np.array([[3.0], [4.0]]))
        assert np.allclose(R[:, 0], [5.0, 0.0])
        assert np.allclose(Q[:, 0], [0.6, 0.8])

    def test_seeded_reconstruction(self):
        rng = np.random.default_rng(42)
        M = rng.standard_normal((6, 4))
        Q, R = householder_qr(M)
        assert np.max(np.abs(Q @ R - M)) <= 1e-12 * np.linalg.norm(M)

    @pytest.mark.parametrize("trial", range(100))
    def test_reconstruction_property(self, trial):
        rng = np.random.default_rng(1000 + trial)
        rows = int(rng.integers(1, 51))
        cols = int(rng.integers(1, min(rows, 30) + 1))
        M = rng.standard_normal((rows, cols)) * 10.0 ** float(rng.integers(-3, 4))
        Q, R = householder_qr(M)
        scale = np.linalg.norm(M)
        assert np.linalg.norm(Q @ R - M) <= 1e-12 * max(scale, 1e-300)
        assert np.max(np.abs(Q.T @ Q - np.eye(rows))) <= 1e-12
        assert np.all(np.diag(R)[:cols] >= 0.0)
        assert np.allclose(np.tril(R, -1), 0.0)

    def test_rejects_wide_matrix(self):
        with pytest.raises(ValueError):
            householder_qr(np.ones((2, 3)))

    def test_rejects_nonfinite(self):
        M = np.ones((3, 2))
        M[0, 0] = np.nan
        with pytest.raises(ValueError):
            householder_qr(M)


class TestSolveUpperTriangular:
    def test_identity(self):
        c = np.array([3.0, -1.0, 2.0])
        assert np.allclose(solve_upper_triangular(np.eye(3), c), c)

    def test_hand_back_substitution(self):
        R = np.array([[2.0, 1.0], [0.0, 4.0]])
        y = solve_upper_triangular(R, np.array([4.0, 8.0]))
        assert np.allclose(y, [1.0, 2.0])

    def test_residual_bound(self):
        rng = np.random.default_rng(7)
        R = np.triu(rng.standard_normal((8, 8))) + 8 * np.eye(8)
        c = rng.standard_normal(8)
        y = solve_upper_triangular(R, c)
        assert np.linalg.norm(R @ y - c) <= 1e-12 * np.linalg.norm(c)

    def test_singular_diagonal_raises(self):
        R = np.array([[2.0, 1.0], [0.0, 0.0]])
        with pytest.raises(np.linalg.LinAlgError):
            solve_upper_triangular(R, np.array([1.0, 1.0]))

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            solve_upper_triangular(np.ones((2, 3)), np.ones(2))
        with pytest.raises(ValueError):
            solve_upper_triangular(np.eye(3), np.ones(2))


def _eigs_power_iteration(S, k, iters=20000):
    """Dominant eigenvalues of a symmetric PSD matrix by power iteration
    with deflation; independent of the SVD under test."""
    S = S.copy()
    eigs = []
    rng = np.random.default_rng(123)
    for _ in range(k):
        v = rng.standard_normal(S.shape[0])
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(iters):
            w = S @ v
            norm = np.linalg.norm(w)
            if norm == 0.0:
                break
            v_next = w / norm
            if np.linalg.norm(v_next - v) < 1e-15:
                v = v_next
                break
            v = v_next
        lam = float(v @ S @ v)
        eigs.append(lam)
        S = S - lam * np.outer(v, v)
    return np.array(eigs)


class TestJacobiSVD:
    def test_diagonal(self):
        res = jacobi_svd(np.diag([3.0, 2.0, 1.0]))
        assert np.allclose(res.singular_values, [3.0, 2.0, 1.0])

    def test_rank_one(self):
        u = np.array([1.0, 2.0, -1.0, 0.5])
        v = np.array([2.0, -1.0, 3.0])
        res = jacobi_svd(np.outer(u, v))
        expected = np.linalg.norm(u) * np.linalg.norm(v)
        assert abs(res.singular_values[0] - expected) <= 1e-12 * expected
        assert np.all(res.singular_values[1:] <= 1e-12 * expected)

    def test_against_power_iteration_oracle(self):
        rng = np.random.default_rng(42)
        M = rng.standard_normal((6, 4))
        res = jacobi_svd(M)
        oracle = _eigs_power_iteration(M.T @ M, 4)
        assert np.allclose(res.singular_values**2, oracle, rtol=1e-8)

    @pytest.mark.parametrize("shape", [(5, 5), (8, 3), (3, 8), (10, 7)])
    def test_result_invariants(self, shape):
        rng = np.random.default_rng(sum(shape))
        M = rng.standard_normal(shape)
        res = jacobi_svd(M)
        k = min(shape)
        assert np.all(np.diff(res.singular_values) <= 0)
        assert np.all(res.singular_values >= 0)
        assert np.max(np.abs(res.U.T @ res.U - np.eye(k))) <= 1e-10
        assert np.max(np.abs(res.V.T @ res.V - np.eye(k))) <= 1e-10
        recon = res.U @ np.diag(res.singular_values) @ res.V.T
        assert np.linalg.norm(recon - M) <= 1e-10 * np.linalg.norm(M)

    def test_transpose_swaps_factors(self):
        rng = np.random.default_rng(5)
        M = rng.standard_normal((7, 4))
        a = jacobi_svd(M)
        b = jacobi_svd(M.T)
        assert np.allclose(a.singular_values, b.singular_values, atol=1e-10)
        assert np.allclose(np.abs(a.U), np.abs(b.V), atol=1e-10)
        assert np.allclose(np.abs(a.V), np.abs(b.U), atol=1e-10)

    def test_zero_matrix_completion(self):
        res = jacobi_svd(np.zeros((4, 3)))
        assert np.all(res.singular_values == 0.0)
        assert np.max(np.abs(res.U.T @ res.U - np.eye(3))) <= 1e-12


class TestLinearOperator:
    def test_dense_adjoint_consistency(self):
        rng = np.random.default_rng(11)
        M = rng.standard_normal((9, 9))
        op = dense_operator(M)
        for _ in range(20):
            u = rng.standard_normal(9)
            v = rng.standard_normal(9)
            lhs = u @ op.apply(v)
            rhs = v @ op.apply_transpose(u)
            bound = 1e-10 * np.linalg.norm(u) * np.linalg.norm(v) * np.linalg.norm(M)
            assert abs(lhs - rhs) <= bound

    def test_transpose_matches_dense(self):
        rng = np.random.default_rng(2)
        M = rng.standard_normal((6, 4))
        op = dense_operator(M)
        v = rng.standard_normal(6)
        expected = M.T @ v
        got = op.apply_transpose(v)
        assert np.linalg.norm(got - expected) <= 1e-14 * max(np.linalg.norm(expected), 1.0)

    def test_shape_checks(self):
        op = dense_operator(np.ones((3, 2)))
        assert op.n_rows == 3 and op.n_cols == 2
        with pytest.raises(ValueError):
            op.apply(np.ones(3))
        with pytest.raises(ValueError):
            op.apply_transpose(np.ones(2))

    def test_to_dense_fallback(self):
        M = np.arange(6.0).reshape(3, 2)
        op = LinearOperator(3, 2, lambda v: M @ v, lambda v: M.T @ v, kind="dense")
        assert np.allclose(op.to_dense(), M)

    def test_matmul_sugar(self):
        M = np.eye(3) * 2
        op = dense_operator(M)
        assert np.allclose(op @ np.ones(3), 2 * np.ones(3))
