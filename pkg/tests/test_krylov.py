import numpy as np
import pytest

from krr.krylov import arnoldi, bilanczos
from krr.linalg import dense_operator
from krr.problems import add_noise, phillips, shaw


def _identity_op(n):
    return dense_operator(np.eye(n))


class TestArnoldi:
    def test_identity_breaks_down_immediately(self):
        op = _identity_op(5)
        r0 = np.array([1.0, 2.0, 0.0, -1.0, 0.5])
        dec = arnoldi(op, r0, 4)
        assert dec.breakdown
        assert dec.steps == 1
        assert dec.H.shape == (1, 1)
        assert np.allclose(dec.H, [[1.0]])

    def test_hand_gram_schmidt_oracle(self):
        # A = diag(1, 2), r0 = (1, 1)/sqrt(2); worked by hand:
        # v1 = (1,1)/sqrt2, h11 = 1.5, v2 = (-1,1)/sqrt2, h21 = 0.5,
        # h12 = 0.5, h22 = 1.5, then the space is exhausted.
        op = dense_operator(np.diag([1.0, 2.0]))
        r0 = np.array([1.0, 1.0]) / np.sqrt(2.0)
        dec = arnoldi(op, r0, 5)
        assert dec.steps == 2
        assert dec.breakdown
        assert np.allclose(dec.H, [[1.5, 0.5], [0.5, 1.5]], atol=1e-14)
        expected_V = np.column_stack([r0, np.array([-1.0, 1.0]) / np.sqrt(2.0)])
        assert np.allclose(np.abs(dec.V), np.abs(expected_V), atol=1e-14)

    def test_shaw_relation_residual(self):
        p = shaw(64)
        dec = arnoldi(p.A, p.b_exact, 10)
        A = p.A.to_dense()
        m = dec.steps
        resid = np.linalg.norm(A @ dec.V[:, :m] - dec.V @ dec.H)
        assert resid <= 1e-10 * np.linalg.norm(A)

    def test_basis_spans_krylov_space(self):
        p = phillips(64)
        b = add_noise(p, 1.0, 3).b
        dec = arnoldi(p.A, b, 6)
        A = p.A.to_dense()
        w = b.copy()
        for k in range(6):
            # projection of A^k b onto span(V) leaves a tiny residual
            proj = dec.V @ (dec.V.T @ w)
            assert np.linalg.norm(w - proj) <= 1e-8 * np.linalg.norm(w)
            w = A @ w

    @pytest.mark.parametrize(
        "make",
        [
            lambda: (phillips(128), 100),
            lambda: (shaw(64), 40),
        ],
    )
    def test_orthonormality_after_reorthogonalization(self, make):
        p, m = make()
        b = add_noise(p, 1.0, 1).b
        dec = arnoldi(p.A, b, m)
        V = dec.V
        assert np.max(np.abs(V.T @ V - np.eye(V.shape[1]))) <= 1e-10

    def test_prefix_stability(self):
        p = phillips(64)
        b = add_noise(p, 1.0, 2).b
        short = arnoldi(p.A, b, 6)
        long = arnoldi(p.A, b, 7)
        assert np.array_equal(short.V, long.V[:, :7])
        assert np.array_equal(short.H, long.H[:7, :6])

    def test_zero_start_vector_rejected(self):
        with pytest.raises(ValueError):
            arnoldi(_identity_op(3), np.zeros(3), 2)

    def test_nonsquare_rejected(self):
        with pytest.raises(ValueError):
            arnoldi(dense_operator(np.ones((3, 2))), np.ones(2), 1)


class TestBiLanczos:
    def test_symmetric_collapse_phillips(self):
        p = phillips(64)
        b = add_noise(p, 1.0, 1).b
        dec = bilanczos(p.A, b, 8)
        assert np.max(np.abs(dec.W - dec.V)) <= 1e-10
        T = dec.T[:8, :8]
        assert np.max(np.abs(T - T.T)) <= 1e-12 * max(np.abs(T).max(), 1.0)

    def test_identity_breaks_down_after_first_step(self):
        op = _identity_op(4)
        dec = bilanczos(op, np.array([1.0, -1.0, 2.0, 0.0]), 5)
        assert dec.breakdown
        assert dec.steps == 1
        assert np.allclose(dec.T, [[1.0]])

    def test_phillips_biorthogonality(self):
        p = phillips(64)
        b = add_noise(p, 1.0, 1).b
        dec = bilanczos(p.A, b, 8)
        WtV = dec.W[:, :8].T @ dec.V[:, :8]
        assert np.max(np.abs(WtV - np.eye(8))) <= 1e-8

    def test_nonsymmetric_biorthogonality_and_relation(self):
        rng = np.random.default_rng(3)
        M = rng.standard_normal((30, 30)) + 6 * np.eye(30)
        op = dense_operator(M)
        b = rng.standard_normal(30)
        dec = bilanczos(op, b, 8)
        WtV = dec.W[:, :8].T @ dec.V[:, :8]
        assert np.max(np.abs(WtV - np.eye(8))) <= 1e-10
        resid = np.linalg.norm(M @ dec.V[:, :8] - dec.V @ dec.T)
        assert resid <= 1e-12 * np.linalg.norm(M)
        # transpose-side relation: A^T W_m = W_{m+1} T'_m with the sub- and
        # superdiagonal coefficients exchanged
        Tt = np.zeros_like(dec.T)
        for j in range(8):
            Tt[j, j] = dec.alphas[j]
            Tt[j + 1, j] = dec.betas[j]
            if j + 1 < 8:
                Tt[j, j + 1] = dec.deltas[j]
        resid_t = np.linalg.norm(M.T @ dec.W[:, :8] - dec.W @ Tt)
        assert resid_t <= 1e-12 * np.linalg.norm(M)

    def test_pairing_normalization(self):
        rng = np.random.default_rng(8)
        M = rng.standard_normal((20, 20)) + 5 * np.eye(20)
        dec = bilanczos(dense_operator(M), rng.standard_normal(20), 6)
        for j in range(dec.V.shape[1]):
            assert abs(dec.V[:, j] @ dec.W[:, j] - 1.0) <= 1e-10

    def test_two_sided_span(self):
        rng = np.random.default_rng(9)
        M = rng.standard_normal((25, 25)) + 6 * np.eye(25)
        op = dense_operator(M)
        b = rng.standard_normal(25)
        m = 6
        dec = bilanczos(op, b, m)
        V, W = dec.V[:, :m], dec.W[:, :m]
        QV = np.linalg.qr(V)[0]
        QW = np.linalg.qr(W)[0]
        v_power = b.copy()
        w_power = b.copy()
        for _ in range(m):
            rv = v_power - QV @ (QV.T @ v_power)
            rw = w_power - QW @ (QW.T @ w_power)
            assert np.linalg.norm(rv) <= 1e-6 * np.linalg.norm(v_power)
            assert np.linalg.norm(rw) <= 1e-6 * np.linalg.norm(w_power)
            v_power = M @ v_power
            w_power = M.T @ w_power

    def test_prefix_stability(self):
        p = phillips(64)
        b = add_noise(p, 1.0, 5).b
        short = bilanczos(p.A, b, 5)
        long = bilanczos(p.A, b, 6)
        assert np.array_equal(short.V, long.V[:, :6])
        assert np.array_equal(short.T, long.T[:6, :5])

    def test_zero_start_vector_rejected(self):
        with pytest.raises(ValueError):
            bilanczos(_identity_op(3), np.zeros(3), 2)
