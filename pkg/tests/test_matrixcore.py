import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from hamgame import matrixcore as mc
from hamgame.errors import DimensionError, NotHermitianError
from hamgame.gamespec import OPERATORS

I, X, Y, Z = (OPERATORS[k] for k in "IXYZ")
seeds = st.integers(0, 2**32 - 1)


def _taylor_exp(h, terms=30):
    out = np.eye(len(h), dtype=complex)
    term = np.eye(len(h), dtype=complex)
    for k in range(1, terms):
        term = term @ h / k
        out = out + term
    return out


class TestBasics:
    def test_as_cmatrix_rejects(self):
        with pytest.raises(DimensionError):
            mc.as_cmatrix(np.ones((2, 3)))
        with pytest.raises(ValueError):
            mc.as_cmatrix([[np.nan, 0], [0, 1]])

    def test_matmul_mismatch(self):
        with pytest.raises(DimensionError):
            mc.matmul(np.eye(2), np.eye(3))

    def test_trace_and_norm(self):
        assert mc.trace(np.diag([1, 2j])) == 1 + 2j
        assert mc.frobenius_norm(np.eye(4)) == pytest.approx(2.0)
        assert_allclose(mc.dagger([[1, 2j], [3, 4]]), [[1, 3], [-2j, 4]])


class TestKron:
    def test_identity(self):
        assert_allclose(mc.kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_xx_antidiagonal(self):
        assert_allclose(mc.kron(X, X), np.fliplr(np.eye(4)))

    def test_element_oracle(self, rng):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        k = mc.kron(a, b)
        for i in range(2):
            for j in range(2):
                for p in range(2):
                    for q in range(2):
                        assert abs(k[2 * i + p, 2 * j + q] - a[i, j] * b[p, q]) < 1e-14

    @given(seeds)
    def test_associative(self, seed):
        r = np.random.default_rng(seed)
        a, b, c = (mc.random_hermitian(d, r) for d in (2, 3, 2))
        assert_allclose(mc.kron(mc.kron(a, b), c), mc.kron(a, mc.kron(b, c)), atol=1e-12)

    def test_kron_all_empty_is_scalar_one(self):
        assert_allclose(mc.kron_all([]), [[1]])


class TestPartialTrace:
    def test_product_factorization(self, rng):
        a, b = mc.random_hermitian(2, rng), mc.random_hermitian(2, rng)
        assert_allclose(mc.partial_trace(mc.kron(a, b), [2, 2], [0]), a * np.trace(b), atol=1e-12)
        assert_allclose(mc.partial_trace(mc.kron(a, b), [2, 2], [1]), b * np.trace(a), atol=1e-12)

    def test_identity(self):
        assert_allclose(mc.partial_trace(np.eye(4), [2, 2], [1]), 2 * np.eye(2))

    def test_index_sum_oracle(self, rng):
        m = mc.random_hermitian(4, rng)
        expect = np.zeros((2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                expect[i, j] = sum(m[2 * i + k, 2 * j + k] for k in range(2))
        assert_allclose(mc.partial_trace(m, [2, 2], [0]), expect, atol=1e-14)

    def test_three_factors_middle(self, rng):
        a, b, c = (mc.random_density(d, rng) for d in (2, 3, 2))
        assert_allclose(mc.partial_trace(mc.kron_all([a, b, c]), [2, 3, 2], [1]), b, atol=1e-12)
        assert_allclose(mc.partial_trace(mc.kron_all([a, b, c]), [2, 3, 2], [2, 0]), mc.kron(a, c), atol=1e-12)

    def test_bad_dims(self):
        with pytest.raises(DimensionError):
            mc.partial_trace(np.eye(4), [2, 3], [0])
        with pytest.raises(ValueError):
            mc.partial_trace(np.eye(4), [2, 2], [])

    @given(seeds)
    def test_linear_and_trace_preserving(self, seed):
        r = np.random.default_rng(seed)
        a, b = mc.random_hermitian(6, r), mc.random_hermitian(6, r)
        s = r.normal()
        lhs = mc.partial_trace(a + s * b, [2, 3], [1])
        rhs = mc.partial_trace(a, [2, 3], [1]) + s * mc.partial_trace(b, [2, 3], [1])
        assert_allclose(lhs, rhs, atol=1e-12)
        assert np.trace(lhs) == pytest.approx(np.trace(a + s * b), abs=1e-12)


class TestPermute:
    def test_swap_kron(self, rng):
        a, b = mc.random_hermitian(2, rng), mc.random_hermitian(3, rng)
        assert_allclose(mc.permute_subsystems(mc.kron(a, b), [2, 3], [1, 0]), mc.kron(b, a), atol=1e-14)


class TestEigen:
    def test_diag(self):
        assert_allclose(mc.herm_eigen(np.diag([1.0, -1.0])).eigenvalues, [-1, 1])

    def test_pauli_x(self):
        e = mc.herm_eigen(X)
        assert_allclose(e.eigenvalues, [-1, 1], atol=1e-15)
        s = 1 / np.sqrt(2)
        # phase fixed so the largest-magnitude entry (first on ties) is real positive
        assert_allclose(e.eigenvectors[:, 0], [s, -s], atol=1e-12)
        assert_allclose(e.eigenvectors[:, 1], [s, s], atol=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            mc.herm_eigen([[0, 1], [0, 0]])

    @given(seeds, st.integers(1, 6))
    def test_reconstruction(self, seed, dim):
        h = mc.random_hermitian(dim, np.random.default_rng(seed))
        w, v = mc.herm_eigen(h)
        assert np.all(np.diff(w) >= 0)
        assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) < 1e-10
        assert np.linalg.norm(v.conj().T @ v - np.eye(dim)) < 1e-10

    def test_deterministic(self, rng):
        h = mc.random_hermitian(5, rng)
        a, b = mc.herm_eigen(h), mc.herm_eigen(h)
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert np.array_equal(a.eigenvectors, b.eigenvectors)


class TestExp:
    def test_zero_scale(self, rng):
        assert_allclose(mc.matrix_exp_hermitian(mc.random_hermitian(3, rng), 0.0), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        assert_allclose(mc.matrix_exp_hermitian(np.diag([0, np.log(2)]), 1.0), np.diag([1, 2]), atol=1e-14)

    def test_taylor_oracle(self, rng):
        h = mc.random_hermitian(4, rng)
        h = h / np.linalg.norm(h, 2)
        assert np.linalg.norm(mc.matrix_exp_hermitian(h, 1.0) - _taylor_exp(h)) < 1e-9

    def test_overflow_guard(self):
        e = mc.matrix_exp_hermitian(np.diag([0.0, 1.0]), 5000.0)
        assert np.all(np.isfinite(e))
        assert e[1, 1].real == pytest.approx(1.0)
        assert e[0, 0].real < 1e-300

    @given(seeds, st.floats(-2, 2), st.floats(-2, 2))
    def test_semigroup(self, seed, s, t):
        h = mc.random_hermitian(3, np.random.default_rng(seed))
        lhs = mc.matrix_exp_hermitian(h, s) @ mc.matrix_exp_hermitian(h, t)
        rhs = mc.matrix_exp_hermitian(h, s + t)
        assert np.linalg.norm(lhs - rhs) < 1e-9 * max(1.0, np.linalg.norm(rhs))


class TestInnerAndAlgebra:
    def test_pauli_values(self):
        assert mc.trace_inner(X, X) == pytest.approx(1)
        assert mc.trace_inner(I, X) == pytest.approx(0)
        assert mc.trace_inner(X, Y) == pytest.approx(0)

    def test_pauli_gram_identity(self):
        ops = [I, X, Y, Z]
        gram = np.array([[mc.trace_inner(a, b) for b in ops] for a in ops])
        assert_allclose(gram, np.eye(4), atol=1e-15)

    @given(seeds)
    def test_conjugate_symmetric(self, seed):
        r = np.random.default_rng(seed)
        a, b = (r.normal(size=(3, 3)) + 1j * r.normal(size=(3, 3)) for _ in range(2))
        assert mc.trace_inner(a, b) == pytest.approx(np.conj(mc.trace_inner(b, a)))

    def test_inner_mismatch(self):
        with pytest.raises(DimensionError):
            mc.trace_inner(np.eye(2), np.eye(3))

    def test_commutators(self):
        assert_allclose(mc.commutator(X, X), np.zeros((2, 2)))
        assert_allclose(mc.commutator(X, Y), 2j * Z)

    def test_psd_tolerance(self):
        assert mc.is_psd(np.diag([1, -1e-14]), 1e-10)
        assert not mc.is_psd(np.diag([1, -1e-6]), 1e-10)
        assert not mc.is_psd([[0, 1], [0, 0]])

    def test_is_hermitian(self):
        assert mc.is_hermitian(Y)
        assert not mc.is_hermitian([[0, 1], [0, 0]])


class TestRandom:
    @given(seeds, st.integers(1, 5))
    def test_random_density_valid(self, seed, dim):
        rho = mc.random_density(dim, np.random.default_rng(seed))
        assert mc.is_hermitian(rho)
        assert mc.is_psd(rho)
        assert np.trace(rho).real == pytest.approx(1)

    def test_random_unitary(self, rng):
        u = mc.random_unitary(4, rng)
        assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
