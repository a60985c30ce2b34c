import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from hamgame import matrixcore as mc
from hamgame.errors import (DimensionError, InvalidStateError, NotHermitianError, SpanError,
                            UnknownNameError)
from hamgame.gamespec import (BUILTIN_NAMES, OPERATORS, PAULI_LABELS, RESTRICTED_LABELS, AbstractGame,
                              Joint, ManipulativeGame, Product, StrategyBasis, as_density, builtin,
                              count_free_parameters, decompose_to_unitaries, pure_product,
                              pure_strategy_density, su2_coefficients, su2_strategy,
                              uniform_product, validate_restricted)

I, X, Y, Z = (OPERATORS[k] for k in "IXYZ")
PAULI = StrategyBasis.from_names(PAULI_LABELS)
RESTRICTED = StrategyBasis.from_names(RESTRICTED_LABELS)
angles = st.floats(-10, 10, allow_nan=False)


def random_restricted(rng, dim=4):
    return mc.random_density(dim, rng, real=True)


class TestBasis:
    def test_restricted_is_orthonormal(self):
        assert RESTRICTED.size == 4 and RESTRICTED.object_dim == 2

    def test_rejects_non_orthonormal(self):
        with pytest.raises(SpanError):
            StrategyBasis(("a", "b"), (I, I))

    def test_rejects_duplicates_and_unknown(self):
        with pytest.raises(ValueError):
            StrategyBasis.from_names(["I", "I"])
        with pytest.raises(UnknownNameError):
            StrategyBasis.from_names(["I", "W"])

    def test_index(self):
        assert PAULI.index("Y") == 2
        with pytest.raises(UnknownNameError):
            PAULI.index("iY")

    def test_operators_read_only(self):
        with pytest.raises(ValueError):
            OPERATORS["X"][0, 0] = 5


class TestBuiltins:
    def test_pfg(self):
        g = builtin("pfg")
        assert_allclose(g.observables[0], np.diag([1, -1]))
        assert_allclose(g.observables[1], -g.observables[0])
        assert_allclose(g.initial_state, np.diag([1, 0]))
        assert g.order == (0, 1) and g.bases[0].labels == ("I", "X")

    def test_pd(self):
        g = builtin("prisoners_dilemma")
        assert_allclose(g.payoff_ops[0], np.diag([-2, -5, 0, -4]))
        assert_allclose(g.payoff_ops[1], np.diag([-2, 0, -5, -4]))

    def test_srg_labels(self):
        g = builtin("srg")
        assert all(b.labels == PAULI_LABELS for b in g.bases)
        assert builtin("srg_restricted").bases[1].labels == RESTRICTED_LABELS

    def test_unknown(self):
        with pytest.raises(UnknownNameError):
            builtin("chess")

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_invariants(self, name):
        g = builtin(name)
        ops = g.observables if isinstance(g, ManipulativeGame) else g.payoff_ops
        assert all(mc.is_hermitian(o) for o in ops)


class TestGameValidation:
    def test_bad_order(self):
        b = StrategyBasis.from_names(["I", "X"])
        with pytest.raises(ValueError):
            ManipulativeGame(np.diag([1, 0]), (b, b), (0, 0), (Z, -Z))

    def test_bad_initial_state(self):
        b = StrategyBasis.from_names(["I", "X"])
        with pytest.raises(InvalidStateError):
            ManipulativeGame(np.diag([1, 1]), (b, b), (0, 1), (Z, -Z))

    def test_non_hermitian_observable(self):
        b = StrategyBasis.from_names(["I", "X"])
        with pytest.raises(NotHermitianError):
            ManipulativeGame(np.diag([1, 0]), (b, b), (0, 1), (Z, [[0, 1], [0, 0]]))

    def test_abstract_checks(self):
        with pytest.raises(DimensionError):
            AbstractGame((2, 2), (np.eye(3), np.eye(4)))
        with pytest.raises(NotHermitianError):
            AbstractGame((2,), (np.array([[0, 1], [0, 0]]),))
        g = AbstractGame((2, 3), (np.eye(6), np.eye(6)))
        assert g.basis_labels == (("1", "2"), ("1", "2", "3")) and g.joint_dim == 6


class TestProfiles:
    def test_density_checks(self):
        with pytest.raises(InvalidStateError):
            as_density(np.diag([0.5, 0.6]))
        with pytest.raises(InvalidStateError):
            as_density(np.diag([1.5, -0.5]))
        with pytest.raises(InvalidStateError):
            as_density([[0.5, 1], [0, 0.5]])

    def test_restricted_flag(self):
        rho = np.array([[0.5, 0.1j], [-0.1j, 0.5]])
        with pytest.raises(InvalidStateError):
            Product((rho,), restricted=True)

    def test_joint_dims(self):
        with pytest.raises(DimensionError):
            Joint(np.eye(4) / 4, (2, 3))

    def test_uniform_and_pure(self):
        g = builtin("prisoners_dilemma")
        assert_allclose(uniform_product((2, 2)).joint(), np.eye(4) / 4)
        assert_allclose(pure_product(g, ["D", "C"]).joint(), np.diag([0, 0, 1, 0]))


class TestSU2:
    def test_identity(self):
        assert_allclose(su2_strategy(0, 0, 0, 0), I)

    def test_gamma_pi(self):
        assert_allclose(su2_strategy(0, 0, np.pi, 0), -1j * Y, atol=1e-15)

    @given(angles, angles, angles, angles)
    def test_unitary(self, a, b, g, d):
        u = su2_strategy(a, b, g, d)
        assert np.linalg.norm(u.conj().T @ u - np.eye(2)) < 1e-12

    @given(angles, angles, angles)
    def test_restricted_coefficients_real(self, b, g, d):
        u = su2_strategy(0, b, g, d)
        c = np.array([mc.trace_inner(op, u) for op in RESTRICTED.operators])
        assert np.max(np.abs(c.imag)) < 1e-12
        assert_allclose(c.real, su2_coefficients(b, g, d), atol=1e-12)


class TestPureStrategyDensity:
    def test_x_plus_y(self):
        rho = pure_strategy_density((X + Y) / np.sqrt(2), PAULI)
        expect = np.zeros((4, 4))
        expect[1:3, 1:3] = 0.5
        assert_allclose(rho, expect, atol=1e-15)

    def test_basis_element(self):
        assert_allclose(pure_strategy_density(X, PAULI), np.diag([0, 1, 0, 0]))

    @given(angles, angles, angles, angles)
    def test_su2_trace_one_and_phase_invariant(self, a, b, g, d):
        rho = pure_strategy_density(su2_strategy(a, b, g, d), PAULI)
        assert abs(np.trace(rho) - 1) < 1e-12
        assert_allclose(rho, pure_strategy_density(su2_strategy(0, b, g, d), PAULI), atol=1e-12)

    def test_errors(self):
        with pytest.raises(SpanError):
            pure_strategy_density(Y, StrategyBasis.from_names(["I", "X"]))
        with pytest.raises(SpanError):
            pure_strategy_density(np.zeros((2, 2)), PAULI)


class TestRestricted:
    def test_validate(self, rng):
        assert validate_restricted(np.eye(4) / 4)
        rho = np.diag([0.5, 0.5, 0, 0]).astype(complex)
        rho[0, 1], rho[1, 0] = 0.1j, -0.1j
        assert not validate_restricted(rho)
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        assert validate_restricted(np.outer(v, v))

    def test_decompose_pure(self):
        out = decompose_to_unitaries(np.diag([1.0, 0, 0, 0]))
        assert len(out) == 1
        assert out[0][0] == pytest.approx(1)
        assert_allclose(out[0][1], I)

    def test_decompose_diagonal_mixture(self):
        out = decompose_to_unitaries(np.diag([0.5, 0.5, 0, 0]))
        got = sorted((round(p, 12), tuple(np.round(op, 12).ravel())) for p, op in out)
        expect = sorted((0.5, tuple(np.round(op, 12).ravel())) for op in (I, 1j * X))
        assert got == expect

    @given(st.integers(0, 2**32 - 1))
    def test_decompose_round_trip(self, seed):
        rho = random_restricted(np.random.default_rng(seed))
        out = decompose_to_unitaries(rho)
        rebuilt = np.zeros((4, 4))
        for p, op in out:
            assert np.linalg.norm(op.conj().T @ op - I) < 1e-10
            c = np.array([mc.trace_inner(b, op) for b in RESTRICTED.operators]).real
            rebuilt = rebuilt + p * np.outer(c, c)
        assert np.linalg.norm(rebuilt - rho) < 1e-10

    def test_decompose_rejects_complex(self):
        rho = np.eye(4, dtype=complex) / 4
        rho[0, 1], rho[1, 0] = 0.1j, -0.1j
        with pytest.raises(InvalidStateError):
            decompose_to_unitaries(rho)

    def test_free_parameters(self):
        assert count_free_parameters(4) == 9
        assert count_free_parameters(np.eye(2) / 2) == 2
        assert count_free_parameters(1) == 0
