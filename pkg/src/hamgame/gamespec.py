"""Games in manipulative and abstract form, strategy states, builtin games.

A *manipulative* game describes what the players physically do: an object
starts in ``initial_state``, every player applies an operator drawn from the
span of its strategy basis, and ``observables`` score the final object state.
An *abstract* game keeps only the per-player strategy dimensions and one
Hermitian payoff operator per player on the joint strategy space.

Player indices are 0-based in the Python API.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import matrixcore as mc
from .errors import (DimensionError, InvalidStateError, NotHermitianError, SpanError,
                     UnknownNameError)

TOL = 1e-10

_I = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

#: Named single-qubit operators usable as strategy basis elements.
OPERATORS: dict[str, np.ndarray] = {
    "I": _I,
    "X": _X,
    "Y": _Y,
    "Z": _Z,
    "iX": 1j * _X,
    "iY": 1j * _Y,
    "iZ": 1j * _Z,
}
for _op in OPERATORS.values():
    _op.flags.writeable = False

PAULI_LABELS = ("I", "X", "Y", "Z")
RESTRICTED_LABELS = ("I", "iX", "iY", "iZ")


def _frozen(m) -> np.ndarray:
    a = np.array(m, dtype=np.complex128)
    a.flags.writeable = False
    return a


def named_operator(name: str) -> np.ndarray:
    try:
        return OPERATORS[name]
    except KeyError:
        raise UnknownNameError(f"unknown operator name {name!r}; known: {sorted(OPERATORS)}") from None


def as_density(m, tol: float = TOL) -> np.ndarray:
    """Validate a density matrix and return it as a read-only complex array."""
    a = mc.as_cmatrix(m)
    if not mc.is_hermitian(a, tol):
        raise InvalidStateError("density matrix is not Hermitian")
    a = (a + a.conj().T) / 2
    if abs(np.trace(a) - 1) > tol:
        raise InvalidStateError(f"density matrix has trace {np.trace(a).real:.12g}, expected 1")
    if np.linalg.eigvalsh(a)[0] < -tol:
        raise InvalidStateError("density matrix is not positive semidefinite")
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class StrategyBasis:
    """Ordered orthonormal (under ``trace_inner``) set of strategy operators."""

    labels: tuple[str, ...]
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        ops = tuple(_frozen(mc.as_cmatrix(o)) for o in self.operators)
        if len(labels) != len(ops) or not ops:
            raise DimensionError("basis needs one label per operator and at least one operator")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate basis labels {labels}")
        if len({o.shape for o in ops}) != 1:
            raise DimensionError("basis operators must share one dimension")
        gram = self._gram(ops)
        if np.linalg.norm(gram - np.eye(len(ops))) > TOL:
            raise SpanError(f"basis {labels} is not orthonormal under the trace inner product")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "operators", ops)

    @staticmethod
    def _gram(ops) -> np.ndarray:
        return np.array([[mc.trace_inner(a, b) for b in ops] for a in ops])

    @classmethod
    def from_names(cls, names: Sequence[str]) -> "StrategyBasis":
        return cls(tuple(names), tuple(named_operator(n) for n in names))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def object_dim(self) -> int:
        return self.operators[0].shape[0]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownNameError(f"label {label!r} not in basis {self.labels}") from None


@dataclass(frozen=True)
class ManipulativeGame:
    """Object state, per-player strategy bases, application order, payoff observables.

    ``order`` lists players in the sequence their operators hit the object.
    ``classical`` marks games on classical objects, where strategy states are
    probability distributions and only diagonal payoff entries matter.
    """

    initial_state: np.ndarray
    bases: tuple[StrategyBasis, ...]
    order: tuple[int, ...]
    observables: tuple[np.ndarray, ...]
    name: str = ""
    classical: bool = False

    def __post_init__(self):
        rho0 = as_density(self.initial_state)
        bases = tuple(self.bases)
        order = tuple(int(k) for k in self.order)
        obs = tuple(_frozen(mc.as_cmatrix(p)) for p in self.observables)
        n = len(bases)
        if n == 0:
            raise ValueError("a game needs at least one player")
        if sorted(order) != list(range(n)):
            raise ValueError(f"order {order} is not a permutation of players 0..{n - 1}")
        if len(obs) != n:
            raise DimensionError(f"{n} players but {len(obs)} payoff observables")
        d = rho0.shape[0]
        for b in bases:
            if b.object_dim != d:
                raise DimensionError(
                    f"strategy operators are {b.object_dim}x{b.object_dim}, object state is {d}x{d}")
        for k, p in enumerate(obs):
            if p.shape != rho0.shape:
                raise DimensionError(f"observable {k} has shape {p.shape}, object state {rho0.shape}")
            if not mc.is_hermitian(p, TOL):
                raise NotHermitianError(f"observable {k} is not Hermitian")
        object.__setattr__(self, "initial_state", rho0)
        object.__setattr__(self, "bases", bases)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "observables", obs)

    @property
    def n_players(self) -> int:
        return len(self.bases)

    @property
    def object_dim(self) -> int:
        return self.initial_state.shape[0]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.size for b in self.bases)


@dataclass(frozen=True)
class AbstractGame:
    dims: tuple[int, ...]
    payoff_ops: tuple[np.ndarray, ...]
    basis_labels: tuple[tuple[str, ...], ...] = ()
    name: str = ""

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d <= 0 for d in dims):
            raise DimensionError(f"bad strategy dimensions {dims}")
        ops = tuple(_frozen(mc.as_cmatrix(h)) for h in self.payoff_ops)
        if len(ops) != len(dims):
            raise DimensionError(f"{len(dims)} players but {len(ops)} payoff operators")
        joint = int(np.prod(dims))
        for k, h in enumerate(ops):
            if h.shape != (joint, joint):
                raise DimensionError(f"payoff operator {k} has shape {h.shape}, expected {joint}x{joint}")
            if not mc.is_hermitian(h, TOL):
                raise NotHermitianError(f"payoff operator {k} is not Hermitian")
        labels = self.basis_labels or tuple(tuple(str(j + 1) for j in range(d)) for d in dims)
        labels = tuple(tuple(str(s) for s in ls) for ls in labels)
        if [len(ls) for ls in labels] != list(dims):
            raise DimensionError("basis_labels do not match dims")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "payoff_ops", ops)
        object.__setattr__(self, "basis_labels", labels)

    @property
    def n_players(self) -> int:
        return len(self.dims)

    @property
    def joint_dim(self) -> int:
        return int(np.prod(self.dims))

    def label_index(self, player: int, label: str) -> int:
        try:
            return self.basis_labels[player].index(label)
        except ValueError:
            raise UnknownNameError(
                f"label {label!r} not among player {player} labels {self.basis_labels[player]}") from None


@dataclass(frozen=True)
class Product:
    """Independent players: one density matrix per player.

    ``validate=False`` skips the density checks; used for finite-difference
    probes that step slightly off the state manifold.
    """

    states: tuple[np.ndarray, ...]
    restricted: bool = False
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.validate:
            states = tuple(as_density(s) for s in self.states)
        else:
            states = tuple(_frozen(mc.as_cmatrix(s)) for s in self.states)
        if not states:
            raise ValueError("empty profile")
        if self.restricted and any(np.max(np.abs(s.imag)) >= TOL for s in states):
            raise InvalidStateError("restricted profile has complex entries")
        object.__setattr__(self, "states", states)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.shape[0] for s in self.states)

    def joint(self) -> np.ndarray:
        return mc.kron_all(self.states)


@dataclass(frozen=True)
class Joint:
    """One (possibly correlated or entangled) density matrix over the joint space."""

    state: np.ndarray
    dims: tuple[int, ...]
    restricted: bool = False

    def __post_init__(self):
        rho = as_density(self.state)
        dims = tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != rho.shape[0]:
            raise DimensionError(f"dims {dims} do not factor a {rho.shape[0]}-dimensional state")
        if self.restricted and np.max(np.abs(rho.imag)) >= TOL:
            raise InvalidStateError("restricted profile has complex entries")
        object.__setattr__(self, "state", rho)
        object.__setattr__(self, "dims", dims)

    def joint(self) -> np.ndarray:
        return self.state


StrategyProfile = Union[Product, Joint]


def check_profile(game: AbstractGame, profile: StrategyProfile) -> None:
    if tuple(profile.dims) != tuple(game.dims):
        raise DimensionError(f"profile dims {tuple(profile.dims)} do not match game dims {game.dims}")


def uniform_product(dims: Sequence[int]) -> Product:
    return Product(tuple(np.eye(d) / d for d in dims))


def pure_product(game: AbstractGame, labels: Sequence[str]) -> Product:
    """Product of pure basis states, one label per player."""
    states = []
    for i, lab in enumerate(labels):
        k = game.label_index(i, lab)
        s = np.zeros((game.dims[i], game.dims[i]))
        s[k, k] = 1
        states.append(s)
    return Product(tuple(states))


# -- builtin games ----------------------------------------------------------

_HEAD = np.diag([1.0, 0.0])
_SCORE = np.diag([1.0, -1.0])


def _coin_game(labels, name, classical=False) -> ManipulativeGame:
    basis = StrategyBasis.from_names(labels)
    return ManipulativeGame(_HEAD, (basis, basis), (0, 1), (_SCORE, -_SCORE), name=name, classical=classical)


def builtin(name: str) -> Union[ManipulativeGame, AbstractGame]:
    """Return one of the predefined games.

    ``pfg`` (penny flipping), ``srg`` (spin rotating, Pauli basis),
    ``srg_restricted`` (spin rotating, basis {I, iX, iY, iZ}) and
    ``prisoners_dilemma``.
    """
    if name == "pfg":
        return _coin_game(("I", "X"), "pfg", classical=True)
    if name == "srg":
        return _coin_game(PAULI_LABELS, "srg")
    if name == "srg_restricted":
        return _coin_game(RESTRICTED_LABELS, "srg_restricted")
    if name == "prisoners_dilemma":
        return AbstractGame(
            (2, 2),
            (np.diag([-2.0, -5.0, 0.0, -4.0]), np.diag([-2.0, 0.0, -5.0, -4.0])),
            (("C", "D"), ("C", "D")),
            name="prisoners_dilemma",
        )
    raise UnknownNameError(f"unknown builtin game {name!r}; known: {sorted(BUILTIN_NAMES)}")


BUILTIN_NAMES = ("pfg", "srg", "srg_restricted", "prisoners_dilemma")


# -- single-qubit strategies --------------------------------------------------

def su2_strategy(alpha: float, beta: float, gamma: float, delta: float) -> np.ndarray:
    """General 2x2 unitary in the Euler-angle form expanded over {I, X, Y, Z}."""
    c, s = np.cos(gamma / 2), np.sin(gamma / 2)
    plus, minus = (beta + delta) / 2, (beta - delta) / 2
    u = (c * np.cos(plus) * _I
         + 1j * s * np.sin(minus) * _X
         - 1j * s * np.cos(minus) * _Y
         - 1j * c * np.sin(plus) * _Z)
    return np.exp(1j * alpha) * u


def su2_coefficients(beta, gamma, delta) -> np.ndarray:
    """Real coefficients of ``su2_strategy(0, beta, gamma, delta)`` over {I, iX, iY, iZ}.

    Broadcasts over array arguments; the last axis has length 4.
    """
    beta, gamma, delta = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (beta, gamma, delta)))
    c, s = np.cos(gamma / 2), np.sin(gamma / 2)
    plus, minus = (beta + delta) / 2, (beta - delta) / 2
    return np.stack([c * np.cos(plus), s * np.sin(minus), -s * np.cos(minus), -c * np.sin(plus)], axis=-1)


def basis_coefficients(op, basis: StrategyBasis) -> np.ndarray:
    return np.array([mc.trace_inner(b, op) for b in basis.operators])


def pure_strategy_density(op, basis: StrategyBasis, tol: float = TOL) -> np.ndarray:
    """Density matrix |s><s| of the strategy operator ``op`` in ``basis``.

    The coefficient vector is normalized, so any nonzero multiple of a
    strategy gives the same state.
    """
    op = mc.as_cmatrix(op)
    if op.shape[0] != basis.object_dim:
        raise DimensionError(f"operator is {op.shape[0]}x{op.shape[0]}, basis acts on dim {basis.object_dim}")
    c = basis_coefficients(op, basis)
    norm = np.linalg.norm(c)
    if norm < tol:
        raise SpanError("zero-norm strategy operator")
    residual = op - sum(ci * b for ci, b in zip(c, basis.operators))
    if np.linalg.norm(residual) / np.sqrt(op.shape[0]) > tol * max(1.0, norm):
        raise SpanError(f"operator is not in the span of basis {basis.labels}")
    c = c / norm
    return as_density(np.outer(c, c.conj()))


# -- restricted density matrices ---------------------------------------------

def validate_restricted(rho, tol: float = TOL) -> bool:
    """True iff ``rho`` is a density matrix with purely real entries."""
    rho = as_density(rho)
    return bool(np.max(np.abs(rho.imag)) < tol)


def decompose_to_unitaries(rho, basis: StrategyBasis | None = None, tol: float = TOL):
    """Split a restricted state into a mixture of unitary strategies.

    Returns ``[(probability, operator), ...]`` sorted by decreasing
    probability, zero-weight eigenvectors omitted. Each eigenvector
    (a, b, c, d) over {I, iX, iY, iZ} maps to a*I + i(bX + cY + dZ).
    """
    basis = basis or StrategyBasis.from_names(RESTRICTED_LABELS)
    rho = as_density(rho)
    if not validate_restricted(rho, tol):
        raise InvalidStateError("state has complex entries; not a restricted density matrix")
    if rho.shape[0] != basis.size:
        raise DimensionError(f"state dimension {rho.shape[0]} does not match basis size {basis.size}")
    w, v = np.linalg.eigh(rho.real)
    out = []
    for k in np.argsort(-w, kind="stable"):
        if w[k] <= tol:
            continue
        vec = mc.fix_phase(v[:, k].astype(np.complex128)).real
        op = sum(x * b for x, b in zip(vec, basis.operators))
        out.append((float(w[k]), np.asarray(op)))
    return out


def count_free_parameters(rho_or_dim) -> int:
    """Independent real parameters of a real symmetric unit-trace matrix."""
    if np.ndim(rho_or_dim) == 0:
        n = int(rho_or_dim)
    else:
        n = mc.as_cmatrix(rho_or_dim).shape[0]
    if n <= 0:
        raise DimensionError("dimension must be positive")
    return n * (n + 1) // 2 - 1
