"""Build abstract payoff operators from manipulative games, and reshape them.

For joint basis labels mu = (mu_1..mu_N), nu = (nu_1..nu_N) the payoff
operator of player i has entries

    H^i[mu, nu] = Tr(P^i L(nu) rho_0 L(mu)^dagger),

where L(s) multiplies the players' operators with the first player in the
application order innermost (it acts on the object first).
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from . import matrixcore as mc
from .errors import DimensionError, SpanError, UnknownNameError
from .gamespec import AbstractGame, ManipulativeGame, StrategyBasis, builtin

UNITARY_TOL = 1e-10


def joint_operators(game: ManipulativeGame) -> np.ndarray:
    """Composite object operators L(mu) for every joint label, player 0 slowest.

    Shape ``(D, d, d)`` with D the joint strategy dimension.
    """
    d = game.object_dim
    ops = []
    for combo in itertools.product(*(range(b.size) for b in game.bases)):
        op = np.eye(d, dtype=np.complex128)
        for player in game.order:
            op = game.bases[player].operators[combo[player]] @ op
        ops.append(op)
    return np.array(ops)


def object_outcome(game: ManipulativeGame, labels: Sequence[str]) -> np.ndarray:
    """Final object state when every player applies the named basis strategy."""
    d = game.object_dim
    op = np.eye(d, dtype=np.complex128)
    for player in game.order:
        b = game.bases[player]
        op = b.operators[b.index(labels[player])] @ op
    return op @ game.initial_state @ op.conj().T


def _labels(game: ManipulativeGame):
    return tuple(b.labels for b in game.bases)


def compile(game: ManipulativeGame) -> AbstractGame:
    """Abstract form of a manipulative game.

    Games flagged ``classical`` keep only the diagonal entries (their players
    mix pure strategies with probabilities, so nothing else is observable);
    all others get the full operators.
    """
    if game.classical:
        return compile_classical(game)
    return compile_full(game)


def compile_full(game: ManipulativeGame) -> AbstractGame:
    """Full payoff operators including off-diagonal entries, ignoring the classical flag."""
    lops = joint_operators(game)
    evolved = lops @ game.initial_state           # L(nu) rho_0
    payoff_ops = []
    for p in game.observables:
        # sum_{a,b,c} P[a,b] (L(nu) rho_0)[b,c] conj(L(mu))[a,c]
        h = np.einsum("ab,nbc,mac->mn", p, evolved, lops.conj())
        payoff_ops.append(h)
    return AbstractGame(game.dims, tuple(payoff_ops), _labels(game), name=game.name)


def compile_classical(game: ManipulativeGame) -> AbstractGame:
    """Abstract form keeping only the diagonal (pure-strategy) payoffs."""
    lops = joint_operators(game)
    finals = lops @ game.initial_state @ lops.conj().transpose(0, 2, 1)
    payoff_ops = [np.diag(np.einsum("ab,nba->n", p, finals)) for p in game.observables]
    return AbstractGame(game.dims, tuple(payoff_ops), _labels(game), name=game.name)


def change_matrix(old: StrategyBasis, new: StrategyBasis, tol: float = UNITARY_TOL) -> np.ndarray:
    """T[mu, nu] = <new_mu | old_nu>; must be unitary."""
    if old.object_dim != new.object_dim or old.size != new.size:
        raise SpanError(f"bases {old.labels} and {new.labels} have different shapes")
    t = np.array([[mc.trace_inner(a, b) for b in old.operators] for a in new.operators])
    if np.linalg.norm(t @ t.conj().T - np.eye(len(t))) > tol:
        raise SpanError(f"basis {new.labels} does not span the same space as {old.labels}")
    return t


def _as_bases(bases, n) -> list[StrategyBasis]:
    if isinstance(bases, StrategyBasis):
        return [bases] * n
    if bases and all(isinstance(b, str) for b in bases):
        return [StrategyBasis.from_names(bases)] * n
    out = [b if isinstance(b, StrategyBasis) else StrategyBasis.from_names(b) for b in bases]
    if len(out) != n:
        raise DimensionError(f"expected {n} bases, got {len(out)}")
    return out


def change_strategy_basis(g: AbstractGame, old_bases, new_bases, tol: float = UNITARY_TOL) -> AbstractGame:
    """Re-express every payoff operator in new per-player strategy bases.

    ``old_bases``/``new_bases`` are StrategyBasis objects or lists of builtin
    operator names, either one per player or a single one shared by all.
    Profiles transform the same way, ``rho' = T rho T^dagger``.
    """
    old = _as_bases(old_bases, g.n_players)
    new = _as_bases(new_bases, g.n_players)
    for k, (o, d) in enumerate(zip(old, g.dims)):
        if o.size != d:
            raise DimensionError(f"player {k}: old basis has {o.size} elements, game dimension is {d}")
    t = mc.kron_all([change_matrix(o, n, tol) for o, n in zip(old, new)])
    ops = tuple(t @ h @ t.conj().T for h in g.payoff_ops)
    return AbstractGame(g.dims, ops, tuple(n.labels for n in new), name=g.name)


def transform_state(rho, old_bases, new_bases, tol: float = UNITARY_TOL) -> np.ndarray:
    """Joint (or single-player) state re-expressed in new bases."""
    rho = mc.as_cmatrix(rho)
    if isinstance(old_bases, StrategyBasis):
        old_bases, new_bases = [old_bases], [new_bases]
    old = _as_bases(old_bases, len(old_bases))
    new = _as_bases(new_bases, len(old))
    t = mc.kron_all([change_matrix(o, n, tol) for o, n in zip(old, new)])
    return t @ rho @ t.conj().T


def _joint_indices(dims, per_player_idx) -> np.ndarray:
    grids = np.meshgrid(*[np.asarray(ix) for ix in per_player_idx], indexing="ij")
    return np.ravel_multi_index([g.ravel() for g in grids], dims)


def extract_subgame(g: AbstractGame, keep) -> AbstractGame:
    """Restrict every payoff operator to a product subset of basis labels.

    ``keep`` holds one label list per player (or a single list used for all
    players). Labels keep the game's original order.
    """
    if keep and isinstance(keep[0], str):
        keep = [keep] * g.n_players
    if len(keep) != g.n_players:
        raise DimensionError(f"expected {g.n_players} label sets, got {len(keep)}")
    idx = []
    for player, labs in enumerate(keep):
        if not labs:
            raise UnknownNameError(f"player {player}: empty label set")
        idx.append(sorted({g.label_index(player, lab) for lab in labs}))
    rows = _joint_indices(g.dims, idx)
    ops = tuple(h[np.ix_(rows, rows)] for h in g.payoff_ops)
    labels = tuple(tuple(g.basis_labels[p][k] for k in ix) for p, ix in enumerate(idx))
    return AbstractGame(tuple(len(ix) for ix in idx), ops, labels, name=g.name)


def from_classical_table(tables, labels=None, name: str = "") -> AbstractGame:
    """Diagonal payoff operators from per-player payoff tables of shape (L_1, ..., L_N)."""
    arrays = []
    for t in tables:
        try:
            arrays.append(np.asarray(t, dtype=float))
        except ValueError as exc:
            raise DimensionError(f"ragged payoff table: {exc}") from None
    if not arrays:
        raise DimensionError("no payoff tables")
    shape = arrays[0].shape
    if any(a.shape != shape for a in arrays):
        raise DimensionError(f"tables have different shapes: {[a.shape for a in arrays]}")
    if len(shape) != len(arrays):
        raise DimensionError(f"{len(arrays)} players need {len(arrays)}-dimensional tables, got shape {shape}")
    ops = tuple(np.diag(a.ravel()) for a in arrays)
    return AbstractGame(shape, ops, tuple(labels) if labels else (), name=name)


def builtin_abstract(name: str, classical: bool = False) -> AbstractGame:
    """Builtin game in abstract form, compiling manipulative builtins on the fly."""
    g = builtin(name)
    if isinstance(g, ManipulativeGame):
        return compile_classical(g) if classical else compile(g)
    return g


def as_abstract(game, classical: bool = False) -> AbstractGame:
    if isinstance(game, AbstractGame):
        return game
    return compile_classical(game) if classical else compile(game)

