"""When does a quantum game collapse to a classical payoff table?

Two routes are checked. If all payoff operators commute and share a
product eigenbasis |a_j>|b_k>, the game is diagonal in it and the eigenvalue
tuples form a classical table ("product-eigenbasis"). Otherwise the fallback
is to restrict play to mixtures of the given pure strategies, which keeps
only the diagonal of each operator ("diagonal-restriction").

The product basis is searched slot by slot: each H^i is split into its
operator-Schmidt factors, and the factors living on one slot are jointly
diagonalized. Any product common eigenbasis diagonalizes all of them, so the
search finds one whenever one exists, degenerate spectra included.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import matrixcore as mc
from .errors import DimensionError
from .gamespec import AbstractGame

DEGENERACY_GAP = 1e-8


def pairwise_commute(g: AbstractGame, tol: float = 1e-10) -> tuple[bool, float]:
    """(all commutators below tol, largest commutator Frobenius norm)."""
    worst = 0.0
    for a, b in itertools.combinations(g.payoff_ops, 2):
        worst = max(worst, float(np.linalg.norm(a @ b - b @ a)))
    return worst <= tol, worst


class CommonEigenvector(NamedTuple):
    vector: np.ndarray
    eigenvalues: tuple[float, ...]


def _clusters(values: np.ndarray, gap: float) -> list[np.ndarray]:
    """Index groups of (ascending) values whose neighbours differ by at most ``gap``."""
    groups, start = [], 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] - values[k - 1] > gap:
            groups.append(np.arange(start, k))
            start = k
    return groups


def _embed_local(op: np.ndarray, dims: Sequence[int], slot: int) -> np.ndarray:
    return mc.kron_all([op if k == slot else np.eye(d) for k, d in enumerate(dims)])


def _tie_breakers(g: AbstractGame) -> list[np.ndarray]:
    """Operators used to split degenerate common eigenspaces.

    Inside a block where every payoff operator is a multiple of the identity,
    any orthonormal basis is a valid set of common eigenvectors; these local
    operators steer the choice toward product vectors when one exists.
    """
    n = g.n_players
    extra = []
    for slot in range(n):
        for h in g.payoff_ops:
            local = mc.partial_trace(h, g.dims, [slot])
            extra.append(_embed_local(local, g.dims, slot))
    for slot in range(n):
        index_op = np.diag(np.arange(g.dims[slot], dtype=float))
        extra.append(_embed_local(index_op, g.dims, slot))
    return extra


@dataclass
class Eigenbasis:
    vectors: list[CommonEigenvector]
    # True when some block stayed degenerate after every refinement
    residual_freedom: bool = False


def _refine(ops: Sequence[np.ndarray], gap: float) -> tuple[np.ndarray, list[np.ndarray]]:
    """Simultaneously diagonalize commuting Hermitian operators by nested block refinement.

    Returns the unitary of column eigenvectors and the final degenerate blocks.
    """
    dim = ops[0].shape[0]
    basis = np.eye(dim, dtype=np.complex128)
    blocks = [np.arange(dim)]
    for op in ops:
        new_blocks = []
        for blk in blocks:
            if len(blk) == 1:
                new_blocks.append(blk)
                continue
            sub = basis[:, blk]
            compressed = sub.conj().T @ op @ sub
            w, v = np.linalg.eigh((compressed + compressed.conj().T) / 2)
            basis[:, blk] = sub @ v
            new_blocks.extend(blk[c] for c in _clusters(w, gap))
        blocks = new_blocks
    return basis, blocks


def common_eigenbasis(g: AbstractGame, tol: float = 1e-10, gap: float = DEGENERACY_GAP) -> Eigenbasis:
    """Common eigenvectors of all payoff operators with per-player eigenvalue tuples."""
    ok, worst = pairwise_commute(g, tol)
    if not ok:
        raise ValueError(f"payoff operators do not commute (max commutator norm {worst:.3g})")
    basis, blocks = _refine(list(g.payoff_ops) + _tie_breakers(g), gap)
    out = []
    for k in range(basis.shape[1]):
        v = mc.fix_phase(basis[:, k])
        vals = tuple(float(np.vdot(v, h @ v).real) for h in g.payoff_ops)
        out.append(CommonEigenvector(v, vals))
    # sort by the eigenvalue tuple for reproducible output
    out.sort(key=lambda e: tuple(round(x, 9) for x in e.eigenvalues))
    return Eigenbasis(out, residual_freedom=any(len(b) > 1 for b in blocks))


def product_form_check(v, dims: Sequence[int], tol: float = 1e-8) -> tuple[bool, np.ndarray]:
    """Schmidt test of a bipartite joint vector: product iff the second Schmidt value < tol."""
    dims = [int(d) for d in dims]
    if len(dims) != 2:
        raise DimensionError(f"product-form check is bipartite only, got {len(dims)} factors")
    v = np.asarray(v, dtype=np.complex128).ravel()
    if v.size != dims[0] * dims[1]:
        raise DimensionError(f"vector of length {v.size} does not match dims {dims}")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("zero vector")
    s = np.linalg.svd((v / norm).reshape(dims), compute_uv=False)
    return bool(len(s) < 2 or s[1] < tol), s


@dataclass
class SchmidtReport:
    eigenvalues: tuple[float, ...]
    schmidt_values: np.ndarray
    product: bool


@dataclass
class Reduction:
    success: bool
    case: str                       # "product-eigenbasis" or "diagonal-restriction"
    tables: list[np.ndarray]        # one array of shape dims per player
    labels: list[list[str]]
    diagnosis: str
    commute: bool
    commutator_norm: float
    schmidt: list[SchmidtReport] = field(default_factory=list)
    residual_freedom: bool = False
    factor_bases: list[np.ndarray] = field(default_factory=list)


def _column_key(col: np.ndarray):
    # standard basis vectors sort by their index; others by their largest entry, then values
    return int(np.argmax(np.abs(col) > np.abs(col).max() - 1e-9)), tuple(np.round(-col.real, 9))


def _slot_factors(h: np.ndarray, dims: Sequence[int], slot: int, tol: float) -> list[np.ndarray]:
    """Hermitian operators on one slot spanning the operator-Schmidt factors of h."""
    l1, l2 = dims
    # r[(a, a'), (b, b')] = h[(a, b), (a', b')]
    r = h.reshape(l1, l2, l1, l2).transpose(0, 2, 1, 3).reshape(l1 * l1, l2 * l2)
    if slot == 1:
        r = r.T
    d = dims[slot]
    u, s, _ = np.linalg.svd(r)
    if s.size == 0 or s[0] <= tol:
        return []
    out = []
    for k in np.flatnonzero(s > tol * max(1.0, s[0])):
        m = u[:, k].reshape(d, d)
        out += [(m + m.conj().T) / 2, (m - m.conj().T) / 2j]
    return out


def _local_product_basis(g: AbstractGame, tol: float, gap: float):
    """Per-slot unitaries whose tensor product diagonalizes every payoff operator, else None.

    If any product common eigenbasis exists, every slot factor of every H^i is
    diagonal in it, so jointly diagonalizing the slot factors finds one; the
    remaining degenerate blocks are spaces where all factors act as scalars.
    """
    bases = []
    for slot, d in enumerate(g.dims):
        ops = [f for h in g.payoff_ops for f in _slot_factors(h, g.dims, slot, tol)]
        ops.append(np.diag(np.arange(d, dtype=float)))
        u, _ = _refine(ops, gap)
        order = sorted(range(d), key=lambda k: _column_key(mc.fix_phase(u[:, k])))
        bases.append(np.array([mc.fix_phase(u[:, k]) for k in order]).T)
    full = mc.kron(*bases)
    for h in g.payoff_ops:
        rot = full.conj().T @ h @ full
        if np.linalg.norm(rot - np.diag(np.diag(rot))) > 1e-8 * max(1.0, np.linalg.norm(h)):
            return None
    return bases


def _factor_labels(g: AbstractGame, bases: list[np.ndarray]) -> list[list[str]]:
    out = []
    for player, m in enumerate(bases):
        names = []
        for k in range(m.shape[1]):
            col = m[:, k]
            j = int(np.argmax(np.abs(col)))
            if abs(abs(col[j]) - 1) < 1e-8:
                names.append(g.basis_labels[player][j])
            else:
                names.append(f"e{k + 1}")
        out.append(names)
    return out


def _diagonal_fallback(g: AbstractGame) -> list[np.ndarray]:
    return [np.diag(h).real.reshape(g.dims).copy() for h in g.payoff_ops]


def classical_reduction(g: AbstractGame, tol: float = 1e-10) -> Reduction:
    """Try the product-eigenbasis reduction; otherwise fall back to the diagonal game.

    Never raises for a valid game: the returned ``diagnosis`` says which
    condition failed.
    """
    ok, worst = pairwise_commute(g, tol)
    labels = [list(ls) for ls in g.basis_labels]

    def fallback(diagnosis, schmidt=(), freedom=False):
        return Reduction(False, "diagonal-restriction", _diagonal_fallback(g), labels, diagnosis,
                         ok, worst, list(schmidt), freedom)

    if not ok:
        return fallback("non-commuting payoff operators")
    if g.n_players > 2:
        return fallback("product-form certification is only implemented for two players")
    eig = common_eigenbasis(g, tol)
    if g.n_players == 1:
        tables = [np.array([e.eigenvalues[0] for e in eig.vectors])]
        vecs = np.array([e.vector for e in eig.vectors]).T
        return Reduction(True, "product-eigenbasis", tables, _factor_labels(g, [vecs]),
                         "single player: payoff operator diagonalized", ok, worst,
                         residual_freedom=eig.residual_freedom, factor_bases=[vecs])
    bases = _local_product_basis(g, tol, DEGENERACY_GAP)
    if bases is not None:
        full = mc.kron(*bases)
        tables = [np.diag(full.conj().T @ h @ full).real.reshape(g.dims).copy() for h in g.payoff_ops]
        reports = []
        for k in range(full.shape[1]):
            v = full[:, k]
            vals = tuple(float(np.vdot(v, h @ v).real) for h in g.payoff_ops)
            reports.append(SchmidtReport(vals, product_form_check(v, g.dims)[1], True))
        return Reduction(True, "product-eigenbasis", tables, _factor_labels(g, bases),
                         "commuting payoff operators with product common eigenbasis", ok, worst,
                         reports, False, bases)
    reports = []
    for e in eig.vectors:
        prod, s = product_form_check(e.vector, g.dims, 1e-8)
        reports.append(SchmidtReport(e.eigenvalues, s, prod))
    # no product basis diagonalizes every H^i; say what the common eigenbasis looks like
    if not all(r.product for r in reports):
        return fallback("entangled common eigenstates", reports, eig.residual_freedom)
    return fallback("product eigenvectors do not form a product basis", reports, eig.residual_freedom)


def rebuild_operators(red: Reduction) -> list[np.ndarray]:
    """Payoff operators implied by a product-eigenbasis reduction, in the original basis."""
    u = mc.kron_all(red.factor_bases)
    return [u @ np.diag(t.ravel()) @ u.conj().T for t in red.tables]
