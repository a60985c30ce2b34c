"""Dense complex linear algebra used throughout the package.

Every function accepts array-likes and returns fresh ``complex128`` arrays;
nothing is mutated in place. Joint spaces always put the first factor on the
slowest index, so ``kron(a, b)[2*i + k, 2*j + l] == a[i, j] * b[k, l]``.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, NotHermitianError

HERMITIAN_TOL = 1e-10
# Beyond this exponent exp() is close to float overflow.
_EXP_LIMIT = 700.0


def as_cmatrix(m) -> np.ndarray:
    """Coerce to a square, finite complex matrix."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def dagger(a) -> np.ndarray:
    return as_cmatrix(a).conj().T


def matmul(a, b) -> np.ndarray:
    a, b = as_cmatrix(a), as_cmatrix(b)
    _same_dim(a, b)
    return a @ b


def trace(a) -> complex:
    return complex(np.trace(as_cmatrix(a)))


def frobenius_norm(a) -> float:
    return float(np.linalg.norm(as_cmatrix(a)))


def kron(a, b) -> np.ndarray:
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def kron_all(factors: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for f in factors:
        out = np.kron(out, as_cmatrix(f))
    return out


def commutator(a, b) -> np.ndarray:
    a, b = as_cmatrix(a), as_cmatrix(b)
    _same_dim(a, b)
    return a @ b - b @ a


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = as_cmatrix(a)
    return float(np.linalg.norm(a - a.conj().T)) <= tol


def is_psd(a, tol: float = HERMITIAN_TOL) -> bool:
    """Hermitian with smallest eigenvalue >= -tol."""
    a = as_cmatrix(a)
    if not is_hermitian(a, tol):
        return False
    h = (a + a.conj().T) / 2
    return float(np.linalg.eigvalsh(h)[0]) >= -tol


def trace_inner(a, b) -> complex:
    """Normalized Hilbert-Schmidt product Tr(a^dagger b) / Tr(I)."""
    a, b = as_cmatrix(a), as_cmatrix(b)
    _same_dim(a, b)
    return complex(np.vdot(a, b) / a.shape[0])


class HermEigen(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector's global phase so its largest-magnitude entry is real positive."""
    k = int(np.argmax(np.abs(v)))
    if abs(v[k]) == 0:
        return v
    return v * (abs(v[k]) / v[k])


def herm_eigen(h, tol: float = HERMITIAN_TOL) -> HermEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Eigenvector phases are fixed (largest component real positive) so that
    repeated calls on the same input give identical output.
    """
    h = as_cmatrix(h)
    if not is_hermitian(h, tol):
        raise NotHermitianError("herm_eigen needs a Hermitian matrix")
    h = (h + h.conj().T) / 2
    w, v = np.linalg.eigh(h)
    for k in range(v.shape[1]):
        v[:, k] = fix_phase(v[:, k])
    return HermEigen(w, v)


def matrix_exp_hermitian(h, scale: float, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """exp(scale * h) via the spectral decomposition.

    If the largest exponent would overflow, the spectrum is shifted so that it
    is zero; the result is then off by a positive scalar factor, which callers
    remove by normalizing.
    """
    w, v = herm_eigen(h, tol)
    expo = scale * w
    top = float(np.max(expo))
    if top > _EXP_LIMIT:
        expo = expo - top
    return (v * np.exp(expo)) @ v.conj().T


def _check_dims(n: int, dims: Sequence[int]) -> list[int]:
    dims = [int(d) for d in dims]
    if not dims or any(d <= 0 for d in dims):
        raise DimensionError(f"dims must be positive integers, got {dims}")
    if int(np.prod(dims)) != n:
        raise DimensionError(f"dims {dims} do not factor a {n}x{n} matrix")
    return dims


def permute_subsystems(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors: factor ``perm[k]`` of the input ends up at position k."""
    m = as_cmatrix(m)
    dims = _check_dims(m.shape[0], dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(len(dims))):
        raise DimensionError(f"{perm} is not a permutation of {len(dims)} factors")
    n = len(dims)
    t = m.reshape(dims + dims)
    t = t.transpose(perm + [n + p for p in perm])
    return t.reshape(m.shape)


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every factor not listed in ``keep`` (0-based factor indices).

    Kept factors stay in their original relative order.
    """
    m = as_cmatrix(m)
    dims = _check_dims(m.shape[0], dims)
    keep = sorted({int(k) for k in keep})
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"keep={keep} is not a nonempty subset of 0..{len(dims) - 1}")
    n = len(dims)
    drop = [k for k in range(n) if k not in keep]
    t = m.reshape(dims + dims)
    t = t.transpose(keep + drop + [n + k for k in keep] + [n + k for k in drop])
    dk = int(np.prod([dims[k] for k in keep]))
    dd = int(np.prod([dims[k] for k in drop])) if drop else 1
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None,
                   real: bool = False) -> np.ndarray:
    """Random density matrix from a Ginibre matrix; ``real`` gives a real symmetric one."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k))
    if not real:
        g = g + 1j * rng.normal(size=(dim, k))
    rho = g @ g.conj().T
    return (rho / np.trace(rho).real).astype(np.complex128)
