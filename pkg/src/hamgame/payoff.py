"""Payoffs E^i = Tr(rho H^i), reduced payoff matrices, deviation embedding."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import matrixcore as mc
from .errors import DimensionError, NumericalResidueError
from .gamespec import AbstractGame, Joint, Product, StrategyProfile, as_density, check_profile

IMAG_TOL = 1e-10


def _real(value: complex, what: str, tol: float = IMAG_TOL) -> float:
    if abs(value.imag) > tol * max(1.0, abs(value.real)):
        raise NumericalResidueError(f"{what} has imaginary part {value.imag:.3g}")
    return float(value.real)


def expected_payoff(g: AbstractGame, p: StrategyProfile, i: int) -> float:
    check_profile(g, p)
    h = g.payoff_ops[i]
    return _real(complex(np.sum(p.joint() * h.T)), f"payoff of player {i}")


def payoffs(g: AbstractGame, p: StrategyProfile) -> list[float]:
    return [expected_payoff(g, p, i) for i in range(g.n_players)]


def contract_others(h: np.ndarray, dims: Sequence[int], i: int, others: np.ndarray) -> np.ndarray:
    """Tr_{-i}((others (x) I_i) h) with ``others`` a state on every factor but i.

    ``others`` lists the remaining factors in their original order.
    """
    dims = list(dims)
    n = len(dims)
    rest = [k for k in range(n) if k != i]
    d_rest = int(np.prod([dims[k] for k in rest])) if rest else 1
    if others.shape != (d_rest, d_rest):
        raise DimensionError(f"state of the other players has shape {others.shape}, expected {d_rest}")
    hp = mc.permute_subsystems(h, dims, rest + [i]).reshape(d_rest, dims[i], d_rest, dims[i])
    # (sigma (x) I) h traced over the rest: sum_{x,z} sigma[x,z] h[(z,a),(x,b)]
    return np.einsum("xz,zaxb->ab", others, hp)


def reduced_payoff_matrix(g: AbstractGame, p: Product, i: int) -> np.ndarray:
    """Player i's effective payoff operator with every other player's state fixed."""
    if not isinstance(p, Product):
        raise TypeError("reduced payoff matrices are defined for product profiles only")
    check_profile(g, p)
    others = mc.kron_all([s for k, s in enumerate(p.states) if k != i])
    hr = contract_others(g.payoff_ops[i], g.dims, i, others)
    return (hr + hr.conj().T) / 2


def marginal_without(joint, dims: Sequence[int], i: int) -> np.ndarray:
    """State of every player except i (trace out factor i)."""
    n = len(dims)
    if n == 1:
        return np.ones((1, 1), dtype=np.complex128)
    return mc.partial_trace(joint, dims, [k for k in range(n) if k != i])


def deviation_operator(g: AbstractGame, p: StrategyProfile, i: int) -> np.ndarray:
    """Operator whose expectation in rho_i is player i's payoff after deviating to rho_i.

    For product profiles this is the reduced payoff matrix; for joint
    profiles the others' state is the marginal obtained by tracing out i.
    """
    if isinstance(p, Product):
        return reduced_payoff_matrix(g, p, i)
    check_profile(g, p)
    sigma = marginal_without(p.state, g.dims, i)
    hr = contract_others(g.payoff_ops[i], g.dims, i, sigma)
    return (hr + hr.conj().T) / 2


def embed_deviation(joint, i: int, dev, dims: Sequence[int]) -> np.ndarray:
    """Replace player i's part of ``joint`` by ``dev``: Tr_i(joint) (x) dev, factor order kept."""
    joint = as_density(joint)
    dev = as_density(dev)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != joint.shape[0]:
        raise DimensionError(f"dims {dims} do not factor the joint state")
    if dev.shape[0] != dims[i]:
        raise DimensionError(f"deviation has dimension {dev.shape[0]}, player {i} has {dims[i]}")
    n = len(dims)
    rest = [k for k in range(n) if k != i]
    m = np.kron(marginal_without(joint, dims, i), dev)
    current = rest + [i]
    back = [current.index(k) for k in range(n)]
    return mc.permute_subsystems(m, [dims[k] for k in current], back)


def joint_of(p: StrategyProfile) -> Joint:
    if isinstance(p, Joint):
        return p
    return Joint(p.joint(), p.dims, restricted=p.restricted)
