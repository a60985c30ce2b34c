"""Nash-equilibrium checks for density-matrix strategy profiles.

A profile is an equilibrium when no player gains by swapping its own part of
the state for any other density matrix while the rest of the profile (the
partial trace over that player) stays fixed. The deviation payoff is linear
in the deviating state, so in ``full`` mode the best response value is the
top eigenvalue of the deviation operator.

The second half of the module covers the spin rotating game in the basis
{I, iX, iY, iZ}: its 18-variable payoff polynomial, the equilibrium family
found from first-order conditions, and finite-difference stationarity.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .compiler import change_matrix, change_strategy_basis, compile as compile_game
from .errors import InvalidStateError, ModeError, UnknownNameError
from .gamespec import (PAULI_LABELS, RESTRICTED_LABELS, AbstractGame, Product, StrategyBasis,
                       StrategyProfile, builtin, su2_coefficients)
from .payoff import deviation_operator, expected_payoff

MODES = ("full", "classical", "restricted")
DEFAULT_GRID = 24


def _restricted_candidates(labels: Sequence[str], resolution: int) -> np.ndarray:
    """Coefficient vectors, in the player's basis, of a grid of pure unitary strategies."""
    try:
        basis = StrategyBasis.from_names(labels)
    except UnknownNameError:
        raise ModeError(f"restricted mode needs builtin operator labels, got {tuple(labels)}") from None
    t = change_matrix(StrategyBasis.from_names(RESTRICTED_LABELS), basis)
    two_pi = np.linspace(0, 2 * np.pi, resolution, endpoint=False)
    gam = np.linspace(0, np.pi, resolution)
    b, g, d = np.meshgrid(two_pi, gam, two_pi, indexing="ij")
    c = su2_coefficients(b.ravel(), g.ravel(), d.ravel())
    return c @ t.T


def best_response_value(g: AbstractGame, p: StrategyProfile, i: int, mode: str = "full",
                        resolution: int = DEFAULT_GRID) -> float:
    """Largest payoff player i can reach by unilaterally changing its state.

    ``full``: any density matrix; ``classical``: pure basis strategies;
    ``restricted``: unitary strategies sampled on a resolution**3 grid of
    Euler angles (4-dimensional single-qubit strategy spaces only).
    """
    hr = deviation_operator(g, p, i)
    if mode == "full":
        return float(np.linalg.eigvalsh(hr)[-1])
    if mode == "classical":
        return float(np.max(np.diag(hr).real))
    if mode == "restricted":
        if g.dims[i] != 4:
            raise ModeError(f"restricted mode needs 4-dimensional strategy spaces, player {i} has {g.dims[i]}")
        c = _restricted_candidates(g.basis_labels[i], resolution)
        vals = np.einsum("ka,ab,kb->k", c.conj(), hr, c).real
        return float(np.max(vals))
    raise ModeError(f"unknown mode {mode!r}; expected one of {MODES}")


def regret(g: AbstractGame, p: StrategyProfile, i: int, mode: str = "full",
           resolution: int = DEFAULT_GRID) -> float:
    return best_response_value(g, p, i, mode, resolution) - expected_payoff(g, p, i)


def is_nash(g: AbstractGame, p: StrategyProfile, tol: float = 1e-8, mode: str = "full",
            resolution: int = DEFAULT_GRID) -> tuple[bool, list[float]]:
    regrets = [regret(g, p, i, mode, resolution) for i in range(g.n_players)]
    return max(regrets) <= tol, regrets


def grid_slack(g: AbstractGame, p: StrategyProfile, i: int, resolution: int = DEFAULT_GRID) -> float:
    """Upper bound on how far the restricted grid maximum can fall below the true maximum.

    The coefficient vector moves at most half as fast as the Euler angles, any
    point is within sqrt(3)*pi/resolution of the grid in angle space, and the
    payoff c^T A c changes by at most 2*||A|| per unit of coefficient distance.
    """
    a = np.linalg.norm(deviation_operator(g, p, i), 2)
    return float(np.sqrt(3) * np.pi * a / resolution)


# -- spin rotating game in the restricted basis ---------------------------------

#: Variable layout of a real symmetric 4x4 state:
#: [[p11, a, b, g], [a, p22, m, n], [b, m, p33, d], [g, n, d, p44]]
VARIABLES = ("p11", "p22", "p33", "p44", "alpha", "beta", "gamma", "mu", "nu", "delta")
_POS = {"alpha": (0, 1), "beta": (0, 2), "gamma": (0, 3), "mu": (1, 2), "nu": (1, 3), "delta": (2, 3)}


def restricted_srg() -> AbstractGame:
    """Spin rotating game with payoff operators expressed over {I, iX, iY, iZ}."""
    return change_strategy_basis(compile_game(builtin("srg")), PAULI_LABELS, RESTRICTED_LABELS)


def restricted_matrix(values) -> np.ndarray:
    """Real symmetric 4x4 matrix from the ten layout variables (sequence or mapping)."""
    if isinstance(values, dict):
        values = [values[k] for k in VARIABLES]
    values = [float(x) for x in values]
    if len(values) != 10:
        raise ValueError(f"need exactly ten variables, got {len(values)}")
    v = dict(zip(VARIABLES, values))
    m = np.diag([v["p11"], v["p22"], v["p33"], v["p44"]])
    for name, (r, c) in _POS.items():
        m[r, c] = m[c, r] = v[name]
    return m


def restricted_variables(m) -> np.ndarray:
    m = np.asarray(m).real
    return np.array([m[0, 0], m[1, 1], m[2, 2], m[3, 3]] + [m[r, c] for r, c in _POS.values()])


def srg_payoff_polynomial(player1, player2) -> float:
    """Player 1's spin-rotating-game payoff as a polynomial of both players' variables.

    Each argument holds the ten layout variables ``VARIABLES`` (the p11/p44
    entries only enter through the trace condition). Player 2 gets the
    negative.
    """
    a = dict(zip(VARIABLES, restricted_variables(restricted_matrix(player1))))
    b = dict(zip(VARIABLES, restricted_variables(restricted_matrix(player2))))
    s1 = a["p22"] + a["p33"]
    s2 = b["p22"] + b["p33"]
    return float(
        1 - 2 * s1 - 2 * s2 + 4 * s1 * s2
        - 4 * a["alpha"] * b["alpha"] - 4 * a["beta"] * b["beta"]
        + 4 * a["nu"] * b["nu"] + 4 * a["delta"] * b["delta"]
        + 4 * a["alpha"] * b["delta"] - 4 * a["delta"] * b["alpha"]
        + 4 * a["nu"] * b["beta"] - 4 * a["beta"] * b["nu"]
    )


def _family_matrix(pa, pb, alpha, beta, gamma, mu, sign) -> np.ndarray:
    # sign=+1: player 1 (nu = beta, delta = -alpha); sign=-1: player 2 (nu = -beta, delta = alpha)
    return restricted_matrix([pa, pb, 0.5 - pb, 0.5 - pa, alpha, beta, gamma, mu, sign * beta, -sign * alpha])


def srg_ne_family(p_a1, p_b1, alpha1, beta1, gamma1, mu1,
                  p_a2, p_b2, alpha2, beta2, gamma2, mu2, tol: float = 1e-10) -> Product:
    """Member of the spin-rotating-game equilibrium family (restricted basis).

    Diagonals are (p_a, p_b, 1/2 - p_b, 1/2 - p_a); gamma and mu are free.
    Raises InvalidStateError when a resulting matrix is not positive semidefinite.
    """
    mats = (_family_matrix(p_a1, p_b1, alpha1, beta1, gamma1, mu1, +1),
            _family_matrix(p_a2, p_b2, alpha2, beta2, gamma2, mu2, -1))
    for k, m in enumerate(mats):
        low = float(np.linalg.eigvalsh(m)[0])
        if low < -tol:
            raise InvalidStateError(f"player {k} family matrix has negative eigenvalue {low:.6g}")
    return Product(mats, restricted=True)


#: Free variables per player for finite differences (p11 follows from the trace).
FREE_VARIABLES = VARIABLES[1:]
SRG_OWNERS = (0,) * len(FREE_VARIABLES) + (1,) * len(FREE_VARIABLES)


def srg_vector(profile: Product) -> np.ndarray:
    """The 18 free variables of a restricted two-player profile."""
    return np.concatenate([restricted_variables(s)[1:] for s in profile.states])


def srg_profile_builder(x) -> Product:
    """Inverse of ``srg_vector``; no density checks, so off-manifold probes are allowed."""
    x = np.asarray(x, dtype=float)
    if x.shape != (18,):
        raise ValueError("expected 18 variables")
    mats = []
    for half in (x[:9], x[9:]):
        p11 = 1 - half[0] - half[1] - half[2]
        mats.append(restricted_matrix(np.concatenate([[p11], half])))
    return Product(tuple(mats), validate=False)


def stationarity_check(g: AbstractGame, builder: Callable[[np.ndarray], StrategyProfile], at,
                       owners: Sequence[int], h: float = 1e-5) -> float:
    """Largest |dE^i/dx_k| over parameters x_k not owned by player i.

    Central differences with step ``h``; ``owners[k]`` is the player whose
    state parameter k describes.
    """
    at = np.asarray(at, dtype=float)
    if len(owners) != at.size:
        raise ValueError("owners must give one player per parameter")
    worst = 0.0
    for k in range(at.size):
        up, down = at.copy(), at.copy()
        up[k] += h
        down[k] -= h
        pu, pd = builder(up), builder(down)
        for i in range(g.n_players):
            if i == owners[k]:
                continue
            grad = (expected_payoff(g, pu, i) - expected_payoff(g, pd, i)) / (2 * h)
            worst = max(worst, abs(grad))
    return worst
