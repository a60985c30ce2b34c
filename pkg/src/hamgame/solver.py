"""Boltzmann fixed-point dynamics over per-player density matrices.

Each player's state is repeatedly replaced by the Gibbs state of its reduced
payoff matrix, rho_i <- exp(beta H_R^i) / Z, with higher payoff favoured.
``beta`` plays the role of the players' rationality: beta = 0 gives uniform
play, beta -> infinity approaches exact best responses.
"""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import matrixcore as mc
from .errors import DimensionError, ModeError, NumericalResidueError
from .gamespec import AbstractGame, Product, as_density, check_profile
from .payoff import payoffs, reduced_payoff_matrix

log = logging.getLogger(__name__)

MODES = ("full", "restricted", "classical")
STATE_TOL = 1e-8


@dataclass(frozen=True)
class SolverConfig:
    beta: float = 1.0
    max_sweeps: int = 1000
    tolerance: float = 1e-10
    damping: float = 1.0
    mode: str = "full"
    seed: int = 0
    simultaneous: bool = False

    def __post_init__(self):
        if not self.beta >= 0 or not np.isfinite(self.beta):
            raise ValueError(f"beta must be a finite non-negative number, got {self.beta}")
        if int(self.max_sweeps) < 1:
            raise ValueError("max_sweeps must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass
class SweepRecord:
    sweep: int
    payoffs: list[float]
    diagonals: list[np.ndarray]
    deltas: list[float]


@dataclass
class SolverTrace:
    records: list[SweepRecord] = field(default_factory=list)
    status: str = "max_sweeps_reached"
    # largest imaginary part discarded by the restricted-mode projection
    max_imag_dropped: float = 0.0

    @property
    def sweeps(self) -> int:
        return len(self.records)

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def gibbs_state(h: np.ndarray, beta: float) -> np.ndarray:
    """exp(beta h) / Tr exp(beta h), with the spectrum shifted so nothing overflows."""
    w = np.linalg.eigvalsh((h + h.conj().T) / 2)
    shift = w[-1] if beta >= 0 else w[0]
    e = mc.matrix_exp_hermitian(h - shift * np.eye(h.shape[0]), beta)
    return e / np.trace(e).real


def boltzmann_step(g: AbstractGame, p: Product, i: int, beta: float, mode: str = "full") -> np.ndarray:
    """New state of player i: normalized exp(beta * reduced payoff matrix)."""
    hr = reduced_payoff_matrix(g, p, i)
    if mode == "classical":
        hr = np.diag(np.diag(hr).real).astype(np.complex128)
    return gibbs_state(hr, beta)


def _is_real_game(g: AbstractGame) -> bool:
    return all(np.max(np.abs(h.imag)) < 1e-12 for h in g.payoff_ops)


def solve(g: AbstractGame, initial: Product, cfg: SolverConfig) -> tuple[Product, SolverTrace]:
    """Iterate Boltzmann updates from ``initial`` until the profile stops moving.

    Players update in index order, each seeing the others' latest states
    (``cfg.simultaneous`` switches to Jacobi-style updates). Returns the
    final profile and a per-sweep trace; non-convergence is reported through
    ``trace.status``.
    """
    if not isinstance(initial, Product):
        raise TypeError("the solver works on product profiles")
    check_profile(g, initial)
    restricted = cfg.mode == "restricted"
    if restricted and any(np.max(np.abs(s.imag)) >= 1e-10 for s in initial.states):
        raise ModeError("restricted mode needs a real initial profile")
    real_game = _is_real_game(g)
    states = [np.array(s) for s in initial.states]
    trace = SolverTrace()
    n = g.n_players

    def update(current: list[np.ndarray], i: int) -> np.ndarray:
        target = boltzmann_step(g, Product(tuple(current), validate=False), i, cfg.beta, cfg.mode)
        new = (1 - cfg.damping) * current[i] + cfg.damping * target
        if restricted:
            dropped = float(np.max(np.abs(new.imag)))
            if real_game and dropped >= 1e-8:
                raise NumericalResidueError(f"restricted update of a real game left imaginary part {dropped:.3g}")
            trace.max_imag_dropped = max(trace.max_imag_dropped, dropped)
            new = new.real.astype(np.complex128)
        as_density(new, STATE_TOL)
        return new

    for sweep in range(1, int(cfg.max_sweeps) + 1):
        old = [s.copy() for s in states]
        if cfg.simultaneous:
            states = [update(old, i) for i in range(n)]
        else:
            for i in range(n):
                states[i] = update(states, i)
        deltas = [float(np.linalg.norm(states[i] - old[i])) for i in range(n)]
        prof = Product(tuple(states), validate=False)
        trace.records.append(SweepRecord(
            sweep, payoffs(g, prof), [np.diag(s).real.copy() for s in states], deltas))
        if max(deltas) < cfg.tolerance:
            trace.status = "converged"
            break
    log.debug("solve beta=%g finished after %d sweeps: %s", cfg.beta, trace.sweeps, trace.status)
    final = Product(tuple(as_density(s, STATE_TOL) for s in states), restricted=restricted)
    return final, trace


@dataclass
class BetaPoint:
    beta: float
    profile: Product
    payoffs: list[float]
    trace: SolverTrace


def beta_sweep(g: AbstractGame, initial: Product, cfg: SolverConfig, betas: Sequence[float],
               max_workers: int | None = None) -> list[BetaPoint]:
    """Independent solves, one per beta, returned in the order given."""
    def run(beta: float) -> BetaPoint:
        prof, tr = solve(g, initial, dataclasses.replace(cfg, beta=float(beta)))
        return BetaPoint(float(beta), prof, payoffs(g, prof), tr)

    betas = list(betas)
    if max_workers and max_workers > 1 and len(betas) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(run, betas))
    return [run(b) for b in betas]


def _payoff_tables(g: AbstractGame) -> list[np.ndarray]:
    tables = []
    for k, h in enumerate(g.payoff_ops):
        if np.linalg.norm(h - np.diag(np.diag(h))) > 1e-12:
            raise ModeError(f"payoff operator {k} is not diagonal; Metropolis sampling needs a classical game")
        tables.append(np.diag(h).real.reshape(g.dims))
    return tables


def metropolis_sample(g: AbstractGame, cfg: SolverConfig, burn_in: int, samples: int,
                      start: Sequence[int] | None = None) -> np.ndarray:
    """Empirical distribution of a single-player-flip Metropolis chain.

    One sweep proposes, for each player in turn, a pure strategy drawn
    uniformly from all of its strategies (the current one included, which
    keeps the chain aperiodic even at beta = 0) and accepts it with probability
    min(1, exp(beta * (new payoff - old payoff))) for that player. One sample
    is recorded after every sweep. Returns an array of shape ``g.dims``
    holding frequencies that sum to 1.
    """
    if samples < 1 or burn_in < 0:
        raise ValueError("need samples >= 1 and burn_in >= 0")
    tables = _payoff_tables(g)
    dims = g.dims
    n = g.n_players
    rng = np.random.default_rng(cfg.seed)
    if start is None:
        state = [int(rng.integers(d)) for d in dims]
    else:
        state = [int(s) for s in start]
        if len(state) != n or any(not 0 <= s < d for s, d in zip(state, dims)):
            raise DimensionError(f"bad start {start} for dims {dims}")
    counts = np.zeros(dims)
    total = burn_in + samples
    props = rng.random((total, n))
    accepts = rng.random((total, n))
    for t in range(total):
        for i in range(n):
            j = int(props[t, i] * dims[i])
            if j == state[i]:
                continue
            cur = tables[i][tuple(state)]
            trial = list(state)
            trial[i] = j
            gain = tables[i][tuple(trial)] - cur
            if gain >= 0 or accepts[t, i] < np.exp(cfg.beta * gain):
                state = trial
        if t >= burn_in:
            counts[tuple(state)] += 1
    return counts / samples
