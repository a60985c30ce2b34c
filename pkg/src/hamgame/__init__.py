"""Games whose players hold density-matrix strategy states.

Manipulative games (an object state acted on by the players' operators) are
compiled into Hermitian payoff operators on the joint strategy space. From
there the package evaluates payoffs, runs Boltzmann fixed-point dynamics,
checks Nash equilibria and tests whether a game reduces to a classical table.
"""

from .compiler import (change_strategy_basis, compile, compile_classical, compile_full,
                       extract_subgame, from_classical_table)
from .equilibrium import best_response_value, is_nash, regret
from .errors import (DimensionError, HamGameError, InvalidStateError, ModeError, NotHermitianError,
                     NumericalResidueError, SpanError, UnknownNameError)
from .gamespec import (AbstractGame, Joint, ManipulativeGame, Product, StrategyBasis, builtin,
                       uniform_product)
from .payoff import expected_payoff, payoffs, reduced_payoff_matrix
from .reducibility import classical_reduction, pairwise_commute
from .solver import SolverConfig, beta_sweep, metropolis_sample, solve

__version__ = "0.1.0"

__all__ = [
    "AbstractGame", "DimensionError", "HamGameError", "InvalidStateError", "Joint", "ManipulativeGame",
    "ModeError", "NotHermitianError", "NumericalResidueError", "Product", "SolverConfig", "SpanError",
    "StrategyBasis", "UnknownNameError", "best_response_value", "beta_sweep", "builtin",
    "change_strategy_basis", "classical_reduction", "compile", "compile_classical", "compile_full",
    "expected_payoff", "extract_subgame", "from_classical_table", "is_nash", "metropolis_sample",
    "pairwise_commute", "payoffs", "reduced_payoff_matrix", "regret", "solve", "uniform_product",
]
