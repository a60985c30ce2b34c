"""Command-line front end: ``hamgame {compile,payoff,solve,sweep,verify,reduce}``.

Games are JSON game files or ``builtin:NAME``. Every command except
``compile`` prints a JSON run report (command, config, results, trace) on
stdout or to ``--out``; ``compile`` emits an abstract game file that the
other commands read back.

Exit codes: 0 success, 2 usage or parse error, 3 profile is not an
equilibrium (``verify``), 4 numerical failure such as a non-Hermitian matrix.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .compiler import as_abstract, change_strategy_basis
from .equilibrium import is_nash
from .errors import (HamGameError, InvalidStateError, ModeError, NotHermitianError,
                     NumericalResidueError)
from .gamefile import dumps_game, encode_matrix, load_game, load_profile
from .gamespec import AbstractGame, ManipulativeGame, Product, StrategyProfile, uniform_product
from .payoff import payoffs
from .reducibility import classical_reduction
from .solver import MODES, SolverConfig, SolverTrace, beta_sweep, metropolis_sample

log = logging.getLogger("hamgame")

EXIT_OK, EXIT_USAGE, EXIT_NOT_NASH, EXIT_NUMERIC = 0, 2, 3, 4

TRACE_HELP = """\
trace CSV: one header row, then one row per (beta, sweep, player):
  beta        inverse temperature of the run
  sweep       1-based sweep number
  player      1-based player index
  payoff      that player's expected payoff after the sweep
  p_<label>   diagonal entries of the player's state, one column per basis
              label (p_1, p_2, ... when players use different labels)
  delta_norm  Frobenius norm of the player's state change in the sweep
"""


@dataclass
class RunReport:
    command: str
    config: dict[str, Any]
    results: dict[str, Any]
    trace: str | None = None
    exit_code: int = EXIT_OK

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))


@dataclass
class _Ctx:
    args: argparse.Namespace
    game: Any = None
    abstract: AbstractGame | None = None
    config: dict[str, Any] = field(default_factory=dict)


# -- helpers ----------------------------------------------------------------------

def _floats(xs) -> list[float]:
    return [float(x) for x in xs]


def _split_labels(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _abstract_of(game, classical: bool = False, basis: Sequence[str] | None = None) -> AbstractGame:
    g = as_abstract(game, classical)
    if basis:
        old = game.bases if isinstance(game, ManipulativeGame) else g.basis_labels
        g = change_strategy_basis(g, old, list(basis))
    return g


def _states_json(p: StrategyProfile) -> dict[str, Any]:
    if isinstance(p, Product):
        return {"product": [encode_matrix(s) for s in p.states]}
    return {"joint": encode_matrix(p.state)}


def _regrets(g: AbstractGame, p: StrategyProfile, mode: str, tol: float) -> dict[str, Any]:
    try:
        ok, regs = is_nash(g, p, tol, mode)
    except ModeError as e:
        log.info("regret mode %s unavailable (%s); using full", mode, e)
        mode = "full"
        ok, regs = is_nash(g, p, tol, mode)
    return {"regret_mode": mode, "regrets": _floats(regs), "is_nash": bool(ok)}


def _p_columns(g: AbstractGame) -> list[str]:
    if len(set(g.basis_labels)) == 1:
        return [f"p_{lab}" for lab in g.basis_labels[0]]
    return [f"p_{k + 1}" for k in range(max(g.dims))]


def write_trace(path: str | Path, g: AbstractGame, runs: Sequence[tuple[float, SolverTrace]]) -> None:
    cols = _p_columns(g)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "sweep", "player", "payoff", *cols, "delta_norm"])
        for beta, tr in runs:
            for rec in tr.records:
                for i in range(g.n_players):
                    diag = [repr(float(x)) for x in rec.diagonals[i]]
                    diag += [""] * (len(cols) - len(diag))
                    w.writerow([repr(beta), rec.sweep, i + 1, repr(rec.payoffs[i]), *diag, repr(rec.deltas[i])])


# -- commands ---------------------------------------------------------------------

def cmd_compile(ctx: _Ctx) -> int:
    a = ctx.args
    if not isinstance(ctx.game, ManipulativeGame):
        raise ModeError("compile needs a manipulative game; this file is already abstract")
    basis = _split_labels(a.basis) if a.basis else None
    g = _abstract_of(ctx.game, a.classical, basis)
    text = dumps_game(g)
    if a.out:
        Path(a.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_payoff(ctx: _Ctx) -> RunReport:
    p = load_profile(ctx.args.profile, ctx.abstract)
    return RunReport("payoff", ctx.config, {"payoffs": _floats(payoffs(ctx.abstract, p))})


def _initial(ctx: _Ctx) -> Product:
    src = ctx.args.init
    if src == "uniform":
        return uniform_product(ctx.abstract.dims)
    p = load_profile(src, ctx.abstract)
    if not isinstance(p, Product):
        raise ModeError("the solver needs a product initial profile")
    return p


def cmd_solve(ctx: _Ctx) -> RunReport:
    a = ctx.args
    g = ctx.abstract
    if a.betas is not None:
        betas = [float(x) for x in _split_labels(a.betas)]
        if not betas:
            raise ValueError("--betas needs at least one value")
    else:
        betas = [a.beta]
    cfg = SolverConfig(beta=betas[0], max_sweeps=a.max_sweeps, tolerance=a.tol, damping=a.damping,
                       mode=a.mode, seed=a.seed, simultaneous=a.simultaneous)
    ctx.config.update({"solver": asdict(cfg), "betas": betas, "init": a.init})
    points = beta_sweep(g, _initial(ctx), cfg, betas, max_workers=a.workers)
    regret_mode = {"full": "full", "classical": "classical", "restricted": "restricted"}[a.mode]
    runs = []
    for pt in points:
        run = {"beta": pt.beta, "status": pt.trace.status, "sweeps": pt.trace.sweeps,
               "payoffs": _floats(pt.payoffs),
               "diagonals": [_floats(np.diag(s).real) for s in pt.profile.states],
               **_regrets(g, pt.profile, regret_mode, a.tol_nash),
               "state": _states_json(pt.profile)}
        if a.mode == "restricted":
            run["max_imag_dropped"] = pt.trace.max_imag_dropped
        runs.append(run)
    results: dict[str, Any] = {"runs": runs}
    if a.metropolis:
        if len(betas) != 1:
            raise ValueError("--metropolis needs a single --beta")
        freq = metropolis_sample(g, cfg, a.burn_in, a.samples)
        results["metropolis"] = {"burn_in": a.burn_in, "samples": a.samples,
                                 "frequencies": freq.tolist()}
    if a.trace:
        write_trace(a.trace, g, [(pt.beta, pt.trace) for pt in points])
    return RunReport(a.command, ctx.config, results, trace=a.trace)


def cmd_verify(ctx: _Ctx) -> RunReport:
    a = ctx.args
    p = load_profile(a.profile, ctx.abstract)
    res = {"payoffs": _floats(payoffs(ctx.abstract, p)), **_regrets(ctx.abstract, p, a.mode, a.tol)}
    if res["regret_mode"] != a.mode:
        raise ModeError(f"mode {a.mode!r} does not fit this game")
    verdict = "NE" if res["is_nash"] else "not NE"
    print(f"{verdict}: regrets " + ", ".join(f"{r:.3g}" for r in res["regrets"]), file=sys.stderr)
    return RunReport("verify", ctx.config, res, exit_code=EXIT_OK if res["is_nash"] else EXIT_NOT_NASH)


def cmd_reduce(ctx: _Ctx) -> RunReport:
    red = classical_reduction(ctx.abstract, ctx.args.tol)
    res = {
        "commute": red.commute,
        "commutator_norm": red.commutator_norm,
        "success": red.success,
        "case": red.case,
        "diagnosis": red.diagnosis,
        "residual_freedom": red.residual_freedom,
        "labels": red.labels,
        "tables": [t.tolist() for t in red.tables],
        "schmidt": [{"eigenvalues": list(r.eigenvalues), "schmidt_values": _floats(r.schmidt_values),
                     "product": r.product} for r in red.schmidt],
    }
    return RunReport("reduce", ctx.config, res)


# -- argument parsing ----------------------------------------------------------------

def _game_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("game", help="game file or builtin:NAME (pfg, srg, srg_restricted, prisoners_dilemma)")
    p.add_argument("--classical", action="store_true",
                   help="compile manipulative games keeping only diagonal payoff entries")
    p.add_argument("--out", help="write the output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hamgame", description="Games with density-matrix strategies.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log to stderr (repeat for debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a manipulative game into payoff operators")
    _game_args(p)
    p.add_argument("--basis", help="comma-separated operator names of a new strategy basis, e.g. I,iX,iY,iZ")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("payoff", help="expected payoff of every player for a profile")
    _game_args(p)
    p.add_argument("--profile", required=True, help="profile file, 'uniform', or pure:L1,L2,...")
    p.set_defaults(func=cmd_payoff)

    for name, helptext in (("solve", "Boltzmann fixed-point iteration"),
                           ("sweep", "Boltzmann fixed points over a list of beta values")):
        p = sub.add_parser(name, help=helptext, epilog=TRACE_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        _game_args(p)
        b = p.add_mutually_exclusive_group(required=name == "sweep")
        if name == "solve":
            b.add_argument("--beta", type=float, default=1.0, help="inverse temperature (default 1)")
        b.add_argument("--betas", help="comma-separated beta values, solved independently")
        p.add_argument("--max-sweeps", type=int, default=1000)
        p.add_argument("--tol", type=float, default=1e-10, help="stop when every state moves less than this")
        p.add_argument("--tol-nash", type=float, default=1e-6, help="regret tolerance for the NE verdict")
        p.add_argument("--damping", type=float, default=1.0)
        p.add_argument("--mode", choices=MODES, default="full")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--simultaneous", action="store_true", help="update all players from the previous sweep")
        p.add_argument("--init", default="uniform", help="'uniform' or a product profile file")
        p.add_argument("--workers", type=int, default=None, help="threads for multi-beta runs")
        p.add_argument("--trace", help="write the per-sweep trace CSV here")
        p.add_argument("--metropolis", action="store_true", help="also sample the Metropolis chain")
        p.add_argument("--burn-in", type=int, default=1000)
        p.add_argument("--samples", type=int, default=10000)
        p.set_defaults(func=cmd_solve, beta=1.0)

    p = sub.add_parser("verify", help="check whether a profile is a Nash equilibrium (exit 3 if not)")
    _game_args(p)
    p.add_argument("--profile", required=True, help="profile file, 'uniform', or pure:L1,L2,...")
    p.add_argument("--mode", choices=("full", "classical", "restricted"), default="full")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="classical reducibility analysis")
    _game_args(p)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_reduce)
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (NotHermitianError, InvalidStateError, NumericalResidueError,
                        np.linalg.LinAlgError, FloatingPointError)):
        return EXIT_NUMERIC
    return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=(logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)],
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    ctx = _Ctx(args)
    try:
        ctx.game = load_game(args.game)
        ctx.config = {"game": args.game, "classical": args.classical}
        if args.command != "compile":
            ctx.abstract = _abstract_of(ctx.game, args.classical)
        out = args.func(ctx)
    except (HamGameError, ValueError, KeyError, np.linalg.LinAlgError) as e:
        print(f"hamgame {args.command}: error: {e}", file=sys.stderr)
        return _exit_code(e)
    if isinstance(out, int):
        return out
    text = out.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return out.exit_code
