"""JSON game and profile files.

A game file holds either a manipulative game::

    {"name": "pfg", "players": 2, "object_dim": 2, "classical": true,
     "initial_state": [[1, 0], [0, 0]],
     "strategy_basis": [["I", "X"], ["I", "X"]],
     "order": [1, 2],
     "payoffs": [[[1, 0], [0, -1]], [[-1, 0], [0, 1]]]}

or an abstract one::

    {"name": "pd", "abstract": {"dims": [2, 2], "labels": [["C", "D"], ["C", "D"]],
                                "H": [H1, H2]}}

Complex scalars are ``[re, im]`` pairs; plain numbers are read as real.
Basis entries are operator names or ``{"label": ..., "matrix": ...}``.
``order`` is 1-based in files. A profile file is ``{"product": [rho1, ...]}``
or ``{"joint": rho, "dims": [...]}``, optionally with ``"basis": [names]``
when the states are written in a different basis than the game's.

``builtin:NAME`` can stand in for any game path.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Union

import numpy as np

from . import matrixcore as mc
from .compiler import transform_state
from .errors import (DimensionError, HamGameError, InvalidStateError, NotHermitianError,
                     UnknownNameError)
from .gamespec import (AbstractGame, Joint, ManipulativeGame, Product, StrategyBasis,
                       StrategyProfile, builtin, check_profile, named_operator, pure_product,
                       uniform_product)

Game = Union[ManipulativeGame, AbstractGame]
BUILTIN_PREFIX = "builtin:"


class GameFileError(HamGameError, ValueError):
    """Malformed game or profile document; ``line`` is 1-based when known."""

    def __init__(self, message: str, source: str = "<string>", line: int | None = None):
        self.source, self.line, self.detail = source, line, message
        where = f"{source}:{line}" if line else source
        super().__init__(f"{where}: {message}")


class _Doc:
    """Parsed JSON plus enough of the raw text to point at offending keys."""

    def __init__(self, text: str, source: str):
        self.text, self.source = text, source
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as e:
            raise GameFileError(e.msg, source, e.lineno) from None
        if not isinstance(self.data, dict):
            raise GameFileError("top level must be a JSON object", source, 1)

    def line_of(self, key: str, element: int | None = None) -> int | None:
        """Line of ``"key":``, or of the element-th item of the list stored under it."""
        m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        if not m:
            return None
        pos = m.end()
        if element is not None:
            pos = self._list_item(pos, element) or m.start()
        return self.text.count("\n", 0, pos) + 1

    def _list_item(self, pos: int, element: int) -> int | None:
        t = self.text
        start = t.find("[", pos)
        if start < 0:
            return None
        depth, index, in_str, k = 0, 0, False, start
        while k < len(t):
            c = t[k]
            if in_str:
                if c == "\\":
                    k += 1
                elif c == '"':
                    in_str = False
            elif c == '"':
                in_str = True
            elif c in "[{":
                depth += 1
                if depth == 2 and index == element:
                    return k
            elif c in "]}":
                depth -= 1
                if depth == 0:
                    return None
            elif c == "," and depth == 1:
                index += 1
            elif depth == 1 and index == element and not c.isspace():
                return k
            k += 1
        return None

    def fail(self, key: str, message: str, exc=GameFileError, element: int | None = None):
        line = self.line_of(key, element)
        if exc is GameFileError:
            return GameFileError(message, self.source, line)
        where = f"{self.source}:{line}" if line else self.source
        return exc(f"{where}: {message}")

    def require(self, obj: dict, key: str):
        if key not in obj:
            raise GameFileError(f"missing key {key!r}", self.source, None)
        return obj[key]


# -- complex matrices ------------------------------------------------------------

def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]  # + 0.0 turns -0.0 into 0.0


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim == 1:
        return [encode_complex(z) for z in m]
    return [encode_matrix(row) for row in m]


def _scalar(x) -> complex:
    if isinstance(x, bool):
        raise ValueError("booleans are not numbers here")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                  for v in x):
        return complex(x[0], x[1])
    raise ValueError(f"expected a number or [re, im] pair, got {x!r}")


def decode_matrix(obj) -> np.ndarray:
    """Square complex matrix from nested lists of numbers or [re, im] pairs."""
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ValueError("a matrix must be a non-empty list of rows")
    rows = [[_scalar(x) for x in r] for r in obj]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError(f"matrix is not square ({n} rows, row lengths {[len(r) for r in rows]})")
    return np.array(rows, dtype=np.complex128)


def _matrix(doc: _Doc, obj, key: str, what: str, element: int | None = None) -> np.ndarray:
    try:
        return decode_matrix(obj)
    except ValueError as e:
        raise doc.fail(key, f"{what}: {e}", element=element) from None


def _hermitian(doc: _Doc, m: np.ndarray, key: str, what: str, element: int | None = None) -> np.ndarray:
    if not mc.is_hermitian(m, 1e-10):
        raise doc.fail(key, f"{what} is not Hermitian", NotHermitianError, element)
    return m


# -- games ----------------------------------------------------------------------

def _basis(doc: _Doc, spec, player: int) -> StrategyBasis:
    if not isinstance(spec, list) or not spec:
        raise doc.fail("strategy_basis", f"basis of player {player + 1} must be a non-empty list")
    labels, ops = [], []
    for k, item in enumerate(spec):
        if isinstance(item, str):
            try:
                ops.append(named_operator(item))
            except UnknownNameError as e:
                raise doc.fail("strategy_basis", str(e)) from None
            labels.append(item)
        elif isinstance(item, dict) and "matrix" in item:
            ops.append(_matrix(doc, item["matrix"], "strategy_basis", f"player {player + 1} basis element {k + 1}"))
            labels.append(str(item.get("label", k + 1)))
        else:
            raise doc.fail("strategy_basis", f"basis element {item!r} is neither a name nor {{label, matrix}}")
    try:
        return StrategyBasis(tuple(labels), tuple(ops))
    except (ValueError, DimensionError) as e:
        raise doc.fail("strategy_basis", f"player {player + 1}: {e}") from None


def _manipulative(doc: _Doc) -> ManipulativeGame:
    d = doc.data
    players = doc.require(d, "players")
    if not isinstance(players, int) or players < 1:
        raise doc.fail("players", "players must be a positive integer")
    rho0 = _matrix(doc, doc.require(d, "initial_state"), "initial_state", "initial_state")
    if "object_dim" in d and d["object_dim"] != rho0.shape[0]:
        raise doc.fail("object_dim", f"object_dim {d['object_dim']} but initial_state is {rho0.shape[0]}x{rho0.shape[0]}")
    raw_bases = doc.require(d, "strategy_basis")
    if isinstance(raw_bases, list) and raw_bases and all(isinstance(x, (str, dict)) for x in raw_bases):
        raw_bases = [raw_bases] * players      # one basis shared by every player
    if not isinstance(raw_bases, list) or len(raw_bases) != players:
        raise doc.fail("strategy_basis", f"need one strategy basis per player ({players})")
    bases = tuple(_basis(doc, b, k) for k, b in enumerate(raw_bases))
    order = d.get("order", list(range(1, players + 1)))
    if not isinstance(order, list) or sorted(order) != list(range(1, players + 1)):
        raise doc.fail("order", f"order must be a permutation of 1..{players}")
    raw_pay = doc.require(d, "payoffs")
    if not isinstance(raw_pay, list) or len(raw_pay) != players:
        raise doc.fail("payoffs", f"need one payoff observable per player ({players})")
    obs = tuple(_hermitian(doc, _matrix(doc, p, "payoffs", f"payoff {k + 1}", k), "payoffs", f"payoff {k + 1}", k)
                for k, p in enumerate(raw_pay))
    try:
        return ManipulativeGame(rho0, bases, tuple(o - 1 for o in order), obs,
                                name=str(d.get("name", "")), classical=bool(d.get("classical", False)))
    except InvalidStateError as e:
        raise doc.fail("initial_state", str(e), InvalidStateError) from None
    except DimensionError as e:
        raise doc.fail("payoffs", str(e)) from None


def _abstract(doc: _Doc) -> AbstractGame:
    block = doc.data["abstract"]
    if not isinstance(block, dict):
        raise doc.fail("abstract", "abstract must be an object")
    dims = doc.require(block, "dims")
    if not isinstance(dims, list) or not all(isinstance(x, int) and x > 0 for x in dims) or not dims:
        raise doc.fail("dims", "dims must be a list of positive integers")
    raw = doc.require(block, "H")
    if not isinstance(raw, list) or len(raw) != len(dims):
        raise doc.fail("H", f"need one payoff operator per player ({len(dims)})")
    ops = tuple(_hermitian(doc, _matrix(doc, h, "H", f"H{k + 1}", k), "H", f"H{k + 1}", k) for k, h in enumerate(raw))
    labels = block.get("labels", ())
    try:
        return AbstractGame(tuple(dims), ops, tuple(tuple(ls) for ls in labels), name=str(doc.data.get("name", "")))
    except DimensionError as e:
        raise doc.fail("H", str(e)) from None


_MANIPULATIVE_KEYS = ("initial_state", "strategy_basis", "payoffs")


def loads_game(text: str, source: str = "<string>") -> Game:
    doc = _Doc(text, source)
    has_abstract = "abstract" in doc.data
    has_manip = any(k in doc.data for k in _MANIPULATIVE_KEYS)
    if has_abstract == has_manip:
        raise GameFileError("need exactly one of an 'abstract' block or the manipulative fields", source, 1)
    return _abstract(doc) if has_abstract else _manipulative(doc)


def load_game(source: str | Path) -> Game:
    """Game from a file path or ``builtin:NAME``."""
    s = str(source)
    if s.startswith(BUILTIN_PREFIX):
        return builtin(s[len(BUILTIN_PREFIX):])
    try:
        text = Path(s).read_text(encoding="utf-8")
    except OSError as e:
        raise GameFileError(f"cannot read: {e.strerror}", s) from None
    return loads_game(text, s)


def _basis_doc(b: StrategyBasis) -> list:
    out = []
    for lab, op in zip(b.labels, b.operators):
        try:
            if np.array_equal(named_operator(lab), op):
                out.append(lab)
                continue
        except UnknownNameError:
            pass
        out.append({"label": lab, "matrix": encode_matrix(op)})
    return out


def game_to_dict(game: Game) -> dict[str, Any]:
    if isinstance(game, AbstractGame):
        return {"name": game.name, "abstract": {
            "dims": list(game.dims),
            "labels": [list(ls) for ls in game.basis_labels],
            "H": [encode_matrix(h) for h in game.payoff_ops]}}
    doc = {"name": game.name, "players": game.n_players, "object_dim": game.object_dim}
    if game.classical:
        doc["classical"] = True
    doc.update({
        "initial_state": encode_matrix(game.initial_state),
        "strategy_basis": [_basis_doc(b) for b in game.bases],
        "order": [k + 1 for k in game.order],
        "payoffs": [encode_matrix(p) for p in game.observables]})
    return doc


def _flat(x) -> bool:
    # a list of scalars or of [re, im] pairs stays on one line
    return isinstance(x, list) and all(
        not isinstance(v, (list, dict)) or (isinstance(v, list) and all(not isinstance(u, (list, dict)) for u in v))
        for v in x)


def dumps_json(obj, indent: int = 0) -> str:
    """JSON text with every matrix row on its own line."""
    pad, inner = " " * indent, " " * (indent + 1)
    if isinstance(obj, dict) and obj:
        items = [f"{inner}{json.dumps(str(k))}: {dumps_json(v, indent + 1).lstrip()}" for k, v in obj.items()]
        return pad + "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list) and obj and not _flat(obj):
        return pad + "[\n" + ",\n".join(dumps_json(v, indent + 1) for v in obj) + "\n" + pad + "]"
    return pad + json.dumps(obj)


def dumps_game(game: Game) -> str:
    return dumps_json(game_to_dict(game)) + "\n"


# -- profiles ---------------------------------------------------------------------

def profile_to_dict(p: StrategyProfile) -> dict[str, Any]:
    if isinstance(p, Product):
        return {"product": [encode_matrix(s) for s in p.states]}
    return {"joint": encode_matrix(p.state), "dims": list(p.dims)}


def _rebase(states, from_labels, game: AbstractGame, doc: _Doc):
    try:
        old = StrategyBasis.from_names(from_labels)
        targets = [StrategyBasis.from_names(ls) for ls in game.basis_labels]
    except UnknownNameError as e:
        raise doc.fail("basis", f"basis change needs named operators: {e}") from None
    return [transform_state(s, old, t) for s, t in zip(states, targets)]


def loads_profile(text: str, game: AbstractGame, source: str = "<string>") -> StrategyProfile:
    doc = _Doc(text, source)
    d = doc.data
    if ("product" in d) == ("joint" in d):
        raise GameFileError("need exactly one of 'product' or 'joint'", source, 1)
    restricted = bool(d.get("restricted", False))
    try:
        if "product" in d:
            raw = d["product"]
            if not isinstance(raw, list) or len(raw) != game.n_players:
                raise doc.fail("product", f"need one state per player ({game.n_players})")
            states = [_matrix(doc, m, "product", f"state {k + 1}", k) for k, m in enumerate(raw)]
            if "basis" in d:
                states = _rebase(states, d["basis"], game, doc)
            prof: StrategyProfile = Product(tuple(states), restricted=restricted)
        else:
            rho = _matrix(doc, d["joint"], "joint", "joint state")
            if "basis" in d:
                raise doc.fail("basis", "basis changes are only supported for product profiles")
            prof = Joint(rho, tuple(d.get("dims", game.dims)), restricted=restricted)
    except InvalidStateError as e:
        key = "product" if "product" in d else "joint"
        raise doc.fail(key, str(e), InvalidStateError) from None
    try:
        check_profile(game, prof)
    except DimensionError as e:
        raise doc.fail("product" if "product" in d else "joint", str(e), DimensionError) from None
    return prof


def load_profile(source: str | Path, game: AbstractGame) -> StrategyProfile:
    """Profile from a file, or the shorthands ``uniform`` and ``pure:L1,L2,...``."""
    s = str(source)
    if s == "uniform":
        return uniform_product(game.dims)
    if s.startswith("pure:"):
        return pure_product(game, s[5:].split(","))
    try:
        text = Path(s).read_text(encoding="utf-8")
    except OSError as e:
        raise GameFileError(f"cannot read: {e.strerror}", s) from None
    return loads_profile(text, game, s)
