"""Initial data: the five library cases, incoming velocities, custom expressions.

Every profile is a closed form evaluated on arrays of radii. Derivatives are
written out by hand so the initial data carry no discretisation error.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import CaseId, ConfigError

RadialFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CaseSpec:
    case_id: CaseId
    u0: RadialFunction
    u1: RadialFunction
    du0: RadialFunction | None = None
    # how to rebuild the case in another process; None for ad-hoc callables
    origin: tuple | None = None

    def __reduce__(self):
        if self.origin is None:
            raise TypeError("ad-hoc CaseSpec cannot be sent to worker processes")
        return _rebuild, self.origin


def _rebuild(kind, *args) -> "CaseSpec":
    if kind == "library":
        return make_case(*args)
    return custom_case(*args)


def _zero(r):
    return np.zeros_like(np.asarray(r, dtype=float))


def gaussian(amp: float = 4.0) -> tuple[RadialFunction, RadialFunction]:
    def u0(r):
        return amp * np.exp(-np.square(r))

    def du0(r):
        return -2 * amp * r * np.exp(-np.square(r))

    return u0, du0


def ring(amp: float = 10.0) -> tuple[RadialFunction, RadialFunction]:
    def u0(r):
        return amp * np.square(r) * np.exp(-np.square(r))

    def du0(r):
        r = np.asarray(r, dtype=float)
        return amp * (2 * r - 2 * r**3) * np.exp(-np.square(r))

    return u0, du0


def osc_gaussian(amp: float = 5.0, freq: float = 3.0) -> tuple[RadialFunction, RadialFunction]:
    def u0(r):
        return amp * np.exp(-np.square(r)) * np.sin(freq * r)

    def du0(r):
        r = np.asarray(r, dtype=float)
        return amp * np.exp(-np.square(r)) * (freq * np.cos(freq * r) - 2 * r * np.sin(freq * r))

    return u0, du0


def incoming_velocity(u0: RadialFunction, du0: RadialFunction, d: int) -> RadialFunction:
    """Velocity ``u0' + (d-2)/r * u0`` that makes the linear wave move inward.

    At r = 0 the L'Hopital limit ``(d-1) * u0'(0)`` is used; this needs
    ``u0(0) = 0`` whenever d > 2.
    """
    origin = float(u0(np.zeros(1))[0])
    if d > 2 and origin != 0.0:
        raise ConfigError(f"incoming data need u0(0) = 0, got u0(0) = {origin:g}")
    c = d - 2
    limit = (d - 1) * float(du0(np.zeros(1))[0])

    def u1(r):
        r = np.asarray(r, dtype=float)
        out = np.asarray(du0(r), dtype=float).copy()
        pos = r > 0
        out[pos] += c * np.asarray(u0(r[pos])) / r[pos]
        out[~pos] = limit
        return out

    return u1


_PROFILES = {
    CaseId.GAUSSIAN: (gaussian, False),
    CaseId.RING: (ring, False),
    CaseId.INCOMING_RING: (ring, True),
    CaseId.OSC_GAUSSIAN: (osc_gaussian, False),
    CaseId.INCOMING_OSC_GAUSSIAN: (osc_gaussian, True),
}


def make_case(case_id: CaseId | str | int, d: int) -> CaseSpec:
    if isinstance(case_id, int):
        case_id = CaseId.from_number(case_id)
    try:
        case_id = CaseId(case_id)
        builder, incoming = _PROFILES[case_id]
    except (ValueError, KeyError):
        raise ConfigError(f"unknown library case {case_id!r}") from None
    if d not in (3, 5):
        raise ConfigError(f"library cases are defined for d in {{3, 5}}, got {d}")
    u0, du0 = builder()
    u1 = incoming_velocity(u0, du0, d) if incoming else _zero
    return CaseSpec(case_id, u0, u1, du0, origin=("library", case_id, d))


def custom_case(u0_text: str, u1_text: str | None = None) -> CaseSpec:
    u0 = parse_expression(u0_text)
    u1 = parse_expression(u1_text) if u1_text else _zero
    return CaseSpec(CaseId.CUSTOM, u0, u1, origin=("custom", u0_text, u1_text))


def case_from_config(cfg) -> CaseSpec:
    if cfg.case_id is CaseId.CUSTOM:
        return custom_case(cfg.u0_expr, cfg.u1_expr)
    return make_case(cfg.case_id, cfg.d)


# -- custom expressions ------------------------------------------------------
# Grammar (EBNF) is documented in docs/expressions.md. Parsing goes through the
# stdlib `ast` module; only the whitelisted node types below are evaluated.

_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


def _check(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body)
    elif isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ConfigError(f"operator {type(node.op).__name__} not allowed")
        _check(node.left)
        _check(node.right)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ConfigError("only unary +/- allowed")
        _check(node.operand)
    elif isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id in _FUNCS) or node.keywords:
            raise ConfigError(f"unknown function in expression: {ast.dump(node.func)}")
        if len(node.args) != 1:
            raise ConfigError(f"{node.func.id} takes one argument")
        _check(node.args[0])
    elif isinstance(node, ast.Name):
        if node.id != "r":
            raise ConfigError(f"unknown variable {node.id!r}; only 'r' is allowed")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ConfigError(f"bad constant {node.value!r}")
    else:
        raise ConfigError(f"unsupported syntax: {type(node).__name__}")


def _eval(node: ast.AST, r: np.ndarray):
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, r), _eval(node.right, r))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, r)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Call):
        return _FUNCS[node.func.id](_eval(node.args[0], r))
    if isinstance(node, ast.Name):
        return r
    return float(node.value)


def parse_expression(text: str) -> RadialFunction:
    """Compile an arithmetic expression in ``r`` to a vectorised function."""
    if not text or not text.strip():
        raise ConfigError("empty expression")
    try:
        # '^' is exponentiation; Python's '**' has the matching precedence
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {text!r}: {exc.msg}") from None
    _check(tree)
    body = tree.body

    def f(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.broadcast_to(_eval(body, r), r.shape).astype(float)

    f.__doc__ = text
    return f
