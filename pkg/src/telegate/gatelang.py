"""The gate-expression language: concrete syntax for small unitaries.

Grammar (also in ``docs/gatelang-grammar.txt``)::

    expr     := term ('x' term)*          -- tensor product, loosest
    term     := factor ('*' factor)*      -- matrix product
    factor   := atom ["'"]                -- adjoint postfix
    atom     := NAME | NAME '(' NUMBER ')' | MATRIX | '(' expr ')'
    MATRIX   := '[' row (',' row)* ']'
    row      := '[' NUMBER (',' NUMBER)* ']'

Named gates are I, X, Y, Z, H, S, T; parameterized gates are RX, RY, RZ
and PHASE with a radian argument (scientific notation accepted).  Matrix
literals take complex entries written without internal spaces: ``1.0``,
``0.5i``, ``1.0-0.5i``.  Gate names are uppercase; the lowercase ``x``
is the tensor operator.

``A*B`` is the matrix product in written order -- A times B, so B is
applied to a state first.  ``x`` binds looser than ``*``.

All errors carry the byte offset of the offending input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from . import qsim
from .qsim import UnitaryMatrix


class GateSyntaxError(ValueError):
    """Lexical or grammatical error, with the byte offset where it occurred."""

    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


class GateEvalError(ValueError):
    """Evaluation-time rejection (non-unitary literal, dimension mismatch),
    with the byte offset of the subexpression that failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


# --- abstract syntax --------------------------------------------------------


@dataclass(frozen=True)
class NamedGate:
    name: str
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ParamGate:
    name: str
    arg: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MatrixLiteral:
    rows: tuple[tuple[complex, ...], ...]
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Product:
    left: "GateExpr"
    right: "GateExpr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Tensor:
    left: "GateExpr"
    right: "GateExpr"
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Adjoint:
    inner: "GateExpr"
    pos: int = field(default=0, compare=False)


GateExpr = NamedGate | ParamGate | MatrixLiteral | Product | Tensor | Adjoint

NAMED_GATES = ("I", "X", "Y", "Z", "H", "S", "T")
PARAM_GATES = ("RX", "RY", "RZ", "PHASE")


# --- lexer -------------------------------------------------------------------

_FLOAT = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_NUMBER_RE = re.compile(rf"([+-]?{_FLOAT})(?:([+-]{_FLOAT})i|(i))?")
_NAME_RE = re.compile(r"[A-Z]+")
_WS_RE = re.compile(r"[ \t\r\n]+")
_SYMBOLS = "*'()[],"


@dataclass(frozen=True)
class _Token:
    kind: str  # NAME, NUMBER, TENSOR, or one of the symbol characters
    text: str
    pos: int
    value: complex = 0j
    is_real: bool = False


def _lex(text: str) -> list[_Token]:
    toks: list[_Token] = []
    i = 0
    while i < len(text):
        ws = _WS_RE.match(text, i)
        if ws:
            i = ws.end()
            continue
        c = text[i]
        if c in _SYMBOLS:
            toks.append(_Token(c, c, i))
            i += 1
            continue
        if c == "x":
            toks.append(_Token("TENSOR", c, i))
            i += 1
            continue
        m = _NAME_RE.match(text, i)
        if m:
            toks.append(_Token("NAME", m.group(), i))
            i = m.end()
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            if m.group(2) is not None:
                value = complex(float(m.group(1)), float(m.group(2)))
                real = False
            elif m.group(3) is not None:
                value = complex(0.0, float(m.group(1)))
                real = False
            else:
                value = complex(float(m.group(1)), 0.0)
                real = True
            toks.append(_Token("NUMBER", m.group(), i, value, real))
            i = m.end()
            continue
        raise GateSyntaxError(f"unexpected character {c!r} at offset {i}", i)
    return toks


# --- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _lex(text)
        self.i = 0

    def peek(self) -> _Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, expected: str | None = None) -> _Token:
        tok = self.peek()
        if tok is None:
            raise GateSyntaxError(
                f"unexpected end of input at offset {len(self.text)}", len(self.text)
            )
        if expected is not None and tok.kind != expected:
            raise GateSyntaxError(
                f"expected {expected!r} but got {tok.text!r} at offset {tok.pos}", tok.pos
            )
        self.i += 1
        return tok

    def expr(self) -> GateExpr:
        node = self.term()
        while (tok := self.peek()) is not None and tok.kind == "TENSOR":
            self.next()
            node = Tensor(node, self.term(), node.pos)
        return node

    def term(self) -> GateExpr:
        node = self.factor()
        while (tok := self.peek()) is not None and tok.kind == "*":
            self.next()
            node = Product(node, self.factor(), node.pos)
        return node

    def factor(self) -> GateExpr:
        node = self.atom()
        if (tok := self.peek()) is not None and tok.kind == "'":
            self.next()
            node = Adjoint(node, node.pos)
        return node

    def atom(self) -> GateExpr:
        tok = self.next()
        if tok.kind == "NAME":
            return self.gate(tok)
        if tok.kind == "(":
            node = self.expr()
            self.next(")")
            return node
        if tok.kind == "[":
            return self.matrix(tok)
        raise GateSyntaxError(
            f"expected a gate, matrix or '(' but got {tok.text!r} at offset {tok.pos}", tok.pos
        )

    def gate(self, tok: _Token) -> GateExpr:
        followed_by_paren = (nxt := self.peek()) is not None and nxt.kind == "("
        if tok.text in PARAM_GATES:
            if not followed_by_paren:
                raise GateSyntaxError(
                    f"gate {tok.text} requires a parameter at offset {tok.pos}", tok.pos
                )
            self.next("(")
            num = self.next("NUMBER")
            if not num.is_real:
                raise GateSyntaxError(
                    f"gate parameter must be real at offset {num.pos}", num.pos
                )
            self.next(")")
            return ParamGate(tok.text, num.value.real, tok.pos)
        if tok.text in NAMED_GATES:
            if followed_by_paren:
                raise GateSyntaxError(
                    f"gate {tok.text} takes no parameter at offset {tok.pos}", tok.pos
                )
            return NamedGate(tok.text, tok.pos)
        raise GateSyntaxError(f"unknown gate name {tok.text!r} at offset {tok.pos}", tok.pos)

    def matrix(self, opening: _Token) -> MatrixLiteral:
        rows = [self.row()]
        while (tok := self.peek()) is not None and tok.kind == ",":
            self.next()
            rows.append(self.row())
        self.next("]")
        if any(len(r) != len(rows[0]) for r in rows):
            raise GateSyntaxError(
                f"matrix rows must have equal length at offset {opening.pos}", opening.pos
            )
        return MatrixLiteral(tuple(rows), opening.pos)

    def row(self) -> tuple[complex, ...]:
        self.next("[")
        entries = [self.next("NUMBER").value]
        while (tok := self.peek()) is not None and tok.kind == ",":
            self.next()
            entries.append(self.next("NUMBER").value)
        self.next("]")
        return tuple(entries)


def parse(text: str) -> GateExpr:
    """Parse a gate expression; raises :class:`GateSyntaxError` with a
    byte offset on any lexical or grammatical problem."""
    p = _Parser(text)
    node = p.expr()
    if (tok := p.peek()) is not None:
        raise GateSyntaxError(
            f"unexpected token {tok.text!r} at offset {tok.pos}", tok.pos
        )
    return node


# --- evaluation ---------------------------------------------------------------

_NAMED_MATRICES = {
    "I": qsim.I2,
    "X": qsim.X,
    "Y": qsim.Y,
    "Z": qsim.Z,
    "H": qsim.H,
    "S": qsim.S,
    "T": qsim.T,
}
_PARAM_BUILDERS = {"RX": qsim.rx, "RY": qsim.ry, "RZ": qsim.rz, "PHASE": qsim.phase}


def evaluate(e: GateExpr) -> UnitaryMatrix:
    """Evaluate to a unitary, per the package gate conventions.

    Non-unitary matrix literals and operand dimension mismatches raise
    :class:`GateEvalError` carrying the subexpression's offset.
    """
    if isinstance(e, NamedGate):
        return _NAMED_MATRICES[e.name]
    if isinstance(e, ParamGate):
        return _PARAM_BUILDERS[e.name](e.arg)
    if isinstance(e, MatrixLiteral):
        try:
            return UnitaryMatrix(np.array(e.rows, dtype=np.complex128))
        except ValueError as exc:
            raise GateEvalError(f"{exc} at offset {e.pos}", e.pos) from exc
    if isinstance(e, Adjoint):
        return evaluate(e.inner).adjoint()
    if isinstance(e, Product):
        a, b = evaluate(e.left), evaluate(e.right)
        if a.dim != b.dim:
            raise GateEvalError(
                f"dimension mismatch in product: {a.dim} vs {b.dim} at offset {e.pos}", e.pos
            )
        return UnitaryMatrix(a.matrix @ b.matrix)
    if isinstance(e, Tensor):
        a, b = evaluate(e.left), evaluate(e.right)
        try:
            return qsim.kron(a, b)
        except ValueError as exc:
            raise GateEvalError(f"{exc} at offset {e.pos}", e.pos) from exc
    raise TypeError(f"unknown expression node {e!r}")


# --- pretty printing -----------------------------------------------------------


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _fmt_complex(z: complex) -> str:
    if z.imag == 0:
        return _fmt_float(z.real)
    if z.real == 0:
        return _fmt_float(z.imag) + "i"
    sign = "+" if z.imag > 0 else "-"
    return f"{_fmt_float(z.real)}{sign}{_fmt_float(abs(z.imag))}i"


def format_matrix(u: UnitaryMatrix) -> str:
    """Render a unitary as a matrix literal (floats round-trip exactly)."""
    rows = ",".join(
        "[" + ",".join(_fmt_complex(complex(z)) for z in row) + "]" for row in u.matrix
    )
    return f"[{rows}]"


_PREC = {Tensor: 1, Product: 2, Adjoint: 3}


def format_expr(e: GateExpr, _min_prec: int = 1) -> str:
    """Pretty-print with minimal parentheses; ``parse(format_expr(e))``
    returns a tree equal to ``e``."""
    if isinstance(e, NamedGate):
        return e.name
    if isinstance(e, ParamGate):
        return f"{e.name}({_fmt_float(e.arg)})"
    if isinstance(e, MatrixLiteral):
        rows = ",".join(
            "[" + ",".join(_fmt_complex(z) for z in row) + "]" for row in e.rows
        )
        return f"[{rows}]"
    if isinstance(e, Tensor):
        s = f"{format_expr(e.left, 1)} x {format_expr(e.right, 2)}"
    elif isinstance(e, Product):
        s = f"{format_expr(e.left, 2)} * {format_expr(e.right, 3)}"
    elif isinstance(e, Adjoint):
        s = f"{format_expr(e.inner, 4)}'"
    else:
        raise TypeError(f"unknown expression node {e!r}")
    if _PREC[type(e)] < _min_prec:
        return f"({s})"
    return s
