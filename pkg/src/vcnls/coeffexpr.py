"""Tiny expression language for time-dependent coefficients.

Grammar (loosest to tightest binding)::

    expr    :=  term  (("+" | "-") term)*
    term    :=  unary (("*" | "/") unary)*
    unary   :=  "-" unary | power
    power   :=  atom ("^" integer)*
    atom    :=  number | "t" | name "(" expr ")" | "(" expr ")"

``^`` takes an integer exponent only (optionally sign-prefixed), so
evaluation stays total on the reals away from poles. Unary minus binds
looser than ``^``: ``-2^2`` is ``-(2^2) = -4``. Known functions:
exp, cos, sin, sqrt, abs.

Expressions are immutable values; parsing round-trips through
:func:`to_source` to a structurally identical tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import numerics
from .errors import EvalError

FUNCTIONS = {
    "exp": np.exp,
    "cos": np.cos,
    "sin": np.sin,
    "sqrt": np.sqrt,
    "abs": np.abs,
}


class ParseError(ValueError):
    """Syntax or name error, carrying the byte offset of the offender."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at byte {position})")
        self.position = position


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    """The single free variable t."""


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Pow, Call]

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?|([A-Za-z_]+)|([-+*/^()]))")


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        if not src[pos:].strip():
            break
        m = _TOKEN.match(src, pos)
        if m is None:
            at = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ParseError(f"unexpected character {src[at]!r}", at)
        if m.group(1) is not None:
            text = m.group(1) + (m.group(2) or "")
            tokens.append(("num", text, m.start(1)))
        elif m.group(3) is not None:
            tokens.append(("name", m.group(3), m.start(3)))
        else:
            tokens.append(("op", m.group(4), m.start(4)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        if not src or not src.strip():
            raise ParseError("empty expression", 0)
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}, found {text or 'end of input'!r}", pos)
        return self.advance()

    def parse(self) -> Expr:
        e = self.additive()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {text!r}", pos)
        return e

    def additive(self) -> Expr:
        e = self.multiplicative()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                e = BinOp(text, e, self.multiplicative())
            else:
                return e

    def multiplicative(self) -> Expr:
        e = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                e = BinOp(text, e, self.unary())
            else:
                return e

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        e = self.atom()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == "^":
                self.advance()
                e = Pow(e, self.exponent())
            else:
                return e

    def exponent(self) -> int:
        sign = 1
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            sign = -1
            kind, text, pos = self.peek()
        if kind != "num" or not re.fullmatch(r"\d+", text):
            raise ParseError(f"exponent of ^ must be an integer, found {text!r}", pos)
        self.advance()
        return sign * int(text)

    def atom(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            nkind, ntext, _ = self.peek()
            if nkind == "op" and ntext == "(":
                if text not in FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", pos)
                self.advance()
                arg = self.additive()
                self.expect_op(")")
                return Call(text, arg)
            if text == "t":
                return Var()
            raise ParseError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            e = self.additive()
            self.expect_op(")")
            return e
        raise ParseError(f"expected a value, found {text or 'end of input'!r}", pos)


def parse(src: str) -> Expr:
    """Parse source text into an expression tree."""
    return _Parser(src).parse()


_PREC = {"+": 10, "-": 10, "*": 20, "/": 20, "neg": 30, "^": 40, "atom": 100}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    if isinstance(e, Pow):
        return _PREC["^"]
    return _PREC["atom"]


def _fmt_num(v: float) -> str:
    return f"{v:.17g}"


def to_source(e: Expr) -> str:
    """Render the tree back to source; parse(to_source(e)) == e."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    if isinstance(e, Neg):
        inner = to_source(e.operand)
        if _prec(e.operand) < _PREC["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Pow):
        base = to_source(e.base)
        if _prec(e.base) <= _PREC["^"]:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, BinOp):
        lhs = to_source(e.left)
        rhs = to_source(e.right)
        if _prec(e.left) < _PREC[e.op]:
            lhs = f"({lhs})"
        # all four binary ops parse left-associative: a right child of equal
        # precedence needs parens to reparse into the same tree
        if _prec(e.right) <= _PREC[e.op]:
            rhs = f"({rhs})"
        # guard "a - -b" style adjacency
        if rhs.startswith("-"):
            rhs = f"({rhs})"
        return f"{lhs} {e.op} {rhs}"
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, t):
    """Evaluate at time t (scalar or ndarray) in IEEE double arithmetic."""
    if isinstance(e, Num):
        return e.value if np.isscalar(t) else np.full(np.shape(t), e.value)
    if isinstance(e, Var):
        return t
    if isinstance(e, Neg):
        return -evaluate(e.operand, t)
    if isinstance(e, Pow):
        base = evaluate(e.base, t)
        if e.exponent < 0 and np.any(np.asarray(base) == 0):
            raise EvalError(f"zero raised to negative power {e.exponent}")
        # integer exponent keeps negative bases legal under numpy
        with np.errstate(over="raise"):
            try:
                return base ** e.exponent
            except (FloatingPointError, OverflowError) as exc:
                raise EvalError("overflow in power") from exc
    if isinstance(e, Call):
        arg = evaluate(e.arg, t)
        if e.func == "sqrt" and np.any(np.asarray(arg) < 0):
            raise EvalError("sqrt of negative value")
        with np.errstate(over="raise"):
            try:
                return FUNCTIONS[e.func](arg)
            except (FloatingPointError, OverflowError) as exc:
                raise EvalError(f"overflow in {e.func}") from exc
    if isinstance(e, BinOp):
        lhs = evaluate(e.left, t)
        rhs = evaluate(e.right, t)
        if e.op == "+":
            return lhs + rhs
        if e.op == "-":
            return lhs - rhs
        if e.op == "*":
            return lhs * rhs
        if np.any(np.asarray(rhs) == 0):
            raise EvalError("division by zero")
        return lhs / rhs
    raise TypeError(f"not an expression node: {e!r}")


def as_callable(e: Expr):
    """Wrap an expression as a plain ``t -> value`` callable."""
    return lambda t: evaluate(e, t)


def definite_integral(e: Expr, t0: float, t1: float,
                      tol: float = numerics.SIMPSON_DEFAULT_TOL) -> float:
    """Adaptive-Simpson integral of the expression over [t0, t1]."""
    return numerics.adaptive_simpson(lambda s: float(evaluate(e, s)), t0, t1, tol)


@dataclass(frozen=True)
class CoefficientSet:
    """The six time-dependent coefficient functions of the coupled system."""

    a: Expr
    b: Expr
    c: Expr
    d: Expr
    g: Expr
    h: Expr

    def __post_init__(self):
        for name in ("a", "b", "c", "d", "g", "h"):
            try:
                evaluate(getattr(self, name), 0.0)
            except EvalError as exc:
                raise ValueError(f"coefficient {name} not evaluable at t=0: {exc}")

    @classmethod
    def from_strings(cls, a="0", b="0", c="0", d="0", g="0", h="0"):
        return cls(parse(a), parse(b), parse(c), parse(d), parse(g), parse(h))

    def callables(self):
        return {name: as_callable(getattr(self, name))
                for name in ("a", "b", "c", "d", "g", "h")}

    def sources(self):
        return {name: to_source(getattr(self, name))
                for name in ("a", "b", "c", "d", "g", "h")}
