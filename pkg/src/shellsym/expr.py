"""Closed-form expressions in two spatial variables x1, x2.

Immutable expression trees with exact symbolic differentiation and
IEEE-double evaluation (scalar or numpy-array arguments).  This module is
the single source of exact derivatives for the rest of the package.

Grammar (EBNF)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := atom ('^' atom)?
    atom   := number | 'x1' | 'x2' | 'pi' | func '(' expr ')' | '(' expr ')' | '-' atom
    func   := 'sin' | 'cos' | 'exp' | 'log'

Exponents must fold to a real constant; division a/b is stored as
a * b^-1.  There is no general simplification pass: only constant folding
and dropping of literal-zero summands / literal-one factors.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr", "Constant", "Variable", "Sum", "Product", "Power", "Negate",
    "Sin", "Cos", "Exp", "Log",
    "parse", "diff", "evaluate", "eval_at", "to_string",
    "make_sum", "make_product", "make_power", "make_negate",
    "ExprError", "ParseError", "DomainError",
    "ZERO", "ONE",
]


class ExprError(ValueError):
    """Base class for expression errors."""


class ParseError(ExprError):
    """Syntax or lexical error; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class DomainError(ExprError):
    """Evaluation outside the mathematical domain (log of nonpositive, ...)."""


@dataclass(frozen=True)
class Expr:
    """Base node; all concrete nodes are frozen dataclasses."""

    __slots__ = ()


@dataclass(frozen=True)
class Constant(Expr):
    value: float


@dataclass(frozen=True)
class Variable(Expr):
    index: int  # 1 or 2

    def __post_init__(self):
        if self.index not in (1, 2):
            raise ExprError(f"variable index must be 1 or 2, got {self.index}")


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple


@dataclass(frozen=True)
class Product(Expr):
    factors: tuple


@dataclass(frozen=True)
class Power(Expr):
    base: Expr
    exponent: float


@dataclass(frozen=True)
class Negate(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True)
class Log(Expr):
    arg: Expr


ZERO = Constant(0.0)
ONE = Constant(1.0)


def _is_const(e: Expr, value: float | None = None) -> bool:
    if not isinstance(e, Constant):
        return False
    return True if value is None else e.value == value


# ---------------------------------------------------------------------------
# Smart constructors: constant folding and literal-zero/one dropping only.
# ---------------------------------------------------------------------------

def make_sum(terms) -> Expr:
    kept = [t for t in terms if not _is_const(t, 0.0)]
    if not kept:
        return ZERO
    if all(isinstance(t, Constant) for t in kept):
        return Constant(float(sum(t.value for t in kept)))
    if len(kept) == 1:
        return kept[0]
    return Sum(tuple(kept))


def make_product(factors) -> Expr:
    if any(_is_const(f, 0.0) for f in factors):
        return ZERO
    kept = [f for f in factors if not _is_const(f, 1.0)]
    if not kept:
        return ONE
    if all(isinstance(f, Constant) for f in kept):
        out = 1.0
        for f in kept:
            out *= f.value
        return Constant(float(out))
    if len(kept) == 1:
        return kept[0]
    return Product(tuple(kept))


def make_power(base: Expr, exponent: float) -> Expr:
    exponent = float(exponent)
    if exponent == 0.0:
        return ONE
    if exponent == 1.0:
        return base
    if isinstance(base, Constant):
        v = base.value
        ok = v > 0.0 or (exponent.is_integer() and (v != 0.0 or exponent > 0.0))
        if ok:
            folded = v ** exponent
            if math.isfinite(folded):
                return Constant(float(folded))
    return Power(base, exponent)


def make_negate(arg: Expr) -> Expr:
    if isinstance(arg, Constant):
        return Constant(-arg.value)
    if isinstance(arg, Negate):
        return arg.arg
    return Negate(arg)


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

def diff(e: Expr, var: int) -> Expr:
    """Exact partial derivative of e with respect to x1 (var=1) or x2 (var=2)."""
    if var not in (1, 2):
        raise ExprError(f"differentiation variable must be 1 or 2, got {var}")
    match e:
        case Constant():
            return ZERO
        case Variable(index=i):
            return ONE if i == var else ZERO
        case Sum(terms=ts):
            return make_sum(diff(t, var) for t in ts)
        case Product(factors=fs):
            parts = []
            for i in range(len(fs)):
                parts.append(make_product(
                    tuple(fs[:i]) + (diff(fs[i], var),) + tuple(fs[i + 1:])))
            return make_sum(parts)
        case Power(base=b, exponent=r):
            return make_product((Constant(r), make_power(b, r - 1.0), diff(b, var)))
        case Negate(arg=a):
            return make_negate(diff(a, var))
        case Sin(arg=a):
            return make_product((Cos(a), diff(a, var)))
        case Cos(arg=a):
            return make_negate(make_product((Sin(a), diff(a, var))))
        case Exp(arg=a):
            return make_product((Exp(a), diff(a, var)))
        case Log(arg=a):
            return make_product((diff(a, var), make_power(a, -1.0)))
    raise ExprError(f"cannot differentiate node {type(e).__name__}")


def diff_n(e: Expr, *vars_: int) -> Expr:
    """Iterated partial derivative, e.g. diff_n(f, 1, 1, 2) = f_,112."""
    for v in vars_:
        e = diff(e, v)
    return e


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _ev(e: Expr, x1, x2):
    match e:
        case Constant(value=v):
            return np.full(np.broadcast(x1, x2).shape, v)
        case Variable(index=i):
            return (x1 if i == 1 else x2) + np.zeros(np.broadcast(x1, x2).shape)
        case Sum(terms=ts):
            acc = _ev(ts[0], x1, x2)
            for t in ts[1:]:
                acc = acc + _ev(t, x1, x2)
            return acc
        case Product(factors=fs):
            acc = _ev(fs[0], x1, x2)
            for f in fs[1:]:
                acc = acc * _ev(f, x1, x2)
            return acc
        case Power(base=b, exponent=r):
            base = _ev(b, x1, x2)
            if float(r).is_integer():
                if r < 0 and np.any(base == 0.0):
                    raise DomainError("zero base with negative exponent")
            else:
                if np.any(base <= 0.0):
                    raise DomainError(
                        "non-integer power requires a strictly positive base")
            return np.power(base, r)
        case Negate(arg=a):
            return -_ev(a, x1, x2)
        case Sin(arg=a):
            return np.sin(_ev(a, x1, x2))
        case Cos(arg=a):
            return np.cos(_ev(a, x1, x2))
        case Exp(arg=a):
            return np.exp(_ev(a, x1, x2))
        case Log(arg=a):
            arg = _ev(a, x1, x2)
            if np.any(arg <= 0.0):
                raise DomainError("log of a nonpositive argument")
            return np.log(arg)
    raise ExprError(f"cannot evaluate node {type(e).__name__}")


def evaluate(e: Expr, x1, x2):
    """Evaluate e at x1, x2 (scalars or broadcastable numpy arrays).

    Returns a float for scalar input, an ndarray otherwise.
    """
    scalar = np.isscalar(x1) and np.isscalar(x2)
    out = _ev(e, np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    return float(out) if scalar else out


def eval_at(e: Expr, x) -> float:
    """Evaluate e at a point x = (x1, x2)."""
    return evaluate(e, x[0], x[1])


# ---------------------------------------------------------------------------
# Printing (round-trips through parse up to pointwise-equal evaluation)
# ---------------------------------------------------------------------------

_PREC_SUM, _PREC_PROD, _PREC_POW, _PREC_ATOM = 0, 1, 2, 3


def _fmt_number(v: float) -> str:
    if v == math.floor(v) and abs(v) < 1e16:
        return repr(float(v))
    return repr(v)


def _to_str(e: Expr, prec: int) -> str:
    match e:
        case Constant(value=v):
            s = _fmt_number(abs(v))
            if v < 0:
                return f"-{s}" if prec <= _PREC_SUM else f"(-{s})"
            return s
        case Variable(index=i):
            return f"x{i}"
        case Sum(terms=ts):
            parts = [_to_str(ts[0], _PREC_SUM)]
            for t in ts[1:]:
                if isinstance(t, Negate):
                    parts.append(f" - {_to_str(t.arg, _PREC_PROD)}")
                elif isinstance(t, Constant) and t.value < 0:
                    parts.append(f" - {_fmt_number(abs(t.value))}")
                else:
                    parts.append(f" + {_to_str(t, _PREC_PROD)}")
            s = "".join(parts)
            return s if prec <= _PREC_SUM else f"({s})"
        case Product(factors=fs):
            s = "*".join(_to_str(f, _PREC_PROD) for f in fs)
            return s if prec <= _PREC_PROD else f"({s})"
        case Power(base=b, exponent=r):
            rs = _fmt_number(r) if r >= 0 else f"(-{_fmt_number(abs(r))})"
            s = f"{_to_str(b, _PREC_ATOM)}^{rs}"
            return s if prec <= _PREC_POW else f"({s})"
        case Negate(arg=a):
            s = f"-{_to_str(a, _PREC_ATOM)}"
            return s if prec <= _PREC_SUM else f"({s})"
        case Sin(arg=a):
            return f"sin({_to_str(a, _PREC_SUM)})"
        case Cos(arg=a):
            return f"cos({_to_str(a, _PREC_SUM)})"
        case Exp(arg=a):
            return f"exp({_to_str(a, _PREC_SUM)})"
        case Log(arg=a):
            return f"log({_to_str(a, _PREC_SUM)})"
    raise ExprError(f"cannot print node {type(e).__name__}")


def to_string(e: Expr) -> str:
    return _to_str(e, _PREC_SUM)


# ---------------------------------------------------------------------------
# Parser: hand-written recursive descent over a small token stream
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))")

_FUNCS = {"sin": Sin, "cos": Cos, "exp": Exp, "log": Log}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tok = None      # (kind, value, offset)
        self._advance()

    def _advance(self):
        m = _TOKEN_RE.match(self.text, self.pos)
        if m is None:
            stripped = self.text[self.pos:].lstrip()
            if not stripped:
                self.tok = ("end", "", len(self.text))
                self.pos = len(self.text)
                return
            off = len(self.text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", off)
        kind = m.lastgroup
        self.tok = (kind, m.group(kind), m.start(kind))
        self.pos = m.end()

    def _expect_op(self, op: str):
        kind, val, off = self.tok
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", off)
        self._advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, off = self.tok
        if kind != "end":
            raise ParseError(f"unexpected trailing input {val!r}", off)
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.tok[1]
            self._advance()
            t = self.term()
            terms.append(make_negate(t) if op == "-" else t)
        return make_sum(terms)

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.tok[1]
            off = self.tok[2]
            self._advance()
            f = self.factor()
            if op == "/":
                if _is_const(f, 0.0):
                    raise ParseError("division by literal zero", off)
                f = make_power(f, -1.0)
            factors.append(f)
        return make_product(factors)

    def factor(self) -> Expr:
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            off = self.tok[2]
            self._advance()
            exponent = self.atom()
            if not isinstance(exponent, Constant):
                raise ParseError("exponent must fold to a constant", off)
            return make_power(base, exponent.value)
        return base

    def atom(self) -> Expr:
        kind, val, off = self.tok
        if kind == "num":
            self._advance()
            return Constant(float(val))
        if kind == "ident":
            self._advance()
            if val == "x1":
                return Variable(1)
            if val == "x2":
                return Variable(2)
            if val == "pi":
                return Constant(math.pi)
            if val in _FUNCS:
                if not (self.tok[0] == "op" and self.tok[1] == "("):
                    raise ParseError(
                        f"function {val!r} takes exactly one parenthesized argument",
                        self.tok[2])
                self._advance()
                arg = self.expr()
                self._expect_op(")")
                return _FUNCS[val](arg)
            raise ParseError(f"unknown identifier {val!r}", off)
        if kind == "op" and val == "(":
            self._advance()
            e = self.expr()
            self._expect_op(")")
            return e
        if kind == "op" and val == "-":
            self._advance()
            return make_negate(self.atom())
        raise ParseError(f"expected a number, name or '('", off)


def parse(text: str) -> Expr:
    """Parse an expression string into its AST."""
    return _Parser(text).parse()
