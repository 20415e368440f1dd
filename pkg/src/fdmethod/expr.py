"""Scalar expressions in ``x`` and ``u``: parsing, printing and evaluation.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?              # right associative
    atom   := NUMBER | 'x' | 'u' | 'pi' | FUNC '(' expr ')' | '(' expr ')'

``**`` is accepted as a synonym for ``^``.  Evaluation is vectorised over
numpy arrays.  :func:`jet_eval` returns the truncated Taylor expansion in
``u`` which is what the Adomian machinery consumes.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .jet import Jet, broadcast_coeffs

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt", "abs")
VARIABLES = ("x", "u")
CONSTANTS = {"pi": math.pi}


class ParseError(ValueError):
    """Syntax error; ``column`` is 1-based."""

    def __init__(self, message, column, source=""):
        self.column = column
        self.source = source
        super().__init__(f"{message} at column {column}")


class UnknownIdentifierError(ParseError):
    pass


class ExprDomainError(ArithmeticError):
    """Evaluation left the real domain of a subexpression."""

    def __init__(self, message, subexpr, x=None):
        self.subexpr = subexpr
        self.x = x
        where = "" if x is None else f" at x={x!r}"
        super().__init__(f"{message} in '{subexpr}'{where}")


# AST ------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Sub:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Mul:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Div:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call]

_BINARY = {Add: "+", Sub: "-", Mul: "*", Div: "/"}
_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


# tokenizer / parser ---------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()])"
    r")"
)


def _tokenize(source):
    tokens = []
    pos = 0
    n = len(source)
    while True:
        while pos < n and source[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {source[pos]!r}", pos + 1, source)
        kind = m.lastgroup
        text = m.group(kind)
        col = m.start(kind) + 1
        if text == "**":
            text = "^"
        tokens.append((kind, text, col))
        pos = m.end()
    tokens.append(("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, got, col = self.take()
        if got != text:
            what = "end of input" if kind == "end" else repr(got)
            raise ParseError(f"expected {text!r}, found {what}", col, self.source)

    def error(self, message):
        raise ParseError(message, self.peek()[2], self.source)

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        node = self.expr()
        kind, text, col = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", col, self.source)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            return Pow(base, self.unary())
        return base

    def atom(self):
        kind, text, col = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "id":
            if text in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ParseError(f"function {text!r} requires parentheses", self.peek()[2], self.source)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            if text in VARIABLES:
                return Var(text)
            if text in CONSTANTS:
                return Const(CONSTANTS[text])
            raise UnknownIdentifierError(f"unknown identifier {text!r}", col, self.source)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", col, self.source)
        raise ParseError(f"unexpected {text!r}", col, self.source)


def unparse(node) -> str:
    """Print ``node`` with the minimum parentheses needed to reparse it."""
    if isinstance(node, Const):
        v = node.value
        return repr(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({unparse(node.arg)})"
    if isinstance(node, Neg):
        inner = unparse(node.arg)
        if _PREC.get(type(node.arg), 5) < _PREC[Neg]:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Pow):
        base = unparse(node.base)
        if _PREC.get(type(node.base), 5) <= _PREC[Pow]:
            base = f"({base})"
        exp = unparse(node.exponent)
        if not isinstance(node.exponent, (Const, Var, Call)):
            exp = f"({exp})"
        return f"{base}^{exp}"
    prec = _PREC[type(node)]
    left = unparse(node.left)
    if _PREC.get(type(node.left), 5) < prec:
        left = f"({left})"
    right = unparse(node.right)
    if _PREC.get(type(node.right), 5) <= prec:
        right = f"({right})"
    return f"{left} {_BINARY[type(node)]} {right}"


@dataclass(frozen=True)
class Expression:
    """A parsed formula.  Equality is structural (on the AST)."""

    root: Node

    @property
    def variables(self):
        return frozenset(_variables(self.root))

    def depends_on(self, name):
        return name in self.variables

    def __str__(self):
        return unparse(self.root)

    def __call__(self, x, u=0.0):
        return evaluate(self, x, u)


def parse(source: str) -> Expression:
    """Parse ``source``; raises :class:`ParseError` with a 1-based column."""
    return Expression(_Parser(source).parse())


def _variables(node):
    if isinstance(node, Var):
        yield node.name
    elif isinstance(node, Const):
        return
    else:
        for child in _children(node):
            yield from _variables(child)


def _children(node):
    if isinstance(node, (Neg, Call)):
        return (node.arg,)
    if isinstance(node, Pow):
        return (node.base, node.exponent)
    if isinstance(node, (Add, Sub, Mul, Div)):
        return (node.left, node.right)
    return ()


# evaluation -----------------------------------------------------------------


def _where(mask, x):
    if not np.any(mask):
        return None
    shape = np.broadcast_shapes(np.shape(mask), np.shape(x))
    mask = np.broadcast_to(mask, shape)
    xb = np.broadcast_to(x, shape)
    return float(xb[np.unravel_index(np.argmax(mask), shape)])


@functools.lru_cache(maxsize=1024)
def _const_value(node):
    """Value of a variable-free subtree, else None."""
    if set(_variables(node)):
        return None
    with np.errstate(all="ignore"):
        v = _jet(node, np.float64(0.0), Jet.constant(0.0, 0), 0).coeffs[0]
    return float(v)


def _jet(node, x, u, K):
    if isinstance(node, Const):
        return Jet.constant(node.value, K)
    if isinstance(node, Var):
        return u if node.name == "u" else Jet.constant(x, K)
    if isinstance(node, Neg):
        return -_jet(node.arg, x, u, K)
    if isinstance(node, Add):
        return _jet(node.left, x, u, K) + _jet(node.right, x, u, K)
    if isinstance(node, Sub):
        return _jet(node.left, x, u, K) - _jet(node.right, x, u, K)
    if isinstance(node, Mul):
        return _jet(node.left, x, u, K) * _jet(node.right, x, u, K)
    if isinstance(node, Div):
        num = _jet(node.left, x, u, K)
        den = _jet(node.right, x, u, K)
        bad = den.coeffs[0] == 0
        if np.any(bad):
            raise ExprDomainError("division by zero", unparse(node), _where(bad, x))
        return num / den
    if isinstance(node, Pow):
        base = _jet(node.base, x, u, K)
        p = _const_value(node.exponent)
        if p is not None and float(p).is_integer():
            p = int(p)
            if p < 0:
                bad = base.coeffs[0] == 0
                if np.any(bad):
                    raise ExprDomainError("division by zero", unparse(node), _where(bad, x))
            return base.powi(p)
        bad = ~(base.coeffs[0] > 0)
        if np.any(bad):
            raise ExprDomainError("non-integer power of a non-positive base", unparse(node), _where(bad, x))
        exponent = p if p is not None else _jet(node.exponent, x, u, K)
        return base.pow(exponent)
    if isinstance(node, Call):
        a = _jet(node.arg, x, u, K)
        f = node.func
        if f == "sin":
            return a.sin()
        if f == "cos":
            return a.cos()
        if f == "exp":
            return a.exp()
        if f == "ln":
            bad = ~(a.coeffs[0] > 0)
            if np.any(bad):
                raise ExprDomainError("logarithm of a non-positive value", unparse(node), _where(bad, x))
            return a.log()
        if f in ("sqrt", "abs"):
            a0 = a.coeffs[0]
            flat = np.all(a.coeffs[1:] == 0, axis=0) if K > 0 else np.ones(a0.shape, bool)
            if f == "sqrt":
                bad = (a0 < 0) | ((a0 == 0) & ~flat)
                msg = "square root of a negative value"
            else:
                bad = (a0 == 0) & ~flat
                msg = "abs is not differentiable at 0"
            if np.any(bad):
                raise ExprDomainError(msg, unparse(node), _where(bad, x))
            if f == "abs":
                return a.abs()
            r = a.sqrt()
            if K > 0 and np.any(a0 == 0):
                r = Jet(np.where(a0 == 0, 0.0, r.coeffs))
            return r
    raise TypeError(f"not an expression node: {node!r}")


def jet_eval(e: Expression, x, u0, order: int) -> Jet:
    """Taylor jet of ``e`` in ``u`` about ``u0``: coeffs[p] = d^p e/du^p / p!.

    ``x`` and ``u0`` may be arrays (broadcast together).
    """
    if order < 0:
        raise ValueError("jet order must be >= 0")
    x = np.asarray(x, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    with np.errstate(all="ignore"):
        j = _jet(e.root, x, Jet.variable(u0, order), order)
    shape = (order + 1,) + np.broadcast_shapes(x.shape, u0.shape)
    return Jet(broadcast_coeffs(j.coeffs, shape[1:]).copy())


def evaluate(e: Expression, x, u=0.0):
    """IEEE double value of ``e`` at (x, u).  Returns a float for scalar input."""
    out = jet_eval(e, x, u, 0).coeffs[0]
    return float(out) if out.ndim == 0 else out


# structural queries ---------------------------------------------------------


def polynomial_degree(e: Expression, var: str = "u"):
    """Degree in ``var`` if ``e`` is structurally polynomial in it, else None."""
    return _degree(e.root, var)


def _degree(node, var):
    if isinstance(node, Const):
        return 0
    if isinstance(node, Var):
        return 1 if node.name == var else 0
    if isinstance(node, Neg):
        return _degree(node.arg, var)
    if isinstance(node, (Add, Sub)):
        a, b = _degree(node.left, var), _degree(node.right, var)
        return None if a is None or b is None else max(a, b)
    if isinstance(node, Mul):
        a, b = _degree(node.left, var), _degree(node.right, var)
        return None if a is None or b is None else a + b
    if isinstance(node, Div):
        a, b = _degree(node.left, var), _degree(node.right, var)
        return a if b == 0 else None
    if isinstance(node, Pow):
        d = _degree(node.base, var)
        if d == 0 and _degree(node.exponent, var) == 0:
            return 0
        p = _const_value(node.exponent)
        if d is None or p is None or not float(p).is_integer() or p < 0:
            return None
        return d * int(p)
    if isinstance(node, Call):
        return 0 if _degree(node.arg, var) == 0 else None
    raise TypeError(f"not an expression node: {node!r}")
