"""Expression trees for constraint and objective strings.

Grammar (whitespace insignificant)::

    relation := sum [ ("<=" | ">=" | "<" | ">" | "=" | "==") sum ]
    sum      := term { ("+" | "-") term }
    term     := unary { "*" unary }
    unary    := ("-" | "+") unary | power
    power    := atom [ ("^" | "**") INTEGER ]
    atom     := NUMBER | VARIABLE | "exp" "(" sum ")" | "(" sum ")"

Variables are ``x1, x2, ...``.  There is no division, so every tree is
finite on finite inputs (``exp`` may overflow to ``inf``, which callers
treat as an infeasible value).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .poly import Polynomial


class ParseError(ValueError):
    """Malformed expression; carries the character offset of the problem."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


class NotPolynomialError(ValueError):
    """The expression contains a non-polynomial primitive such as exp."""


# -- nodes ------------------------------------------------------------------

class Expr:
    def evaluate(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def to_polynomial(self, n: int) -> Polynomial:
        raise NotImplementedError

    def max_index(self) -> int:
        """Largest zero-based variable index used, or -1."""
        raise NotImplementedError

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = x[None, :] if single else x
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.broadcast_to(self.evaluate(X), (X.shape[0],)).astype(float)
        return float(out[0]) if single else out


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def evaluate(self, X):
        return np.full(X.shape[0], self.value)

    def to_polynomial(self, n):
        return Polynomial.constant(n, self.value)

    def max_index(self):
        return -1

    def __str__(self):
        v = self.value
        return str(int(v)) if float(v).is_integer() else repr(v)


@dataclass(frozen=True)
class Var(Expr):
    index: int  # zero-based

    def evaluate(self, X):
        return X[:, self.index]

    def to_polynomial(self, n):
        return Polynomial.variable(n, self.index)

    def max_index(self):
        return self.index

    def __str__(self):
        return f"x{self.index + 1}"


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr
    sign: int = 1  # -1 for subtraction

    def evaluate(self, X):
        a, b = self.left.evaluate(X), self.right.evaluate(X)
        return a + b if self.sign > 0 else a - b

    def to_polynomial(self, n):
        a, b = self.left.to_polynomial(n), self.right.to_polynomial(n)
        return a + b if self.sign > 0 else a - b

    def max_index(self):
        return max(self.left.max_index(), self.right.max_index())

    def __str__(self):
        op = "+" if self.sign > 0 else "-"
        return f"({self.left} {op} {self.right})"


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def evaluate(self, X):
        return self.left.evaluate(X) * self.right.evaluate(X)

    def to_polynomial(self, n):
        return self.left.to_polynomial(n) * self.right.to_polynomial(n)

    def max_index(self):
        return max(self.left.max_index(), self.right.max_index())

    def __str__(self):
        return f"{self.left}*{self.right}"


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def evaluate(self, X):
        return -self.arg.evaluate(X)

    def to_polynomial(self, n):
        return -self.arg.to_polynomial(n)

    def max_index(self):
        return self.arg.max_index()

    def __str__(self):
        return f"-({self.arg})"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    k: int

    def evaluate(self, X):
        return self.base.evaluate(X) ** self.k

    def to_polynomial(self, n):
        return self.base.to_polynomial(n) ** self.k

    def max_index(self):
        return self.base.max_index()

    def __str__(self):
        return f"({self.base})^{self.k}"


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr

    def evaluate(self, X):
        return np.exp(self.arg.evaluate(X))

    def to_polynomial(self, n):
        raise NotPolynomialError("exp(...) is not a polynomial")

    def max_index(self):
        return self.arg.max_index()

    def __str__(self):
        return f"exp({self.arg})"


# -- tokenizer / parser -------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<var>x\d+)|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<op><=|>=|==|\*\*|[-+*^()<>=]))"
)


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ParseError(f"expected {value!r}, found {t[1] or 'end of input'!r}", self.text, t[2])
        return t

    def sum(self) -> Expr:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = Add(node, self.term(), 1 if op == "+" else -1)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[1] in ("*",):
            self.take()
            node = Mul(node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or not val.isdigit():
                raise ParseError("exponent must be a nonnegative integer literal", self.text, pos)
            return Pow(base, int(val))
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "var":
            idx = int(val[1:])
            if idx < 1:
                raise ParseError("variables are numbered from x1", self.text, pos)
            return Var(idx - 1)
        if kind == "name":
            if val != "exp":
                raise ParseError(f"unknown function or name {val!r}", self.text, pos)
            self.expect("(")
            arg = self.sum()
            self.expect(")")
            return Exp(arg)
        if val == "(":
            inner = self.sum()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {val or 'end of input'!r}", self.text, pos)


def parse_expression(text: str) -> Expr:
    p = _Parser(text)
    node = p.sum()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected token {val!r}", text, pos)
    return node


def parse_relation(text: str) -> list[Expr]:
    """Parse ``lhs OP rhs`` into expressions that must be ``<= 0``.

    ``<=``/``<`` give ``lhs - rhs``; ``>=``/``>`` give ``rhs - lhs``;
    ``=``/``==`` give both.  Strict comparisons are read as their closure.
    A bare expression means ``expr <= 0``.
    """
    p = _Parser(text)
    lhs = p.sum()
    kind, op, pos = p.peek()
    if kind == "end":
        return [lhs]
    if op not in ("<=", ">=", "<", ">", "=", "=="):
        raise ParseError(f"expected a comparison, found {op!r}", text, pos)
    p.take()
    rhs = p.sum()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected token {val!r}", text, pos)
    if op in ("<=", "<"):
        return [Add(lhs, rhs, -1)]
    if op in (">=", ">"):
        return [Add(rhs, lhs, -1)]
    return [Add(lhs, rhs, -1), Add(rhs, lhs, -1)]


def try_polynomial(expr: Expr, n: int) -> Polynomial | None:
    try:
        return expr.to_polynomial(n)
    except NotPolynomialError:
        return None


def parse_polynomial(text: str, n: int) -> Polynomial:
    """Parse an objective string into a :class:`Polynomial`."""
    expr = parse_expression(text)
    if expr.max_index() >= n:
        raise ParseError(f"variable x{expr.max_index() + 1} exceeds dimension {n}", text, 0)
    poly = try_polynomial(expr, n)
    if poly is None:
        raise NotPolynomialError(f"objective {text!r} is not a polynomial")
    return poly
