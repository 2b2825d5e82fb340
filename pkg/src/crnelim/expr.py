"""Rate expression language for non-mass-action kinetics.

Grammar (whitespace insensitive)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := postfix ("^" unary)?
    postfix := atom "!"*
    atom    := number | name | name "(" args ")" | "(" expr ")"

Names are species. ``fact(e)`` is the same as ``e!``; ``ind(c1, c2, ...)``
is 1 when every comparison ``ci`` holds and 0 otherwise.  Comparisons use
``< <= > >= == !=``.  Evaluation is exact over :class:`Fraction`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, col: int):
        super().__init__(f"column {col}: {message}")
        self.col = col
        self.message = message


class ExprEvaluationError(ArithmeticError):
    """A rate expression produced an invalid value (negative, 0 division, ...)."""


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|==|!=|[-+*/^!(),<>]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class Node:
    def eval(self, x: Sequence[int]) -> Fraction:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Node):
    value: Fraction

    def eval(self, x):
        return self.value


@dataclass(frozen=True)
class Var(Node):
    index: int

    def eval(self, x):
        return Fraction(x[self.index])


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def eval(self, x):
        return -self.arg.eval(x)


def _div(a: Fraction, b: Fraction) -> Fraction:
    if b == 0:
        raise ExprEvaluationError("division by zero")
    return a / b


def _pow(a: Fraction, b: Fraction) -> Fraction:
    if b.denominator != 1 or b < 0:
        raise ExprEvaluationError(f"exponent must be a nonnegative integer, got {b}")
    return a ** int(b)


_BINARY: dict[str, Callable[[Fraction, Fraction], Fraction]] = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _div,
    "^": _pow,
}

_COMPARE: dict[str, Callable[[Fraction, Fraction], bool]] = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def eval(self, x):
        return _BINARY[self.op](self.left.eval(x), self.right.eval(x))


@dataclass(frozen=True)
class Factorial(Node):
    arg: Node

    def eval(self, x):
        v = self.arg.eval(x)
        if v.denominator != 1 or v < 0:
            raise ExprEvaluationError(f"factorial of {v}")
        return Fraction(math.factorial(int(v)))


@dataclass(frozen=True)
class Compare(Node):
    op: str
    left: Node
    right: Node

    def eval(self, x):
        return Fraction(int(_COMPARE[self.op](self.left.eval(x), self.right.eval(x))))


@dataclass(frozen=True)
class Indicator(Node):
    conditions: tuple[Node, ...]

    def eval(self, x):
        return Fraction(int(all(c.eval(x) for c in self.conditions)))


class _Parser:
    def __init__(self, text: str, names: Mapping[str, int]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.tokens[self.i]

    def take(self, value: str | None = None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            raise ExprSyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"expected operator or end of input, found {tok[1]!r}", tok[2])
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.postfix()
        if self.peek()[1] == "^":
            self.take()
            node = BinOp("^", node, self.unary())
        return node

    def postfix(self) -> Node:
        node = self.atom()
        while self.peek()[1] == "!":
            self.take()
            node = Factorial(node)
        return node

    def comparison(self) -> Node:
        left = self.expr()
        tok = self.peek()
        if tok[1] not in _COMPARE:
            raise ExprSyntaxError("expected comparison operator", tok[2])
        self.take()
        return Compare(tok[1], left, self.expr())

    def atom(self) -> Node:
        kind, value, col = self.peek()
        if kind == "num":
            self.take()
            return Const(Fraction(value))
        if value == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if kind == "name":
            self.take()
            if self.peek()[1] == "(":
                self.take()
                if value == "fact":
                    node = Factorial(self.expr())
                    self.take(")")
                    return node
                if value == "ind":
                    conds = [self.comparison()]
                    while self.peek()[1] == ",":
                        self.take()
                        conds.append(self.comparison())
                    self.take(")")
                    return Indicator(tuple(conds))
                raise ExprSyntaxError(f"unknown function {value!r}", col)
            if value not in self.names:
                raise ExprSyntaxError(f"unknown species {value!r}", col)
            return Var(self.names[value])
        raise ExprSyntaxError(f"unexpected {value or 'end of input'!r}", col)


def parse_expr(text: str, names: Mapping[str, int]) -> Node:
    """Parse ``text`` with species names resolved through ``names``."""
    return _Parser(text, names).parse()


def normalize_text(text: str) -> str:
    """Canonical spelling of an expression source: whitespace collapsed."""
    return " ".join(text.split())
