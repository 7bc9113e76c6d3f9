"""Coordinate expression parsing and evaluation.

Grammar (EBNF, also documented in the README):

    expression := term { ("+" | "-") term } ;
    term       := factor { ("*" | "/") factor } ;
    factor     := "-" factor | power ;
    power      := atom [ "^" factor ] ;
    atom       := NUMBER | IDENT | IDENT "(" expression ")"
                | "(" expression ")" ;

Precedence is ``^`` > unary minus > ``*`` ``/`` > ``+`` ``-``; ``^`` is
right-associative, the rest left-associative.  There is no implicit
multiplication: ``2x1`` is a syntax error.  Identifiers must be declared
coordinates or parameters, the constants ``pi`` and ``e``, or one of the
function names ``sin cos tan exp log sqrt abs``.

Parsed trees are immutable.  A :class:`ScalarField` binds a tree to a
coordinate list and parameter values and evaluates it on floats
(:meth:`ScalarField.eval`) or on second-order jets
(:meth:`ScalarField.jet`), which yields exact-to-roundoff first and second
partial derivatives.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from . import jets
from .jets import DomainError, Jet2

__all__ = [
    "ParseError", "UnknownIdentifierError", "DomainError",
    "parse", "to_text", "referenced_params", "ScalarField",
]

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}


class ParseError(ValueError):
    """Malformed expression text."""

    def __init__(self, message: str, position: int, expected: str = ""):
        self.position = position
        self.expected = expected
        text = f"{message} at position {position}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class UnknownIdentifierError(ParseError):
    """Identifier is not a declared coordinate, parameter or builtin."""

    def __init__(self, name: str, position: int):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", position)


# -- AST nodes --------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class ConstName:
    name: str  # "pi" or "e"


@dataclass(frozen=True)
class Coord:
    name: str
    index: int


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a function name
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


Node = Union[Num, ConstName, Coord, Param, Unary, Binary]


# -- tokenizer ---------------------------------------------------------------

_NUMBER = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
            continue
        m = _NUMBER.match(text, i)
        if m:
            tokens.append(("num", m.group(), i))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            tokens.append(("ident", m.group(), i))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens, coords: Sequence[str], params: Sequence[str]):
        self.tokens = tokens
        self.pos = 0
        self.coords = {name: i for i, name in enumerate(coords)}
        self.params = set(params)

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(f"unexpected token {tok[1]!r}" if tok[0] != "end"
                             else "unexpected end of input",
                             tok[2], expected=kind)
        return self.advance()

    def expression(self) -> Node:
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.advance()[0]
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[0] in ("*", "/"):
            op = self.advance()[0]
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.peek()[0] == "-":
            self.advance()
            return Unary("neg", self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "^":
            self.advance()
            return Binary("^", base, self.factor())
        return base

    def atom(self) -> Node:
        kind, text, pos = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "(":
            self.advance()
            node = self.expression()
            self.expect(")")
            return node
        if kind == "ident":
            self.advance()
            if self.peek()[0] == "(":
                if text not in FUNCTIONS:
                    raise UnknownIdentifierError(text, pos)
                self.advance()
                arg = self.expression()
                self.expect(")")
                return Unary(text, arg)
            if text in self.coords:
                return Coord(text, self.coords[text])
            if text in self.params:
                return Param(text)
            if text in CONSTANTS:
                return ConstName(text)
            raise UnknownIdentifierError(text, pos)
        if kind == "end":
            raise ParseError("unexpected end of input", pos,
                             expected="number, identifier or '('")
        raise ParseError(f"unexpected token {text!r}", pos,
                         expected="number, identifier or '('")


def parse(text: str, coords: Sequence[str], params: Sequence[str] = ()) -> Node:
    """Parse an expression against declared coordinate and parameter names."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    parser = _Parser(_tokenize(text), coords, params)
    node = parser.expression()
    parser.expect("end")
    return node


def referenced_params(node: Node) -> set:
    """Names of parameters appearing in the tree."""
    if isinstance(node, Param):
        return {node.name}
    if isinstance(node, Unary):
        return referenced_params(node.arg)
    if isinstance(node, Binary):
        return referenced_params(node.left) | referenced_params(node.right)
    return set()


# -- printer -----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node: Node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return _PREC["neg"]
    return 5


def to_text(node: Node) -> str:
    """Render a tree back to parseable text (round-trips evaluation)."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, (ConstName, Param)):
        return node.name
    if isinstance(node, Coord):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = to_text(node.arg)
            if _prec(node.arg) < _PREC["neg"]:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{node.op}({to_text(node.arg)})"
    if isinstance(node, Binary):
        lp, rp = _prec(node.left), _prec(node.right)
        left, right = to_text(node.left), to_text(node.right)
        if node.op == "^":
            # right-associative; also parenthesize a unary-minus base
            if lp <= _PREC["^"]:
                left = f"({left})"
            if rp < _PREC["^"]:
                right = f"({right})"
        else:
            if lp < _PREC[node.op]:
                left = f"({left})"
            # same-precedence right operands keep their parentheses so the
            # reparsed tree (and hence float evaluation order) is identical
            if rp <= _PREC[node.op]:
                right = f"({right})"
        return f"{left} {node.op} {right}" if node.op in "+-" \
            else f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation ---------------------------------------------------------------


def _eval(node: Node, varvals, bindings: Mapping[str, float]):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Coord):
        return varvals[node.index]
    if isinstance(node, Param):
        return bindings[node.name]
    if isinstance(node, ConstName):
        return CONSTANTS[node.name]
    if isinstance(node, Unary):
        arg = _eval(node.arg, varvals, bindings)
        if node.op == "neg":
            return -arg
        return _UNARY[node.op](arg)
    if isinstance(node, Binary):
        a = _eval(node.left, varvals, bindings)
        b = _eval(node.right, varvals, bindings)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return jets.divide(a, b)
        return jets.power(a, b)
    raise TypeError(f"not an expression node: {node!r}")


_UNARY = {
    "sin": jets.sin, "cos": jets.cos, "tan": jets.tan,
    "exp": jets.exp, "log": jets.log, "sqrt": jets.sqrt,
    "abs": jets.absolute,
}


@dataclass(frozen=True, eq=False)
class ScalarField:
    """An expression bound to coordinates and parameter values.

    Evaluation is a pure function of (tree, bindings, point): repeated
    evaluation at the same point is bit-identical.
    """

    ast: Node
    coords: tuple
    bindings: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        missing = referenced_params(self.ast) - set(self.bindings)
        if missing:
            raise ValueError(f"unbound parameters: {sorted(missing)}")

    @classmethod
    def from_text(cls, text: str, coords: Sequence[str],
                  bindings: Mapping[str, float] | None = None) -> "ScalarField":
        bindings = dict(bindings or {})
        node = parse(text, coords, tuple(bindings))
        return cls(node, tuple(coords), bindings)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def eval(self, p) -> float:
        if len(p) != self.dim:
            raise ValueError(f"point has dim {len(p)}, field has dim {self.dim}")
        try:
            return float(_eval(self.ast, [float(x) for x in p], self.bindings))
        except DomainError as err:
            err.point = tuple(float(x) for x in p)
            raise

    def jet(self, p) -> Jet2:
        if len(p) != self.dim:
            raise ValueError(f"point has dim {len(p)}, field has dim {self.dim}")
        m = self.dim
        varvals = [Jet2.variable(float(x), i, m) for i, x in enumerate(p)]
        try:
            out = _eval(self.ast, varvals, self.bindings)
        except DomainError as err:
            err.point = tuple(float(x) for x in p)
            raise
        if not isinstance(out, Jet2):
            out = Jet2.constant(float(out), m)
        return out

    def text(self) -> str:
        return to_text(self.ast)
