"""Recursive descent parser for generator expressions.

Grammar, in precedence order from loosest to tightest:

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := NUMBER | "x" | IDENT "(" expr ")" | "(" expr ")"

``^`` is right associative and binds tighter than unary minus, so
``-x^2`` is ``-(x^2)`` and ``2*3^2`` is ``18``.  The only identifiers are
``x`` and the function names ``exp``, ``log``, ``sqrt``; anything else is
a ParseError at the identifier's position.  Every ParseError carries the
0-based offset of the offending token (the input length for premature
end of input).
"""

from __future__ import annotations

import re

from ..errors import ParseError
from .ast import Binary, Constant, Expr, Unary, Variable

FUNCTIONS = ("exp", "log", "sqrt")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(\.\d+)?([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<sym>[-+*/^()])
    """,
    re.VERBOSE,
)

# Nesting bound keeps arbitrary input from exhausting the Python stack;
# anything legitimate sits far below it.
_MAX_DEPTH = 100


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0
        self.depth = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect_sym(self, sym: str) -> _Token:
        tok = self.peek()
        if tok.kind == "eof":
            raise ParseError("unexpected end of input", tok.pos)
        if tok.kind != "sym" or tok.text != sym:
            raise ParseError(f"expected {sym!r}", tok.pos)
        return self.advance()

    def _enter(self, pos: int):
        self.depth += 1
        if self.depth > _MAX_DEPTH:
            raise ParseError("expression nested too deeply", pos)

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().kind == "sym" and self.peek().text in ("+", "-"):
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek().kind == "sym" and self.peek().text in ("*", "/"):
            op = self.advance().text
            node = Binary(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "-":
            self.advance()
            self._enter(tok.pos)
            try:
                return Unary("neg", self.factor())
            finally:
                self.depth -= 1
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "^":
            self.advance()
            return Binary("^", base, self.factor())
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "eof":
            raise ParseError("unexpected end of input", tok.pos)
        if tok.kind == "number":
            self.advance()
            return Constant(float(tok.text))
        if tok.kind == "ident":
            if tok.text == "x":
                self.advance()
                return Variable()
            if tok.text in FUNCTIONS:
                self.advance()
                self.expect_sym("(")
                self._enter(tok.pos)
                try:
                    inner = self.expr()
                finally:
                    self.depth -= 1
                self.expect_sym(")")
                return Unary(tok.text, inner)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "sym" and tok.text == "(":
            self.advance()
            self._enter(tok.pos)
            try:
                inner = self.expr()
            finally:
                self.depth -= 1
            self.expect_sym(")")
            return inner
        raise ParseError(f"unexpected token {tok.text!r}", tok.pos)


def parse(text: str) -> Expr:
    """Parse expression text, raising ParseError with a 0-based offset."""
    parser = _Parser(text)
    node = parser.expr()
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise ParseError(f"unexpected trailing input {trailing.text!r}", trailing.pos)
    return node
