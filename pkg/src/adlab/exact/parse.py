"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr   := ["+"|"-"] term (("+"|"-") term)*
    term   := factor ("*" factor)*
    factor := base ("^" uint)?
    base   := ident | int | int "/" uint | "(" expr ")"
    ident  := letter (letter | digit | "_")*

Whitespace is ignored.  Implicit multiplication ("2x0") is rejected.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .poly import MAX_EXPONENT, ExponentOverflow, MultiPoly


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


class UnknownIdentifier(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^/()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.names = {name: i for i, name in enumerate(variables)}
        self.nvars = len(variables)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.advance()
        if val != value or kind != "op":
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos, self.text)

    def parse(self) -> MultiPoly:
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", pos, self.text)
        return p

    def expr(self) -> MultiPoly:
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.advance()
            sign = -1 if val == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                t = self.term()
                acc = acc + t if val == "+" else acc - t
            else:
                return acc

    def term(self) -> MultiPoly:
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.advance()
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> MultiPoly:
        base = self.base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            ek, ev, epos = self.advance()
            if ek != "int":
                raise ParseError("exponent must be a nonnegative integer", epos, self.text)
            e = int(ev)
            if e > MAX_EXPONENT:
                raise ExponentOverflow(f"exponent {e} exceeds {MAX_EXPONENT} at position {epos}")
            return base**e
        return base

    def uint(self) -> tuple[int, int]:
        kind, val, pos = self.advance()
        if kind != "int":
            raise ParseError(f"expected an integer, found {val or 'end of input'!r}", pos, self.text)
        return int(val), pos

    def base(self) -> MultiPoly:
        kind, val, pos = self.advance()
        if kind == "ident":
            if val not in self.names:
                raise UnknownIdentifier(f"unknown identifier {val!r}", pos, self.text)
            return MultiPoly.var(self.nvars, self.names[val])
        if kind == "int":
            num = int(val)
            nk, nv, _ = self.peek()
            if nk == "op" and nv == "/":
                self.advance()
                den, dpos = self.uint()
                if den == 0:
                    raise ParseError("zero denominator", dpos, self.text)
                return MultiPoly.const(self.nvars, Fraction(num, den))
            return MultiPoly.const(self.nvars, num)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def poly_parse(text: str, variables: Sequence[str]) -> MultiPoly:
    """Parse ``text`` into expanded canonical form over ``variables``."""
    if len(set(variables)) != len(variables):
        raise ValueError("duplicate variable names")
    return _Parser(text, variables).parse()
