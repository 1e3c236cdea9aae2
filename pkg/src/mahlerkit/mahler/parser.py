"""Recursive-descent parser for rational functions in ``z`` over cyclotomic fields.

Grammar::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := atom ("^" ["-"] INT)?
    atom    := INT | "z" | "zeta" "(" INT ")" | "(" expr ")"

Rationals are written as quotients, e.g. ``3/4``.  Any other identifier is
rejected, so general algebraic numbers cannot sneak in.
"""

from __future__ import annotations

import re

from ..numbers import CycloElem, RootOfUnity
from .poly import Poly, RatFunc


class ParseError(ValueError):
    def __init__(self, text: str, pos: int, expected: str, found: str | None = None):
        self.text, self.pos, self.expected = text, pos, expected
        self.found = found if found is not None else (text[pos:pos + 1] or "end of input")
        super().__init__(f"at position {pos}: expected {expected}, found {self.found!r}")


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(.))")


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        if not text[pos:].strip():
            break
        m = _TOKEN.match(text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("INT", m.group(1), start))
        elif m.group(2):
            toks.append(("ID", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(text, start, "an operator, number, 'z' or 'zeta(n)'", ch)
            toks.append((ch, ch, start))
        pos = m.end()
    toks.append(("EOF", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self):
        return self.toks[self.i]

    def take(self, kind: str, expected: str):
        tok = self.cur
        if tok[0] != kind:
            raise ParseError(self.text, tok[2], expected, tok[1] or "end of input")
        self.i += 1
        return tok

    def parse(self) -> RatFunc:
        value = self.expr()
        if self.cur[0] != "EOF":
            raise ParseError(self.text, self.cur[2], "an operator or end of input", self.cur[1])
        return value

    def expr(self) -> RatFunc:
        value = self.term()
        while self.cur[0] in ("+", "-"):
            op = self.take(self.cur[0], "'+' or '-'")[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RatFunc:
        value = self.unary()
        while self.cur[0] in ("*", "/"):
            op, _, pos = self.take(self.cur[0], "'*' or '/'")
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if not rhs:
                    raise ParseError(self.text, pos, "a nonzero divisor", "division by zero")
                value = value / rhs
        return value

    def unary(self) -> RatFunc:
        if self.cur[0] == "-":
            self.i += 1
            return -self.unary()
        if self.cur[0] == "+":
            self.i += 1
            return self.unary()
        return self.power()

    def power(self) -> RatFunc:
        base = self.atom()
        if self.cur[0] != "^":
            return base
        self.i += 1
        sign = 1
        if self.cur[0] == "-":
            self.i += 1
            sign = -1
        tok = self.take("INT", "an integer exponent")
        k = sign * int(tok[1])
        if k < 0 and not base:
            raise ParseError(self.text, tok[2], "a nonzero base for a negative power", "0")
        return base ** k

    def atom(self) -> RatFunc:
        kind, val, pos = self.cur
        if kind == "INT":
            self.i += 1
            return RatFunc(Poly.const(int(val)), reduce=False)
        if kind == "ID":
            self.i += 1
            if val == "z":
                return RatFunc(Poly.z(), reduce=False)
            if val == "zeta":
                self.take("(", "'(' after zeta")
                n = int(self.take("INT", "a positive integer order")[1])
                if n < 1:
                    raise ParseError(self.text, pos, "zeta(n) with n >= 1", f"zeta({n})")
                self.take(")", "')'")
                return RatFunc(Poly.const(CycloElem.root(RootOfUnity.from_kn(1, n))), reduce=False)
            raise ParseError(self.text, pos, "'z' or 'zeta(n)'", val)
        if kind == "(":
            self.i += 1
            value = self.expr()
            self.take(")", "')'")
            return value
        raise ParseError(self.text, pos, "a number, 'z', 'zeta(n)' or '('", val or "end of input")


def parse_ratfunc(text: str) -> RatFunc:
    """Parse ``text`` into an exact, reduced :class:`RatFunc`."""
    if not isinstance(text, str):
        text = str(text)
    return _Parser(text).parse()


def parse_coefficient(text) -> CycloElem:
    """Parse a constant (no ``z``) expression, as used for seed coefficients."""
    f = parse_ratfunc(text)
    if f.num.deg > 0 or f.den.deg > 0:
        raise ParseError(str(text), 0, "a constant expression", str(text))
    return f.num[0] / f.den[0]
