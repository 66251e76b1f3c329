"""Parser for the holomorphic expression syntax used in run configurations.

Grammar (lowest to highest precedence)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom (("^" | "**") unary)?        # right associative
    atom   := NUMBER ["i"] | "i" | "z" | "pi" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := "exp" | "log" | "sqrt"

Numbers are decimal literals with optional exponent; a trailing ``i`` makes
them imaginary (``2.5i``). ``sqrt(x)`` is sugar for ``x^0.5``.
"""

import math
import re

from ..errors import ExpressionSyntaxError
from .expr import Const, Exp, Expr, Log, Z, add, mul, div, neg, power, sub

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?i?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()])"
    r")"
)

_FUNCS = {
    "exp": Exp,
    "log": Log,
    "sqrt": lambda a: power(a, Const(0.5)),
}


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {text[pos:pos + 1]!r} at {pos}")
        kind = m.lastgroup
        tok = m.group(kind)
        if kind == "op" and tok == "**":
            tok = "^"
        out.append((kind, tok, m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, tok=None):
        kind, val, pos = self.toks[self.i]
        if tok is not None and val != tok:
            raise ExpressionSyntaxError(f"expected {tok!r} at {pos}, found {val or 'end of input'!r}")
        self.i += 1
        return kind, val, pos

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            rhs = self.term()
            node = add(node, rhs) if op == "+" else sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, _ = self.take()
            rhs = self.unary()
            node = mul(node, rhs) if op == "*" else div(node, rhs)
        return node

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return neg(self.unary())
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return power(base, self.unary())
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            if val.endswith("i"):
                return Const(1j * float(val[:-1]))
            return Const(float(val))
        if kind == "name":
            if val == "z":
                return Z
            if val == "i":
                return Const(1j)
            if val == "pi":
                return Const(math.pi)
            if val in _FUNCS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return _FUNCS[val](arg)
            raise ExpressionSyntaxError(f"unknown name {val!r} at {pos}")
        if val == "(":
            node = self.expr()
            self.take(")")
            return node
        raise ExpressionSyntaxError(f"unexpected {val or 'end of input'!r} at {pos}")


def parse(text: str) -> Expr:
    """Parse ``text`` into an :class:`Expr` tree."""
    if not isinstance(text, str):
        raise TypeError("expression must be a string")
    p = _Parser(text)
    node = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ExpressionSyntaxError(f"trailing input {val!r} at {pos}")
    return node
