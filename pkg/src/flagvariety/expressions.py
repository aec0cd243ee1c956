"""Tiny evaluator for exact-value expression strings in point files.

Grammar: integers (decimals tolerated), the operators + - * /, the
imaginary unit ``i``, ``sqrt(n)``, and parentheses.  Everything is
evaluated to a Python complex.
"""

import cmath
import re

from .errors import InputError

_TOKEN = re.compile(r"\s*(?:(\d+\.\d+|\d+)|(sqrt)|(i)|([()+\-*/]))")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise InputError(f"bad expression {text!r} at position {pos}")
        number, sqrt_kw, imag, op = m.groups()
        if number is not None:
            tokens.append(("num", float(number)))
        elif sqrt_kw is not None:
            tokens.append(("sqrt", None))
        elif imag is not None:
            tokens.append(("num", 1j))
        else:
            tokens.append((op, None))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.text = text
        self.k = 0

    def peek(self):
        return self.tokens[self.k][0] if self.k < len(self.tokens) else None

    def take(self, kind=None):
        if self.k >= len(self.tokens):
            raise InputError(f"unexpected end of expression {self.text!r}")
        tok = self.tokens[self.k]
        if kind is not None and tok[0] != kind:
            raise InputError(f"expected {kind!r} in expression {self.text!r}")
        self.k += 1
        return tok

    def expr(self):
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            rhs = self.factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def factor(self):
        sign = 1
        while self.peek() == "-":
            self.take()
            sign = -sign
        return sign * self.atom()

    def atom(self):
        kind = self.peek()
        if kind == "num":
            return complex(self.take()[1])
        if kind == "sqrt":
            self.take()
            self.take("(")
            inner = self.expr()
            self.take(")")
            return cmath.sqrt(inner)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        raise InputError(f"unexpected token in expression {self.text!r}")


def evaluate(text):
    """Evaluate an expression string (or pass numbers through) to complex."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    parser = _Parser(_tokenize(text), text)
    value = parser.expr()
    if parser.k != len(parser.tokens):
        raise InputError(f"trailing tokens in expression {text!r}")
    return value
