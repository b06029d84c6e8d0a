"""Expression parser for algebra elements and parameter polynomials.

Grammar (whitespace is ignored, implicit multiplication is not allowed)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" ["-"] INT)?
    atom   := INT ["/" INT] | IDENT | "(" expr ")"

In a Presentation context identifiers are generators, coefficient
variables, or ``Delta`` (the rescaled Casimir, when f, h and e or s are
present).  Products keep their left-to-right order.  In a polynomial
context every identifier must be one of the given variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Union

from .exact_poly import CoefPoly
from .rewrite_engine import NCExpr, Presentation

__all__ = [
    "ParseError",
    "UnknownIdentifierError",
    "parse_expr",
    "parse_poly",
    "tokenize",
]


class ParseError(ValueError):
    def __init__(self, message: str, column: int, text: str = ""):
        self.message = message
        self.column = column
        self.text = text
        super().__init__(f"{message} at column {column}")


class UnknownIdentifierError(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # INT, IDENT, OP, END
    value: str
    column: int  # 1-based


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(.))")


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        col = m.start(m.lastindex) + 1
        if m.group(1):
            tokens.append(Token("INT", m.group(1), col))
        elif m.group(2):
            tokens.append(Token("IDENT", m.group(2), col))
        else:
            ch = m.group(3)
            if ch not in "+-*^/()":
                raise ParseError(f"unexpected character {ch!r}", col, text)
            tokens.append(Token("OP", ch, col))
        pos = m.end()
    tokens.append(Token("END", "", len(text) + 1))
    return tokens


Value = Union[NCExpr, CoefPoly]


class _Parser:
    def __init__(self, text: str, ctx):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.ctx = ctx

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.column, self.text)

    def accept(self, op: str) -> Token | None:
        if self.tok.kind == "OP" and self.tok.value == op:
            t = self.tok
            self.i += 1
            return t
        return None

    def expect_int(self) -> Token:
        if self.tok.kind != "INT":
            self.error("expected an integer")
        t = self.tok
        self.i += 1
        return t

    # -- grammar ------------------------------------------------------------

    def parse(self) -> Value:
        if self.tok.kind == "END":
            self.error("empty expression")
        v = self.expr()
        if self.tok.kind != "END":
            self.error(f"unexpected {self.tok.value!r}")
        return v

    def expr(self) -> Value:
        v = self.term()
        while True:
            if self.accept("+"):
                v = v + self.term()
            elif self.accept("-"):
                v = v - self.term()
            else:
                return v

    def term(self) -> Value:
        v = self.unary()
        while self.accept("*"):
            v = self.ctx.mul(v, self.unary())
        return v

    def unary(self) -> Value:
        if self.accept("-"):
            return -self.unary()
        return self.power()

    def power(self) -> Value:
        start = self.tok
        base, invertible = self.atom()
        caret = self.accept("^")
        if not caret:
            return base
        neg = self.accept("-") is not None
        k = int(self.expect_int().value)
        if neg and k:
            if invertible is None:
                self.error("negative exponent on a non-invertible factor", start)
            return self.ctx.power(invertible, k)
        return self.ctx.power(base, k)

    def atom(self):
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            num = int(t.value)
            if self.accept("/"):
                den_tok = self.tok
                den = int(self.expect_int().value)
                if den == 0:
                    self.error("zero denominator", den_tok)
                return self.ctx.scalar(Fraction(num, den)), None
            return self.ctx.scalar(Fraction(num)), None
        if t.kind == "IDENT":
            self.i += 1
            return self.ctx.ident(t, self)
        if self.accept("("):
            v = self.expr()
            if not self.accept(")"):
                self.error("expected ')'")
            return v, None
        if t.kind == "END":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.value!r}")


class _NCContext:
    def __init__(self, p: Presentation):
        self.p = p

    def scalar(self, c: Fraction) -> NCExpr:
        return self.p.scalar(c)

    def mul(self, a: NCExpr, b: NCExpr) -> NCExpr:
        return a * b

    def power(self, a: NCExpr, k: int) -> NCExpr:
        out = self.p.one()
        for _ in range(k):
            out = out * a
        return out

    def ident(self, t: Token, parser: _Parser):
        p, name = self.p, t.value
        if name in p:
            g = p.generators[p.gen_index(name)]
            return p.gen(name), (p.inv(name) if g.invertible else None)
        if name == "Delta" and "f" in p and "h" in p and ("e" in p or "s" in p):
            from .algebra_zoo import delta
            return delta(p), None
        if name in p.coef_vars:
            return p.scalar(CoefPoly.var(name, p.coef_vars)), None
        raise UnknownIdentifierError(f"unknown identifier {name!r}", t.column, parser.text)


class _PolyContext:
    def __init__(self, vars: Sequence[str]):
        self.vars = tuple(vars)

    def scalar(self, c: Fraction) -> CoefPoly:
        return CoefPoly.const(c, self.vars)

    def mul(self, a: CoefPoly, b: CoefPoly) -> CoefPoly:
        return a * b

    def power(self, a: CoefPoly, k: int) -> CoefPoly:
        return a ** k

    def ident(self, t: Token, parser: _Parser):
        if t.value in self.vars:
            return CoefPoly.var(t.value, self.vars), None
        raise UnknownIdentifierError(f"unknown identifier {t.value!r}", t.column, parser.text)


def parse_expr(text: str, context) -> Value:
    """Parse ``text`` in a Presentation, a PoissonAlg, or a variable list.

    Returns an NCExpr for a Presentation (not reduced) and a CoefPoly
    otherwise.
    """
    if isinstance(context, Presentation):
        ctx = _NCContext(context)
    elif hasattr(context, "vars") and hasattr(context, "table"):
        ctx = _PolyContext(context.vars)
    else:
        ctx = _PolyContext(context)
    return _Parser(text, ctx).parse()


def parse_poly(text: str, vars: Sequence[str]) -> CoefPoly:
    """Parse a commutative polynomial over the variables ``vars``."""
    return _Parser(text, _PolyContext(vars)).parse()
