"""Input grammar and printers for polynomials and rational functions.

Grammar (integer literals, ``+ - * / ^``, parentheses)::

    expr  := term (('+'|'-') term)*
    term  := unary (('*'|'/') unary)*
    unary := '-' unary | power
    power := atom ('^' natural)?
    atom  := natural | name | '(' expr ')'

Rationals are written as quotients of integers; expressions evaluate to
rational functions, and contexts that require a polynomial reject nontrivial
denominators.  Printers emit expanded integer-coefficient forms that re-parse
to the same object.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz, gcd as zgcd, lcm as zlcm

from .exact import QONE, QZERO, is_rational
from .poly import MultiPoly, RatFunc, UniPoly, normalize


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__("%s (line %d, column %d)" % (message, line, col))
        self.line = line
        self.col = col


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens = []
        self._scan()
        self.index = 0

    def _scan(self):
        text = self.text
        i = 0
        line, col = 1, 1
        while i < len(text):
            ch = text[i]
            if ch == "\n":
                line += 1
                col = 1
                i += 1
                continue
            if ch.isspace():
                i += 1
                col += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.tokens.append(("int", text[i:j], line, col))
                col += j - i
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("name", text[i:j], line, col))
                col += j - i
                i = j
                continue
            if ch in "+-*/^()":
                self.tokens.append((ch, ch, line, col))
                i += 1
                col += 1
                continue
            raise ParseError("unexpected character %r" % ch, line, col)
        self.tokens.append(("end", "", line, col))

    def peek(self):
        return self.tokens[self.index]

    def next(self):
        tok = self.tokens[self.index]
        if tok[0] != "end":
            self.index += 1
        return tok


class _Parser:
    """Evaluates expressions into (numerator, denominator) MultiPoly pairs."""

    def __init__(self, text: str, variables):
        self.toks = _Tokenizer(text)
        self.variables = tuple(variables)

    def _fail(self, message, tok):
        raise ParseError(message, tok[2], tok[3])

    def parse(self):
        num, den = self._expr()
        tok = self.toks.peek()
        if tok[0] != "end":
            self._fail("unexpected %r" % tok[1], tok)
        return num, den

    def _const(self, q):
        return MultiPoly.const(self.variables, q)

    def _expr(self):
        num, den = self._term()
        while True:
            tok = self.toks.peek()
            if tok[0] == "+":
                self.toks.next()
                n2, d2 = self._term()
                num, den = num * d2 + n2 * den, den * d2
            elif tok[0] == "-":
                self.toks.next()
                n2, d2 = self._term()
                num, den = num * d2 - n2 * den, den * d2
            else:
                return num, den

    def _term(self):
        num, den = self._unary()
        while True:
            tok = self.toks.peek()
            if tok[0] == "*":
                self.toks.next()
                n2, d2 = self._unary()
                num, den = num * n2, den * d2
            elif tok[0] == "/":
                self.toks.next()
                n2, d2 = self._unary()
                if n2.is_zero:
                    self._fail("division by zero", tok)
                num, den = num * d2, den * n2
            else:
                return num, den

    def _unary(self):
        tok = self.toks.peek()
        if tok[0] == "-":
            self.toks.next()
            num, den = self._unary()
            return -num, den
        return self._power()

    def _power(self):
        num, den = self._atom()
        tok = self.toks.peek()
        if tok[0] == "^":
            self.toks.next()
            etok = self.toks.next()
            if etok[0] != "int":
                self._fail("exponent must be a natural number", etok)
            e = int(etok[1])
            return num ** e, den ** e
        return num, den

    def _atom(self):
        tok = self.toks.next()
        if tok[0] == "int":
            return self._const(mpq(tok[1])), self._const(QONE)
        if tok[0] == "name":
            if tok[1] not in self.variables:
                self._fail("unknown variable %r (allowed: %s)"
                           % (tok[1], ", ".join(self.variables)), tok)
            return MultiPoly.var(self.variables, tok[1]), self._const(QONE)
        if tok[0] == "(":
            num, den = self._expr()
            close = self.toks.next()
            if close[0] != ")":
                self._fail("expected ')'", close)
            return num, den
        self._fail("unexpected %r" % (tok[1] or "end of input"), tok)


def parse_multipoly(text: str, variables) -> MultiPoly:
    """Parse a polynomial expression; nonconstant denominators are rejected."""
    num, den = _Parser(text, variables).parse()
    den = den.restrict_vars()
    if not den.is_constant:
        raise ParseError("expression is not a polynomial (nonconstant denominator)", 1, 1)
    c = den.constant()
    return num.scale(1 / c) if c != 1 else num


def parse_ratfunc(text: str, variable: str) -> RatFunc:
    """Parse a univariate rational function in the given variable."""
    num, den = _Parser(text, (variable,)).parse()
    return normalize(num.to_unipoly(variable) if not num.is_zero else UniPoly(variable),
                     den.to_unipoly(variable))


# ---------------------------------------------------------------------------
# printers
# ---------------------------------------------------------------------------

def _coeff_string(c, mono: str):
    """One term; returns (sign, body)."""
    from .exact import ExtElem

    if isinstance(c, ExtElem):
        body = "(%s)" % _ext_string(c)
        return "+", body + ("*" + mono if mono else "")
    sign = "-" if c < 0 else "+"
    c = abs(c)
    if not mono:
        return sign, _q_string(c)
    if c == 1:
        return sign, mono
    return sign, "%s*%s" % (_q_string(c), mono)


def _q_string(q) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return "%s/%s" % (q.numerator, q.denominator)


def _ext_string(e) -> str:
    from .exact import modulus_string

    return modulus_string(e.rep, e.ctx.var) if e.rep else "0"


def _join_terms(parts) -> str:
    if not parts:
        return "0"
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += " %s %s" % (sign, body)
    return out


def format_unipoly(p: UniPoly) -> str:
    parts = []
    for e in sorted(p.coeffs, reverse=True):
        mono = "" if e == 0 else (p.var if e == 1 else "%s^%d" % (p.var, e))
        parts.append(_coeff_string(p.coeffs[e], mono))
    return _join_terms(parts)


def format_multipoly(p: MultiPoly) -> str:
    def mono_str(e):
        pieces = []
        for v, k in zip(p.vars, e):
            if k == 1:
                pieces.append(v)
            elif k > 1:
                pieces.append("%s^%d" % (v, k))
        return "*".join(pieces)

    keys = sorted(p.terms, key=lambda e: (sum(e), e), reverse=True)
    parts = [_coeff_string(p.terms[e], mono_str(e)) for e in keys]
    return _join_terms(parts)


def integer_scaled_pair(r: RatFunc):
    """Scale num/den by one positive rational so both have integer coeffs.

    The scale clears denominators and divides by the common integer content,
    so the printed pair is as small as possible while preserving the value.
    """
    den_lcm = mpz(1)
    num_gcd = mpz(0)
    for p in (r.num, r.den):
        for c in p.coeffs.values():
            if not is_rational(c):
                return r.num, r.den
            den_lcm = zlcm(den_lcm, c.denominator)
            num_gcd = zgcd(num_gcd, c.numerator)
    if not num_gcd:
        return r.num, r.den
    s = mpq(den_lcm, num_gcd)
    return r.num.scale(s), r.den.scale(s)


def format_ratfunc(r: RatFunc) -> str:
    num, den = integer_scaled_pair(r)
    if den.degree == 0 and den[0] == 1:
        return format_unipoly(num)
    num_s = format_unipoly(num)
    den_s = format_unipoly(den)
    if len(num.coeffs) > 1:
        num_s = "(%s)" % num_s
    if len(den.coeffs) > 1:
        den_s = "(%s)" % den_s
    return "%s/%s" % (num_s, den_s)
