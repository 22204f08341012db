"""Sparse exact polynomials and canonical rational functions.

Three carriers: :class:`UniPoly` (sparse univariate), :class:`MultiPoly`
(sparse multivariate) and :class:`RatFunc` (coprime numerator/denominator
with monic denominator).  Coefficients are rationals (``gmpy2.mpq``) or
elements of one algebraic extension context; mixing two distinct contexts in
one polynomial is an error.

Division by extension-element leading coefficients can raise
:class:`~aodesolve.exact.ZeroDivisorSplit`; these exceptions propagate to the
branch orchestration points.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz, gcd as zgcd, lcm as zlcm, is_square, isqrt

from .exact import (
    QONE,
    QZERO,
    ExtContext,
    ExtElem,
    decide_zero,
    inv,
    is_rational,
    lift_to,
    project_scalar,
    qq,
)


class UniPoly:
    """Sparse univariate polynomial: map degree -> nonzero coefficient."""

    __slots__ = ("var", "coeffs")

    def __init__(self, var: str, coeffs=None):
        self.var = var
        if coeffs is None:
            self.coeffs = {}
        elif isinstance(coeffs, dict):
            self.coeffs = {e: c for e, c in coeffs.items() if c}
        else:
            self.coeffs = {e: c for e, c in enumerate(coeffs) if c}

    # -- constructors --------------------------------------------------------

    @classmethod
    def const(cls, var: str, c) -> "UniPoly":
        return cls(var, {0: c} if c else {})

    @classmethod
    def x(cls, var: str) -> "UniPoly":
        return cls(var, {1: QONE})

    @classmethod
    def from_dense(cls, var: str, coeffs) -> "UniPoly":
        return cls(var, {e: c for e, c in enumerate(coeffs) if c})

    # -- structure -----------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports -1."""
        return max(self.coeffs) if self.coeffs else -1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def low_degree(self) -> int:
        return min(self.coeffs) if self.coeffs else -1

    def lc(self):
        return self.coeffs[max(self.coeffs)] if self.coeffs else QZERO

    def tc(self):
        """Coefficient of the lowest-degree term present."""
        return self.coeffs[min(self.coeffs)] if self.coeffs else QZERO

    def __getitem__(self, e: int):
        return self.coeffs.get(e, QZERO)

    def dense(self) -> list:
        d = self.degree
        return [self.coeffs.get(e, QZERO) for e in range(d + 1)]

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.var == other.var and self.coeffs == other.coeffs
        if is_rational(other) or isinstance(other, ExtElem):
            if not other:
                return not self.coeffs
            return self.degree == 0 and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self):
        return hash((self.var, tuple(sorted(self.coeffs.items()))))

    def __bool__(self):
        return bool(self.coeffs)

    # -- ring operations -------------------------------------------------

    def _check(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            if other.var != self.var:
                raise ValueError("mixed variables %r, %r" % (self.var, other.var))
            return other
        return UniPoly.const(self.var, other if not is_rational(other) else mpq(other))

    def __add__(self, other):
        o = self._check(other)
        out = dict(self.coeffs)
        for e, c in o.coeffs.items():
            s = out.get(e, QZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return UniPoly(self.var, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return UniPoly(self.var, {e: -c for e, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, UniPoly):
            if other.var != self.var:
                raise ValueError("mixed variables")
            out = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    e = e1 + e2
                    s = out.get(e, QZERO) + c1 * c2
                    if s:
                        out[e] = s
                    else:
                        out.pop(e, None)
            return UniPoly(self.var, out)
        if not other:
            return UniPoly(self.var)
        return UniPoly(self.var, {e: c * other for e, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = UniPoly.const(self.var, QONE)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, s) -> "UniPoly":
        if not s:
            return UniPoly(self.var)
        return UniPoly(self.var, {e: c * s for e, c in self.coeffs.items()})

    def divmod(self, other: "UniPoly"):
        o = self._check(other)
        if o.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        lo = o.degree
        linv = inv(o.lc())
        rem = dict(self.coeffs)
        quo = {}
        while rem:
            dr = max(rem)
            if dr < lo:
                break
            q = rem[dr] * linv
            quo[dr - lo] = q
            for e, c in o.coeffs.items():
                t = dr - lo + e
                s = rem.get(t, QZERO) - q * c
                if s:
                    rem[t] = s
                else:
                    rem.pop(t, None)
        return UniPoly(self.var, quo), UniPoly(self.var, rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise ArithmeticError("inexact polynomial division")
        return q

    # -- calculus / transforms ---------------------------------------------

    def derivative(self) -> "UniPoly":
        return UniPoly(self.var, {e - 1: c * e for e, c in self.coeffs.items() if e})

    def shift_arg(self, a) -> "UniPoly":
        """Substitute var -> var + a (Horner on the dense form)."""
        if not a and is_rational(a):
            return self
        d = self.degree
        if d <= 0:
            return self
        x_plus = UniPoly(self.var, {0: a, 1: QONE})
        acc = UniPoly.const(self.var, self.coeffs.get(d, QZERO))
        for e in range(d - 1, -1, -1):
            acc = acc * x_plus
            c = self.coeffs.get(e)
            if c:
                acc = acc + c
        return acc

    def scale_arg(self, k) -> "UniPoly":
        """Substitute var -> k*var."""
        return UniPoly(self.var, {e: c * k ** e for e, c in self.coeffs.items()})

    def reverse(self, n: int) -> "UniPoly":
        """The n-padded reversal x^n * p(1/x); requires n >= degree."""
        if n < self.degree:
            raise ValueError("reversal length below degree")
        return UniPoly(self.var, {n - e: c for e, c in self.coeffs.items()})

    def evaluate(self, x):
        acc = None
        prev = None
        for e in sorted(self.coeffs, reverse=True):
            if acc is None:
                acc = self.coeffs[e]
            else:
                acc = acc * x ** (prev - e) + self.coeffs[e]
            prev = e
        if acc is None:
            return QZERO
        if prev:
            acc = acc * x ** prev
        return acc

    def compose(self, other: "UniPoly") -> "UniPoly":
        """Substitute var -> other (a polynomial in any variable)."""
        acc = UniPoly(other.var)
        prev = None
        for e in sorted(self.coeffs, reverse=True):
            if prev is None:
                acc = UniPoly.const(other.var, self.coeffs[e])
            else:
                acc = acc * other ** (prev - e) + self.coeffs[e]
            prev = e
        if prev:
            acc = acc * other ** prev
        return acc

    def rename(self, var: str) -> "UniPoly":
        return UniPoly(var, dict(self.coeffs))

    def map_coeffs(self, fn) -> "UniPoly":
        return UniPoly(self.var, {e: fn(c) for e, c in self.coeffs.items()})

    # -- normal forms ------------------------------------------------------

    def monic(self) -> "UniPoly":
        if self.is_zero:
            return self
        lc = self.lc()
        if lc == 1:
            return self
        return self.scale(inv(lc))

    def rational_content(self):
        """Signed rational content: gcd of coefficients, sign of the lc.

        Only defined for rational coefficients; dividing by it yields the
        primitive integer form with positive leading coefficient.
        """
        num = mpz(0)
        den = mpz(1)
        for c in self.coeffs.values():
            num = zgcd(num, c.numerator)
            den = zlcm(den, c.denominator)
        if not num:
            return QZERO
        cont = mpq(num, den)
        return -cont if self.lc() < 0 else cont

    def primitive(self) -> "UniPoly":
        cont = self.rational_content()
        if not cont or cont == 1:
            return self
        return self.scale(1 / cont)

    def extension_context(self):
        for c in self.coeffs.values():
            if isinstance(c, ExtElem):
                return c.ctx
        return None

    def project(self, target) -> "UniPoly":
        return UniPoly(self.var,
                       {e: project_scalar(c, target) for e, c in self.coeffs.items()})


def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic greatest common divisor; rejects the (0, 0) input."""
    if a.is_zero and b.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def poly_gcd_many(polys) -> UniPoly:
    polys = [p for p in polys if not p.is_zero]
    if not polys:
        raise ValueError("gcd of an empty/zero family")
    g = polys[0]
    for p in polys[1:]:
        if g.degree == 0:
            break
        g = poly_gcd(g, p)
    return g.monic()


def squarefree_part(p: UniPoly) -> UniPoly:
    if p.degree <= 1:
        return p.monic()
    g = poly_gcd(p, p.derivative())
    if g.degree == 0:
        return p.monic()
    return p.exact_div(g).monic()


def squarefree_decomposition(p: UniPoly):
    """Yun's decomposition over Q: list of (monic factor, multiplicity)."""
    out = []
    p = p.monic()
    if p.degree <= 0:
        return out
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p.exact_div(a)
    c = dp.exact_div(a)
    i = 1
    while b.degree > 0:
        d = c - b.derivative()
        f = poly_gcd(b, d) if not d.is_zero else b.monic()
        if f.degree > 0:
            out.append((f, i))
        b = b.exact_div(f)
        c = d.exact_div(f) if not d.is_zero else UniPoly(p.var)
        i += 1
    return out


# ---------------------------------------------------------------------------
# real-root isolation over Q (Sturm) and exact integer/rational roots
# ---------------------------------------------------------------------------

def _sturm_chain(p: UniPoly):
    chain = [p, p.derivative()]
    while not chain[-1].is_zero:
        chain.append(-(chain[-2] % chain[-1]))
    chain.pop()
    return chain


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _chain_signs_at(chain, x):
    count, prev = 0, 0
    for q in chain:
        s = _sign(q.evaluate(x))
        if s and prev and s != prev:
            count += 1
        if s:
            prev = s
    return count


def _roots_in(chain, a, b) -> int:
    """Number of distinct real roots in (a, b] for a squarefree chain head."""
    return _chain_signs_at(chain, a) - _chain_signs_at(chain, b)


def cauchy_bound(p: UniPoly) -> mpq:
    lc = abs(p.lc())
    m = max((abs(c) for e, c in p.coeffs.items() if e != p.degree), default=QZERO)
    return 1 + m / lc


def integer_roots(p: UniPoly):
    """All integer roots of a nonzero rational-coefficient polynomial."""
    if p.is_zero:
        raise ValueError("integer roots of the zero polynomial")
    roots = []
    low = p.low_degree
    if low > 0:
        roots.append(mpz(0))
        p = UniPoly(p.var, {e - low: c for e, c in p.coeffs.items()})
    if p.degree == 0:
        return roots
    p = squarefree_part(p)
    chain = _sturm_chain(p)
    bound = cauchy_bound(p)
    hi = mpq(int(bound) + 1)
    stack = [(-hi, hi)]
    while stack:
        a, b = stack.pop()
        n = _roots_in(chain, a, b)
        if n == 0:
            continue
        if b - a <= 1:
            # test every integer in (a, b]
            k = int(-(-a.numerator // a.denominator))  # ceil(a)
            if mpq(k) == a:
                k += 1
            while mpq(k) <= b:
                if not p.evaluate(mpq(k)):
                    roots.append(mpz(k))
                k += 1
            continue
        mid = (a + b) / 2
        stack.append((a, mid))
        stack.append((mid, b))
    return sorted(roots)


def rational_roots(p: UniPoly):
    """All rational roots of a nonzero rational-coefficient polynomial.

    Found without integer factorization: the monicization x -> x/lc turns
    rational roots into integer roots of a monic integer polynomial.
    """
    if p.is_zero:
        raise ValueError("rational roots of the zero polynomial")
    p = squarefree_part(p).primitive()
    if p.degree == 0:
        return []
    if p.degree == 1:
        return [-p[0] / p[1]]
    a = p.lc()
    d = p.degree
    monicized = UniPoly(p.var, {e: c * a ** (d - 1 - e) for e, c in p.coeffs.items()})
    return sorted(mpq(r, a) for r in integer_roots(monicized))


def split_rational_quadratic(p: UniPoly):
    """Roots of a monic rational quadratic when its discriminant is square."""
    if p.degree != 2:
        raise ValueError("not a quadratic")
    b, c = p[1] / p[2], p[0] / p[2]
    disc = b * b - 4 * c
    if disc < 0:
        return None
    if not is_square(disc.numerator * disc.denominator):
        return None
    s = mpq(isqrt(disc.numerator * disc.denominator), disc.denominator)
    return sorted(((-b - s) / 2, (-b + s) / 2))


# ---------------------------------------------------------------------------
# multivariate polynomials
# ---------------------------------------------------------------------------

class MultiPoly:
    """Sparse multivariate polynomial over Q or one extension context."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        if terms is None:
            self.terms = {}
        else:
            self.terms = {e: c for e, c in terms.items() if c}

    @classmethod
    def const(cls, vars, c) -> "MultiPoly":
        vars = tuple(vars)
        if not c:
            return cls(vars)
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, vars, name) -> "MultiPoly":
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(vars, {tuple(e): QONE})

    @classmethod
    def from_unipoly(cls, p: UniPoly, vars=None) -> "MultiPoly":
        vars = tuple(vars) if vars is not None else (p.var,)
        i = vars.index(p.var)
        terms = {}
        for e, c in p.coeffs.items():
            key = [0] * len(vars)
            key[i] = e
            terms[tuple(key)] = c
        return cls(vars, terms)

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_constant(self) -> bool:
        return not self.terms or set(self.terms) == {(0,) * len(self.vars)}

    def constant(self):
        return self.terms.get((0,) * len(self.vars), QZERO)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        if name not in self.vars:
            return 0 if self.terms else -1
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def leading_form(self) -> "MultiPoly":
        """The homogeneous part of top total degree."""
        d = self.total_degree()
        return MultiPoly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            a, b = _align(self, other)
            return a.terms == b.terms
        if is_rational(other) or isinstance(other, ExtElem):
            if not other:
                return not self.terms
            return self.is_constant and self.constant() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.const(self.vars, other if not is_rational(other) else mpq(other))
        a, b = _align(self, other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            s = out.get(e, QZERO) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPoly(a.vars, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, MultiPoly) else -mpq(other) if is_rational(other) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if not other:
                return MultiPoly(self.vars)
            return MultiPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        a, b = _align(self, other)
        out = {}
        bterms = list(b.terms.items())
        for e1, c1 in a.terms.items():
            for e2, c2 in bterms:
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e, QZERO) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly(a.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = MultiPoly.const(self.vars, QONE)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def scale(self, s) -> "MultiPoly":
        if not s:
            return MultiPoly(self.vars)
        return MultiPoly(self.vars, {e: c * s for e, c in self.terms.items()})

    # -- variable plumbing ---------------------------------------------------

    def restrict_vars(self) -> "MultiPoly":
        """Drop variables that do not occur."""
        if not self.terms:
            return MultiPoly((), {})
        used = [i for i in range(len(self.vars)) if any(e[i] for e in self.terms)]
        if len(used) == len(self.vars):
            return self
        vars = tuple(self.vars[i] for i in used)
        terms = {tuple(e[i] for i in used): c for e, c in self.terms.items()}
        return MultiPoly(vars, terms)

    def with_vars(self, vars) -> "MultiPoly":
        vars = tuple(vars)
        if vars == self.vars:
            return self
        idx = []
        for i, v in enumerate(self.vars):
            if v in vars:
                idx.append(vars.index(v))
            elif any(e[i] for e in self.terms):
                raise ValueError("variable %r cannot be dropped" % (v,))
            else:
                idx.append(None)
        terms = {}
        for e, c in self.terms.items():
            key = [0] * len(vars)
            for i, j in enumerate(idx):
                if j is not None:
                    key[j] += e[i]
            terms[tuple(key)] = c
        return MultiPoly(vars, terms)

    def derivative(self, name: str) -> "MultiPoly":
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if not e[i]:
                continue
            key = e[:i] + (e[i] - 1,) + e[i + 1:]
            out[key] = out.get(key, QZERO) + c * e[i]
        return MultiPoly(self.vars, out)

    def subs(self, mapping: dict) -> "MultiPoly":
        """Substitute variables by polynomials or scalars."""
        target_vars = [v for v in self.vars if v not in mapping]
        values = {}
        for v, val in mapping.items():
            if isinstance(val, UniPoly):
                val = MultiPoly.from_unipoly(val)
            if isinstance(val, MultiPoly):
                for w in val.vars:
                    if w not in target_vars:
                        target_vars.append(w)
            values[v] = val
        tv = tuple(target_vars)
        result = MultiPoly(tv)
        powers = {v: {} for v in mapping}

        def power(v, n):
            cache = powers[v]
            if n not in cache:
                cache[n] = values[v] ** n
            return cache[n]

        for e, c in self.terms.items():
            term = MultiPoly.const(tv, c)
            for i, v in enumerate(self.vars):
                if not e[i]:
                    continue
                if v in mapping:
                    term = term * power(v, e[i])
                else:
                    key = [0] * len(tv)
                    key[tv.index(v)] = e[i]
                    term = term * MultiPoly(tv, {tuple(key): QONE})
            result = result + term
        return result

    def evaluate(self, assignment: dict):
        """Full evaluation at scalar values for every variable."""
        out = QZERO
        for e, c in self.terms.items():
            t = c
            for i, v in enumerate(self.vars):
                if e[i]:
                    t = t * assignment[v] ** e[i]
            out = out + t
        return out

    # -- univariate views ----------------------------------------------------

    def univar_coeffs(self, name: str) -> dict:
        """Coefficients wrt one variable, as polynomials in the others."""
        i = self.vars.index(name)
        rest = self.vars[:i] + self.vars[i + 1:]
        out = {}
        for e, c in self.terms.items():
            key = e[:i] + e[i + 1:]
            out.setdefault(e[i], {})[key] = c
        return {d: MultiPoly(rest, t) for d, t in out.items()}

    @classmethod
    def from_univar(cls, name: str, coeffs: dict, vars=None) -> "MultiPoly":
        pieces = {}
        allvars = [name]
        for d, p in coeffs.items():
            for v in p.vars:
                if v not in allvars:
                    allvars.append(v)
        vars = tuple(vars) if vars is not None else tuple(allvars)
        i = vars.index(name)
        terms = {}
        for d, p in coeffs.items():
            p = p.with_vars(vars[:i] + vars[i + 1:])
            for e, c in p.terms.items():
                terms[e[:i] + (d,) + e[i:]] = c
        return cls(vars, terms)

    def to_unipoly(self, name: str = None) -> UniPoly:
        self = self.restrict_vars()
        if not self.vars:
            return UniPoly.const(name or "x", self.constant())
        if len(self.vars) != 1:
            raise ValueError("not univariate: %r" % (self.vars,))
        if name is not None and self.vars[0] != name:
            raise ValueError("unexpected variable %r" % (self.vars[0],))
        return UniPoly(self.vars[0], {e[0]: c for e, c in self.terms.items()})

    # -- normal forms --------------------------------------------------------

    def rational_content(self):
        num = mpz(0)
        den = mpz(1)
        lead = None
        for e in sorted(self.terms):
            lead = self.terms[e]
        for c in self.terms.values():
            num = zgcd(num, c.numerator)
            den = zlcm(den, c.denominator)
        if not num:
            return QZERO
        cont = mpq(num, den)
        return -cont if lead < 0 else cont

    def primitive(self) -> "MultiPoly":
        """Integer-primitive form with a sign convention (rational coeffs)."""
        cont = self.rational_content()
        if not cont or cont == 1:
            return self
        return self.scale(1 / cont)

    def extension_context(self):
        for c in self.terms.values():
            if isinstance(c, ExtElem):
                return c.ctx
        return None

    def map_coeffs(self, fn) -> "MultiPoly":
        return MultiPoly(self.vars, {e: fn(c) for e, c in self.terms.items()})

    def project(self, target) -> "MultiPoly":
        return self.map_coeffs(lambda c: project_scalar(c, target))

    def __repr__(self):
        from .parsing import format_multipoly

        return format_multipoly(self)


def _union(a, b):
    out = list(a)
    for v in b:
        if v not in out:
            out.append(v)
    return tuple(sorted(out))


def _align(a: MultiPoly, b: MultiPoly):
    if a.vars == b.vars:
        return a, b
    vars = _union(a.vars, b.vars)
    return a.with_vars(vars), b.with_vars(vars)


# ---------------------------------------------------------------------------
# multivariate division, content and gcd
# ---------------------------------------------------------------------------

def _grevlex_key(e):
    return (sum(e), tuple(-x for x in reversed(e)))


def mp_exact_div(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Exact multivariate division; raises ArithmeticError if not divisible."""
    if g.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if f.is_zero:
        return MultiPoly(f.vars)
    f, g = _align(f, g)
    if g.is_constant:
        c = inv(g.constant())
        return f.scale(c)
    rem = dict(f.terms)
    quo = {}
    glt = max(g.terms, key=_grevlex_key)
    glc_inv = inv(g.terms[glt])
    gterms = list(g.terms.items())
    while rem:
        lt = max(rem, key=_grevlex_key)
        diff = tuple(a - b for a, b in zip(lt, glt))
        if any(d < 0 for d in diff):
            raise ArithmeticError("inexact multivariate division")
        qc = rem[lt] * glc_inv
        quo[diff] = qc
        for e, c in gterms:
            t = tuple(a + b for a, b in zip(diff, e))
            s = rem.get(t, QZERO) - qc * c
            if s:
                rem[t] = s
            else:
                rem.pop(t, None)
    return MultiPoly(f.vars, quo)


def prem(A: MultiPoly, B: MultiPoly, name: str) -> MultiPoly:
    """Pseudo-remainder of A by B wrt one variable: lc(B)^(da-db+1)*A mod B."""
    da, db = A.degree_in(name), B.degree_in(name)
    if db < 0:
        raise ZeroDivisionError("pseudo-division by zero")
    if da < db:
        return A
    A, B = _align(A, B)
    i = A.vars.index(name)
    lb = MultiPoly(B.vars, {e: c for e, c in B.terms.items() if e[i] == db})
    lb = MultiPoly(B.vars, {e[:i] + (0,) + e[i + 1:]: c for e, c in lb.terms.items()})
    e = da - db + 1
    R = A
    while True:
        dr = R.degree_in(name)
        if dr < db:
            break
        lt = MultiPoly(R.vars, {t[:i] + (0,) + t[i + 1:]: c
                                for t, c in R.terms.items() if t[i] == dr})
        xpow = [0] * len(R.vars)
        xpow[i] = dr - db
        mono = MultiPoly(R.vars, {tuple(xpow): QONE})
        R = lb * R - lt * mono * B
        e -= 1
    if e > 0:
        R = (lb ** e) * R
    return R


def mp_content_in(f: MultiPoly, name: str) -> MultiPoly:
    """Content of f wrt one variable: gcd of its coefficient polynomials."""
    coeffs = list(f.univar_coeffs(name).values())
    return mp_gcd_many(coeffs)


def mp_primitive_in(f: MultiPoly, name: str):
    cont = mp_content_in(f, name)
    if cont.is_constant:
        c = cont.constant()
        if c == 1:
            return cont, f
        return cont, f.scale(inv(c))
    return cont, mp_exact_div(f, cont)


def _gcd_normalize(f: MultiPoly) -> MultiPoly:
    if f.is_zero:
        return f
    if f.extension_context() is None:
        return f.primitive()
    lt = max(f.terms, key=_grevlex_key)
    return f.scale(inv(f.terms[lt]))


def _lc_in(p: MultiPoly, name: str) -> MultiPoly:
    d = p.degree_in(name)
    i = p.vars.index(name)
    return MultiPoly(p.vars, {e[:i] + (0,) + e[i + 1:]: c
                              for e, c in p.terms.items() if e[i] == d})


def mp_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Multivariate gcd via a subresultant remainder sequence.

    The subresultant division bounds coefficient growth; contents are only
    extracted from the inputs and from the final remainder.
    """
    f = f.restrict_vars()
    g = g.restrict_vars()
    if f.is_zero:
        return _gcd_normalize(g)
    if g.is_zero:
        return _gcd_normalize(f)
    if f.is_constant or g.is_constant:
        vars = _union(f.vars, g.vars)
        return MultiPoly.const(vars, QONE)
    f, g = _align(f, g)
    name = next(v for v in f.vars
                if f.degree_in(v) > 0 or g.degree_in(v) > 0)
    cf, pf = mp_primitive_in(f, name)
    cg, pg = mp_primitive_in(g, name)
    c = mp_gcd(cf, cg)
    A, B = (pf, pg) if pf.degree_in(name) >= pg.degree_in(name) else (pg, pf)
    one = MultiPoly.const(f.vars, QONE)
    gg, hh = one, one
    while True:
        db = B.degree_in(name)
        if db < 0:
            result = A
            break
        if db == 0:
            # a common divisor free of the main variable would contradict
            # primitivity of the parts
            result = one
            break
        delta = A.degree_in(name) - db
        R = prem(A, B, name)
        if R.is_zero:
            result = B
            break
        A, B = B, mp_exact_div(R, gg * hh ** delta)
        gg = _lc_in(A, name)
        if delta == 1:
            hh = gg
        elif delta > 1:
            hh = mp_exact_div(gg ** delta, hh ** (delta - 1))
    if result.degree_in(name) > 0:
        _, result = mp_primitive_in(result, name)
    else:
        result = one
    result = result.with_vars(f.vars)
    if not c.is_constant:
        result = result * c.with_vars(f.vars)
    return _gcd_normalize(result)


def mp_gcd_many(polys) -> MultiPoly:
    polys = [p for p in polys if not p.is_zero]
    if not polys:
        return MultiPoly((), {})
    g = polys[0]
    for p in polys[1:]:
        if g.restrict_vars().is_constant:
            break
        g = mp_gcd(g, p)
    return _gcd_normalize(g)


def mp_homogenize(f: MultiPoly, name: str, degree: int) -> MultiPoly:
    """Homogenize to the given total degree using a fresh variable."""
    if f.degree_in(name) > 0:
        raise ValueError("homogenization variable already occurs")
    vars = f.vars if name in f.vars else f.vars + (name,)
    i = vars.index(name)
    terms = {}
    for e, c in f.with_vars(vars).terms.items():
        d = sum(e)
        if d > degree:
            raise ValueError("degree too small for homogenization")
        terms[e[:i] + (degree - d,) + e[i + 1:]] = c
    return MultiPoly(vars, terms)


def mp_squarefree_part(f: MultiPoly) -> MultiPoly:
    """Product of the distinct irreducible factors (up to a constant)."""
    f = f.restrict_vars()
    if f.is_zero or f.is_constant:
        return f
    # split off monomial factors first: they are squarefree-d by inspection
    mins = [min(e[i] for e in f.terms) for i in range(len(f.vars))]
    if any(mins):
        stripped = MultiPoly(f.vars, {tuple(x - m for x, m in zip(e, mins)): c
                                      for e, c in f.terms.items()})
        mono = {tuple(1 if m else 0 for m in mins): QONE}
        return (mp_squarefree_part(stripped)
                * MultiPoly(f.vars, mono)).restrict_vars()
    if len(f.vars) >= 2 and f.is_homogeneous():
        # no variable divides f, so dehomogenizing is factor-faithful
        name = f.vars[-1]
        affine = f.subs({name: QONE}).restrict_vars()
        sf = mp_squarefree_part(affine)
        return mp_homogenize(sf, name, sf.total_degree()).restrict_vars()
    name = next(v for v in f.vars if f.degree_in(v) > 0)
    cont, pp = mp_primitive_in(f, name)
    g = mp_gcd(pp, pp.derivative(name))
    sf = mp_exact_div(pp, g.with_vars(pp.vars))
    out = _gcd_normalize(sf)
    if not cont.is_constant:
        out = out * mp_squarefree_part(cont).with_vars(out.vars)
    return _gcd_normalize(out.restrict_vars())


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RatFunc:
    """Canonical rational function: coprime num/den with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly, den: UniPoly, _canonical=False):
        if _canonical:
            self.num = num
            self.den = den
            return
        r = normalize(num, den)
        self.num = r.num
        self.den = r.den

    @classmethod
    def from_poly(cls, p: UniPoly) -> "RatFunc":
        return cls(p, UniPoly.const(p.var, QONE), _canonical=True)

    @classmethod
    def const(cls, var: str, c) -> "RatFunc":
        return cls(UniPoly.const(var, c), UniPoly.const(var, QONE), _canonical=True)

    @property
    def var(self) -> str:
        return self.num.var

    @property
    def degree(self) -> int:
        """max(deg num, deg den); the degree of the map P^1 -> P^1."""
        return max(self.num.degree, self.den.degree)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = self._coerce(other)
        return normalize(self.num * other.den + other.num * self.den,
                         self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return normalize(self.num * other.den - other.num * self.den,
                         self.den * other.den)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RatFunc(-self.num, self.den, _canonical=True)

    def __mul__(self, other):
        other = self._coerce(other)
        return normalize(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return normalize(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return (1 / self) ** (-n)
        return RatFunc(self.num ** n, self.den ** n, _canonical=True)

    def _coerce(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, UniPoly):
            return RatFunc.from_poly(other)
        return RatFunc.const(self.var, other if not is_rational(other) else mpq(other))

    def shift_arg(self, a) -> "RatFunc":
        return normalize(self.num.shift_arg(a), self.den.shift_arg(a))

    def evaluate(self, x):
        d = self.den.evaluate(x)
        if not d:
            raise ZeroDivisionError("pole at %s" % (x,))
        return self.num.evaluate(x) / d

    def rename(self, var: str) -> "RatFunc":
        return RatFunc(self.num.rename(var), self.den.rename(var), _canonical=True)

    def map_coeffs(self, fn) -> "RatFunc":
        return normalize(self.num.map_coeffs(fn), self.den.map_coeffs(fn))

    def extension_context(self):
        return self.num.extension_context() or self.den.extension_context()

    def __repr__(self):
        from .parsing import format_ratfunc

        return format_ratfunc(self)


def normalize(num: UniPoly, den: UniPoly) -> RatFunc:
    """Canonical form of num/den: coprime pair with monic denominator."""
    if den.is_zero:
        raise ZeroDivisionError("zero denominator")
    if num.is_zero:
        return RatFunc(UniPoly(num.var), UniPoly.const(num.var, QONE), _canonical=True)
    g = poly_gcd(num, den)
    if g.degree > 0:
        num = num.exact_div(g)
        den = den.exact_div(g)
    lc = den.lc()
    if lc != 1:
        c = inv(lc)
        num = num.scale(c)
        den = den.scale(c)
    return RatFunc(num, den, _canonical=True)


def compose_poly_ratfunc(p: UniPoly, r: RatFunc) -> RatFunc:
    """p(r) for a polynomial p and rational function r, canonicalized."""
    d = p.degree
    if d <= 0:
        return RatFunc.const(r.var, p[0] if d == 0 else QZERO)
    num = UniPoly(r.var)
    for e, c in p.coeffs.items():
        num = num + (r.num ** e) * (r.den ** (d - e)) * c
    return normalize(num, r.den ** d)


def compose_ratfunc(f: RatFunc, r: RatFunc) -> RatFunc:
    """f(r) for rational functions f, r."""
    n = compose_poly_ratfunc(f.num, r)
    d = compose_poly_ratfunc(f.den, r)
    return n / d


def shift(obj, k: int):
    """Replace x by x+k in a polynomial or rational function in x."""
    step = mpq(k)
    if isinstance(obj, UniPoly):
        return obj.shift_arg(step)
    if isinstance(obj, RatFunc):
        return obj.shift_arg(step)
    if isinstance(obj, MultiPoly):
        if len(obj.restrict_vars().vars) > 1:
            raise ValueError("shift of a genuinely multivariate polynomial")
        name = obj.vars[0] if obj.vars else "x"
        return MultiPoly.from_unipoly(obj.to_unipoly().shift_arg(step), (name,))
    raise TypeError("cannot shift %r" % (type(obj),))
