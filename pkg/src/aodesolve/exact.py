"""Exact scalar arithmetic: rationals and dynamic algebraic extensions.

Rationals are ``gmpy2.mpq`` values, which are kept in lowest terms with a
positive denominator automatically.  Algebraic numbers live in a context
``Q[a]/(m)`` where ``m`` is a monic squarefree polynomial of degree >= 2.
The modulus is not required to be irreducible: arithmetic proceeds as if it
were, and any operation that would need to invert a zero divisor raises
:class:`ZeroDivisorSplit` carrying a proper factor of the modulus.  Callers
split the context and resume the computation in each branch (dynamic
evaluation).
"""

from __future__ import annotations

from gmpy2 import mpq, mpz

QZERO = mpq(0)
QONE = mpq(1)

_RATIONAL_TYPES = (int, mpz, type(mpq()))


def qq(x) -> mpq:
    """Coerce an int/string/mpq into an exact rational."""
    return mpq(x)


def is_rational(x) -> bool:
    return isinstance(x, _RATIONAL_TYPES)


# ---------------------------------------------------------------------------
# dense univariate helpers over Q (tuples of mpq, index = exponent)
# ---------------------------------------------------------------------------

def _trim(c: list) -> tuple:
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def _padd(a, b):
    n = max(len(a), len(b))
    out = [QZERO] * n
    for i, x in enumerate(a):
        out[i] = x
    for i, x in enumerate(b):
        out[i] = out[i] + x
    return _trim(out)


def _pneg(a):
    return tuple(-x for x in a)


def _psub(a, b):
    return _padd(a, _pneg(b))


def _pscale(a, s):
    if not s:
        return ()
    return tuple(x * s for x in a)


def _pmul(a, b):
    if not a or not b:
        return ()
    out = [QZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def _pdivmod(a, b):
    """Division with remainder over Q; ``b`` must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return (), a
    rem = list(a)
    db, lb = len(b) - 1, b[-1]
    quo = [QZERO] * (len(a) - len(b) + 1)
    for i in range(len(a) - 1, db - 1, -1):
        c = rem[i]
        if not c:
            continue
        q = c / lb
        quo[i - db] = q
        for j in range(len(b)):
            rem[i - db + j] -= q * b[j]
    return _trim(quo), _trim(rem)


def _pmod(a, b):
    return _pdivmod(a, b)[1]


def _pmonic(a):
    if not a:
        return a
    lc = a[-1]
    if lc == 1:
        return a
    return tuple(x / lc for x in a)


def _pgcd(a, b):
    while b:
        a, b = b, _pmod(a, b)
    return _pmonic(a)


def _pxgcd(a, b):
    """Extended gcd over Q: returns (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = a, b
    s0, s1 = (QONE,), ()
    t0, t1 = (), (QONE,)
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(s0, _pmul(q, s1))
        t0, t1 = t1, _psub(t0, _pmul(q, t1))
    if not r0:
        return (), s0, t0
    lc = r0[-1]
    if lc != 1:
        inv = 1 / lc
        r0 = _pscale(r0, inv)
        s0 = _pscale(s0, inv)
        t0 = _pscale(t0, inv)
    return r0, s0, t0


def _pderiv(a):
    return _trim([a[i] * i for i in range(1, len(a))])


def _psquarefree(a) -> bool:
    if len(a) <= 2:
        return bool(a)
    return len(_pgcd(a, _pderiv(a))) == 1


# ---------------------------------------------------------------------------
# algebraic extension contexts
# ---------------------------------------------------------------------------

class ZeroDivisorSplit(Exception):
    """Raised when inverting a zero divisor in ``Q[a]/(m)``.

    Carries the context and a proper monic factor of the modulus.  The two
    refined contexts are available as :attr:`contexts`.
    """

    def __init__(self, ctx: "ExtContext", factor: tuple):
        self.ctx = ctx
        self.factor = factor
        super().__init__("zero divisor modulo %s" % (ctx,))

    @property
    def contexts(self):
        return self.ctx.split_at(self.factor)


class ExtContext:
    """The ring Q[a]/(m) for a monic squarefree modulus m of degree >= 2."""

    __slots__ = ("modulus", "var")

    def __init__(self, modulus, var: str = "a"):
        mod = _pmonic(_trim(list(mpq(c) for c in modulus)))
        if len(mod) < 3:
            raise ValueError("extension modulus must have degree >= 2")
        if not _psquarefree(mod):
            raise ValueError("extension modulus must be squarefree")
        self.modulus = mod
        self.var = var

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    def __eq__(self, other):
        return isinstance(other, ExtContext) and self.modulus == other.modulus

    def __hash__(self):
        return hash(self.modulus)

    def __repr__(self):
        return "ExtContext(%s)" % (modulus_string(self.modulus, self.var),)

    # -- element constructors ------------------------------------------------

    def element(self, rep) -> "ExtElem":
        return ExtElem(self, _pmod(_trim([mpq(c) for c in rep]), self.modulus))

    def zero(self) -> "ExtElem":
        return ExtElem(self, ())

    def one(self) -> "ExtElem":
        return ExtElem(self, (QONE,))

    def gen(self) -> "ExtElem":
        return self.element((0, 1))

    def lift(self, x) -> "ExtElem":
        if isinstance(x, ExtElem):
            if x.ctx != self:
                raise ValueError("element from a different extension")
            return x
        return ExtElem(self, _trim([mpq(x)]))

    # -- dynamic evaluation --------------------------------------------------

    def split_at(self, factor):
        """Split this context along a proper monic factor of the modulus.

        Returns one entry per factor: an :class:`ExtContext` for factors of
        degree >= 2, or the rational root itself for a linear factor.
        """
        cofactor, rem = _pdivmod(self.modulus, factor)
        if rem:
            raise ValueError("not a factor of the modulus")
        out = []
        for m in (factor, cofactor):
            if len(m) >= 3:
                out.append(ExtContext(m, self.var))
            else:
                out.append(-m[0])
        return tuple(out)

    def numeric_roots(self, dps: int = 50):
        """Approximate the roots of the modulus (testing/bounds only)."""
        import mpmath

        with mpmath.workdps(dps):
            coeffs = [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
                      for c in reversed(self.modulus)]
            return mpmath.polyroots(coeffs, maxsteps=200, extraprec=200)


class ExtElem:
    """An element of an :class:`ExtContext`, reduced modulo the modulus."""

    __slots__ = ("ctx", "rep")

    def __init__(self, ctx: ExtContext, rep: tuple):
        self.ctx = ctx
        self.rep = rep

    # -- predicates ------------------------------------------------------

    def __bool__(self):
        return bool(self.rep)

    def is_rational(self) -> bool:
        return len(self.rep) <= 1

    def __eq__(self, other):
        if isinstance(other, ExtElem):
            return self.ctx == other.ctx and self.rep == other.rep
        if is_rational(other):
            q = mpq(other)
            if not q:
                return not self.rep
            return self.rep == (q,)
        return NotImplemented

    def __hash__(self):
        if len(self.rep) <= 1:
            return hash(self.rep[0] if self.rep else QZERO)
        return hash((self.ctx.modulus, self.rep))

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ExtElem):
            if other.ctx != self.ctx:
                raise ValueError("mixed extension contexts")
            return other
        if is_rational(other):
            return self.ctx.lift(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.rep, o.rep
        if len(a) == 2 and len(b) == 2:
            c0, c1 = a[0] + b[0], a[1] + b[1]
            if c1:
                return ExtElem(self.ctx, (c0, c1))
            return ExtElem(self.ctx, (c0,) if c0 else ())
        return ExtElem(self.ctx, _padd(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.rep, o.rep
        if len(a) == 2 and len(b) == 2:
            c0, c1 = a[0] - b[0], a[1] - b[1]
            if c1:
                return ExtElem(self.ctx, (c0, c1))
            return ExtElem(self.ctx, (c0,) if c0 else ())
        return ExtElem(self.ctx, _psub(a, b))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.ctx, _psub(o.rep, self.rep))

    def __neg__(self):
        return ExtElem(self.ctx, _pneg(self.rep))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self.rep, o.rep
        if not a or not b:
            return ExtElem(self.ctx, ())
        if len(a) == 1 and len(b) == 1:
            return ExtElem(self.ctx, (a[0] * b[0],))
        m = self.ctx.modulus
        if len(m) == 3:
            a0, a1 = (a[0], a[1]) if len(a) == 2 else (a[0], QZERO)
            b0, b1 = (b[0], b[1]) if len(b) == 2 else (b[0], QZERO)
            c2 = a1 * b1
            c0 = a0 * b0 - c2 * m[0]
            c1 = a0 * b1 + a1 * b0 - c2 * m[1]
            if c1:
                return ExtElem(self.ctx, (c0, c1))
            return ExtElem(self.ctx, (c0,) if c0 else ())
        prod = _pmul(a, b)
        if len(prod) < len(m):
            return ExtElem(self.ctx, prod)
        return ExtElem(self.ctx, _pmod(prod, m))

    __rmul__ = __mul__

    def inverse(self) -> "ExtElem":
        """Invert, raising :class:`ZeroDivisorSplit` on a zero divisor."""
        if not self.rep:
            raise ZeroDivisionError("inverting zero in %s" % (self.ctx,))
        g, s, _ = _pxgcd(self.rep, self.ctx.modulus)
        if len(g) > 1:
            raise ZeroDivisorSplit(self.ctx, g)
        return ExtElem(self.ctx, _pmod(s, self.ctx.modulus))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ctx.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- conversions -------------------------------------------------------

    def as_rational(self):
        """The rational value when the representative is constant, else None."""
        if not self.rep:
            return QZERO
        if len(self.rep) == 1:
            return self.rep[0]
        return None

    def evaluate_numeric(self, root):
        """Evaluate the representative at a numeric root of the modulus."""
        import mpmath

        acc = mpmath.mpf(0)
        for c in reversed(self.rep):
            acc = acc * root + mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
        return acc

    def __repr__(self):
        return "ExtElem(%s; %s)" % (
            modulus_string(self.ctx.modulus, self.ctx.var),
            modulus_string(self.rep, self.ctx.var) if self.rep else "0",
        )


# ---------------------------------------------------------------------------
# generic scalar protocol (mpq or ExtElem)
# ---------------------------------------------------------------------------

def is_zero(c) -> bool:
    """Representative-level zero test (see :func:`decide_zero` for branching)."""
    return not c


def decide_zero(c) -> bool:
    """Decide whether a scalar is zero, splitting on zero divisors.

    For a rational this is an ordinary zero test.  For an extension element
    whose representative shares a proper factor with the modulus, the answer
    differs between branches, so :class:`ZeroDivisorSplit` is raised.
    """
    if is_rational(c):
        return not c
    if not c.rep:
        return True
    g = _pgcd(c.rep, c.ctx.modulus)
    if len(g) > 1:
        raise ZeroDivisorSplit(c.ctx, g)
    return False


def inv(c):
    if is_rational(c):
        return 1 / mpq(c)
    return c.inverse()


def as_rational(c):
    """Collapse a scalar to mpq when possible, else return it unchanged."""
    if is_rational(c):
        return mpq(c)
    r = c.as_rational()
    return c if r is None else r


def project_scalar(c, target):
    """Project a scalar into a refined branch.

    ``target`` is either an :class:`ExtContext` whose modulus divides the
    original one, or a rational value of the variable (degree-one branch).
    """
    if is_rational(c):
        return mpq(c)
    if isinstance(target, ExtContext):
        return ExtElem(target, _pmod(c.rep, target.modulus))
    # rational branch: evaluate the representative at the root
    acc = QZERO
    for coef in reversed(c.rep):
        acc = acc * target + coef
    return acc


def scalar_context(c):
    return c.ctx if isinstance(c, ExtElem) else None


def common_context(values):
    """The unique extension context among ``values`` (None if all rational)."""
    ctx = None
    for v in values:
        if isinstance(v, ExtElem):
            if ctx is None:
                ctx = v.ctx
            elif ctx != v.ctx:
                raise ValueError("mixed extension contexts")
    return ctx


def lift_to(ctx, c):
    """Lift a scalar into ``ctx`` (no-op when ctx is None)."""
    if ctx is None:
        return mpq(c) if is_rational(c) else c
    return ctx.lift(c)


def modulus_string(coeffs, var: str) -> str:
    """Render a dense coefficient tuple as a human-readable polynomial."""
    if not coeffs:
        return "0"
    parts = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if not c:
            continue
        if e == 0:
            mono = str(c)
        else:
            head = "" if c == 1 else ("-" if c == -1 else str(c) + "*")
            mono = head + (var if e == 1 else "%s^%d" % (var, e))
        parts.append(mono)
    s = " + ".join(parts)
    return s.replace("+ -", "- ")
