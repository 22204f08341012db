"""Separable difference equations P1(y(x+1))/Q1(y(x+1)) = P2(y(x))/Q2(y(x)).

Holds the equation quadruple, the finite set of constants that can relate
the homogenized sides along a rational solution, and the classification of
the degenerate equal-sides case (only constant solutions).
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .exact import (
    ExtContext,
    ExtElem,
    QONE,
    ZeroDivisorSplit,
    as_rational,
    decide_zero,
    is_rational,
)
from .poly import MultiPoly, RatFunc, UniPoly, poly_gcd
from .elimination import DifferenceSystem, resultant
from .towers import RootBranch, adjoin_root, refine_world


@dataclass(frozen=True)
class SeparableEq:
    """The quadruple (P1, Q1, P2, Q2) of common rational-function degree n."""

    p1: UniPoly
    q1: UniPoly
    p2: UniPoly
    q2: UniPoly
    n: int

    @classmethod
    def make(cls, p1, q1, p2, q2) -> "SeparableEq":
        for poly in (p1, q1, p2, q2):
            if poly.is_zero:
                raise ValueError("separable equation with a zero polynomial")
        if poly_gcd(p1, q1).degree > 0 or poly_gcd(p2, q2).degree > 0:
            raise ValueError("separable equation sides must be in lowest terms")
        n = max(p1.degree, q1.degree)
        if n != max(p2.degree, q2.degree):
            raise ValueError("sides of different rational-function degree")
        if n < 1:
            raise ValueError("rational-function degree must be >= 1")
        return cls(p1, q1, p2, q2, n)

    def quadruple(self):
        return (self.p1, self.q1, self.p2, self.q2)

    def extension_context(self):
        for p in self.quadruple():
            ctx = p.extension_context()
            if ctx is not None:
                return ctx
        return None


def from_parametrization(p1, p2=None) -> SeparableEq:
    """The separable equation p1(y(x+1)) = p2(y(x)), normalized.

    Both sides are scaled by the one constant that renders the first
    numerator integer-primitive with positive leading coefficient (monic
    over an extension), so equal inputs yield an identical quadruple; the
    denominators stay monic from the canonical forms.
    """
    if p2 is None:
        p1, p2 = p1.p1, p1.p2
    n1, d1, n2, d2 = p1.num, p1.den, p2.num, p2.den
    if n1.extension_context() is None:
        lam = 1 / n1.rational_content()
    else:
        from .exact import inv

        lam = inv(n1.lc())
    var = "z"
    return SeparableEq.make(n1.scale(lam).rename(var), d1.rename(var),
                            n2.scale(lam).rename(var), d2.rename(var))


def homogenize_pair(eq: SeparableEq):
    """Degree-n homogenizations of the four polynomials, in (z, w)."""
    return tuple(_homogenize(p, eq.n) for p in eq.quadruple())


def _homogenize(p: UniPoly, n: int) -> MultiPoly:
    if p.degree > n:
        raise ValueError("cannot homogenize to a lower degree")
    return MultiPoly(("z", "w"), {(e, n - e): c for e, c in p.coeffs.items()})


def equal_sides(eq: SeparableEq) -> bool:
    """Whether the two sides agree as rational functions."""
    return (eq.p1 * eq.q2 - eq.p2 * eq.q1).is_zero


@dataclass(frozen=True)
class ConstantsOnly:
    """Marker: every constant in the domain solves the equation; bound 0."""

    bound: int = 0


def constants_only_answer(eq: SeparableEq) -> ConstantsOnly:
    if not equal_sides(eq):
        raise ValueError("equation sides differ; not the all-constants case")
    return ConstantsOnly()


@dataclass
class CandidateBranch:
    """One processing branch of the candidate set.

    ``value`` is a scalar in the branch world; for extension worlds of
    degree >= 3 it is the generic root covering ``conjugates`` candidates at
    once.  ``embed`` maps base-world scalars into the branch world.
    """

    value: object
    ctx: ExtContext | None
    embed: object
    conjugates: int = 1


@dataclass
class CandidateSet:
    finite: bool
    values: list            # display values; empty when infinite
    branches: list          # CandidateBranch entries for processing

    def nonzero_branches(self):
        out = []
        for b in self.branches:
            v = b.value if is_rational(b.value) else b.value.as_rational()
            if v is not None and not v:
                continue  # the zero constant only admits constant solutions
            out.append(b)
        return out


def constant_candidates(eq: SeparableEq) -> CandidateSet:
    """The finite set of constants relating the homogenized sides.

    Infinite (and flagged so) exactly when the two sides are equal.  The
    resultant part is kept only where a common-root witness exists; the
    head/tail coefficient-ratio rules are applied literally, including their
    repeated insertion of zero.
    """
    if equal_sides(eq):
        return CandidateSet(finite=False, values=[], branches=[])

    base_ctx = eq.extension_context()
    p1, q1, p2, q2 = eq.quadruple()

    # common-point candidates: roots of Res_z(P1 - c P2, Q1 - c Q2)
    cvars = ("c", "z")
    f = (MultiPoly.from_unipoly(p1, cvars)
         - MultiPoly.var(cvars, "c") * MultiPoly.from_unipoly(p2, cvars))
    g = (MultiPoly.from_unipoly(q1, cvars)
         - MultiPoly.var(cvars, "c") * MultiPoly.from_unipoly(q2, cvars))
    r = resultant(f, g, "z").restrict_vars()
    if r.is_zero:
        raise AssertionError("vanishing candidate resultant on unequal sides")
    branches = []
    if not r.is_constant:
        rpoly = r.to_unipoly("c")
        for branch in adjoin_root(rpoly, base_ctx):
            branches.extend(_witness_filter(eq, branch))

    # coefficient-ratio rules on matching head/tail degrees
    ratio_values = []
    if p1.degree == p2.degree:
        ratio_values += [p1.lc() / p2.lc(), mpq(0)]
    if q1.degree == q2.degree:
        ratio_values += [q1.lc() / q2.lc(), mpq(0)]
    if p1.low_degree == p2.low_degree:
        ratio_values += [p1.tc() / p2.tc(), mpq(0)]
    if q1.low_degree == q2.low_degree:
        ratio_values += [q1.tc() / q2.tc(), mpq(0)]

    seen = set()
    out_branches = []

    def add(b: CandidateBranch):
        key = _value_key(b.value)
        if key not in seen:
            seen.add(key)
            out_branches.append(b)

    for b in branches:
        add(b)
    for v in ratio_values:
        v = as_rational(v)
        add(CandidateBranch(v, None if is_rational(v) else base_ctx, _identity))

    out_branches.sort(key=_branch_sort_key)
    values = []
    for b in out_branches:
        values.extend(_display_values(b))
    return CandidateSet(finite=True, values=values, branches=out_branches)


def _identity(c):
    return c


def _value_key(v):
    if is_rational(v):
        return ("q", mpq(v))
    vr = v.as_rational()
    if vr is not None:
        return ("q", vr)
    return ("e", v.ctx.modulus, v.rep)


def _branch_sort_key(b: CandidateBranch):
    if is_rational(b.value):
        return (0, b.value, ())
    return (1, 0, tuple(b.ctx.modulus) if b.ctx else ())


def _display_values(b: CandidateBranch):
    if is_rational(b.value):
        return [b.value]
    ctx = b.value.ctx if isinstance(b.value, ExtElem) else b.ctx
    if ctx is not None and ctx.degree == 2 and b.value == ctx.gen():
        trace = -ctx.modulus[1]
        return [b.value, trace - b.value]
    return [b.value]


def _witness_filter(eq: SeparableEq, branch: RootBranch):
    """Keep a resultant root only when a common-point witness exists."""
    p1 = branch.embed_poly(eq.p1)
    q1 = branch.embed_poly(eq.q1)
    p2 = branch.embed_poly(eq.p2)
    q2 = branch.embed_poly(eq.q2)
    c = branch.value if isinstance(branch, CandidateBranch) else branch.root
    try:
        f0 = p1 - p2.scale(c)
        g0 = q1 - q2.scale(c)
        if f0.is_zero and g0.is_zero:
            raise AssertionError("equal sides should have been classified earlier")
        if f0.is_zero:
            ok = g0.degree >= 1
        elif g0.is_zero:
            ok = f0.degree >= 1
        else:
            ok = poly_gcd(f0, g0).degree >= 1
    except ZeroDivisorSplit as exc:
        out = []
        for sub in refine_world(exc):
            chained = RootBranch(sub.ctx, sub.embed(c),
                                 _compose(sub.embed, branch.embed))
            out.extend(_witness_filter(eq, chained))
        return out
    if not ok:
        return []
    conj = branch.ctx.degree if branch.ctx is not None and not is_rational(c) else 1
    return [CandidateBranch(c, branch.ctx, branch.embed, conj)]


def _compose(outer, inner):
    return lambda x: outer(inner(x))


def build_system(eq: SeparableEq, c, embed=None) -> DifferenceSystem:
    """Homogenized system with the nonzero constant folded into side two."""
    if is_rational(c) and not c:
        raise ValueError("zero constant yields only constant solutions")
    if not is_rational(c) and decide_zero(c):
        raise ValueError("zero constant yields only constant solutions")
    if embed is not None:
        eq = SeparableEq(embed(eq.p1), embed(eq.q1), embed(eq.p2), embed(eq.q2), eq.n)
    tp1, tq1, tp2, tq2 = homogenize_pair(eq)
    return DifferenceSystem(tp1, tq1, tp2.scale(c), tq2.scale(c), eq.n)
