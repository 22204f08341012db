"""Degree bounds for polynomial solutions of autonomous homogeneous
second-order difference equations, and the full bound for rational solutions
of a separable equation.

The substitution u(x+1) = u + du, u(x+2) = u + 2 du + d2u turns the relation
into a form whose lowest "difference weight" terms determine a nonzero
univariate indicial polynomial; the degree of any polynomial solution is one
of its non-negative integer roots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .exact import ExtContext, ZeroDivisorSplit, decide_zero, is_rational
from .poly import MultiPoly, UniPoly, integer_roots
from .elimination import SecondOrderAODE, derive_second_order
from .separable import (
    CandidateSet,
    SeparableEq,
    build_system,
    constant_candidates,
    equal_sides,
)
from .towers import refine_world


@dataclass(frozen=True)
class TildeForm:
    """F(y, y+z, y+2z+w): same total degree, difference-operator variables."""

    poly: MultiPoly          # in (y, z, w)
    degree: int


def tilde_transform(F: SecondOrderAODE) -> TildeForm:
    v0, v1, v2 = F.steps
    vars = ("y", "z", "w")
    y = MultiPoly.var(vars, "y")
    z = MultiPoly.var(vars, "z")
    w = MultiPoly.var(vars, "w")
    poly = F.poly.subs({v0: y, v1: y + z, v2: y + 2 * z + w})
    poly = poly.with_vars(vars)
    if poly.is_zero or not poly.is_homogeneous():
        raise AssertionError("difference substitution must preserve homogeneity")
    return TildeForm(poly, poly.total_degree())


@dataclass(frozen=True)
class IndicialPolynomial:
    weight: int              # minimal i2 + 2*i3 over the support
    attainers: tuple         # exponent triples achieving the weight
    poly: UniPoly            # in t; nonzero


def indicial_polynomial(T: TildeForm) -> IndicialPolynomial:
    iy = T.poly.vars.index("y")
    iz = T.poly.vars.index("z")
    iw = T.poly.vars.index("w")
    weight = min(e[iz] + 2 * e[iw] for e in T.poly.terms)
    attainers = tuple(sorted(
        (e[iy], e[iz], e[iw]) for e in T.poly.terms
        if e[iz] + 2 * e[iw] == weight))
    t = UniPoly.x("t")
    tt1 = t * (t - 1)
    p = UniPoly("t")
    for e, c in T.poly.terms.items():
        if e[iz] + 2 * e[iw] != weight:
            continue
        p = p + (t ** e[iz] * tt1 ** e[iw]).scale(c)
    if p.is_zero:
        raise AssertionError("indicial polynomial vanished; this contradicts "
                             "its nonvanishing guarantee")
    return IndicialPolynomial(weight, attainers, p)


def nonneg_integer_roots(p: UniPoly):
    """Non-negative integer roots, exactly, over Q or an extension.

    Over Q this is root isolation; over an extension the polynomial is
    evaluated at every integer up to a numeric upper bound for the Cauchy
    bound (a safe overshoot only costs extra exact evaluations).
    """
    ctx = p.extension_context()
    if ctx is None:
        return sorted(int(r) for r in integer_roots(p) if r >= 0)
    if decide_zero(p.lc()):
        raise AssertionError("leading coefficient vanished")
    import mpmath

    roots = ctx.numeric_roots(50)
    d = p.degree
    bound = mpmath.mpf(0)
    for r in roots:
        lead = abs(_eval_numeric(p.coeffs[d], r)) if d in p.coeffs else None
        m = max((abs(_eval_numeric(c, r)) for e, c in p.coeffs.items() if e != d),
                default=mpmath.mpf(0))
        if lead is None or lead == 0:
            continue
        bound = max(bound, 1 + m / lead)
    limit = int(bound * (1 + mpmath.mpf("1e-20"))) + 2
    if limit > 100000:
        raise AssertionError("implausible integer-root bound %d" % limit)
    out = []
    for k in range(0, limit + 1):
        if decide_zero(p.evaluate(mpq(k))):
            out.append(k)
    return out


def _eval_numeric(c, root):
    import mpmath

    if is_rational(c):
        return mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
    return c.evaluate_numeric(root)


def poly_degree_bound(F: SecondOrderAODE):
    """All admissible degrees for nonzero polynomial solutions of F."""
    return nonneg_integer_roots(indicial_polynomial(tilde_transform(F)).poly)


@dataclass
class BranchReport:
    candidate: object
    roots_a: list
    roots_b: list
    split_of: object = None


@dataclass
class BoundReport:
    bound: int
    all_constants: bool
    candidates: CandidateSet | None
    branches: list = field(default_factory=list)


def separable_degree_bound(eq: SeparableEq) -> BoundReport:
    """Upper bound for max(deg num, deg den) of rational solutions.

    Zero for the equal-sides equation; otherwise the maximum non-negative
    integer indicial root over all nonzero candidate branches, for both the
    numerator and denominator relations.
    """
    if equal_sides(eq):
        return BoundReport(0, True, None)
    cands = constant_candidates(eq)
    n = 0
    reports = []
    for branch in cands.nonzero_branches():
        sub = _branch_bound(eq, branch.value, branch.embed, branch.value)
        for rep in sub:
            n = max([n] + rep.roots_a + rep.roots_b)
            reports.append(rep)
    return BoundReport(n, False, cands, reports)


def _branch_bound(eq: SeparableEq, c, embed, label):
    """Indicial roots for one candidate constant, splitting as needed."""
    try:
        system = build_system(eq, c, embed=lambda p: p.map_coeffs(embed))
        fa, fb = derive_second_order(system)
        roots_a = nonneg_integer_roots(indicial_polynomial(tilde_transform(fa)).poly)
        roots_b = nonneg_integer_roots(indicial_polynomial(tilde_transform(fb)).poly)
        return [BranchReport(label, roots_a, roots_b)]
    except ZeroDivisorSplit as exc:
        out = []
        for sub in refine_world(exc):
            c2 = sub.embed(c) if not is_rational(c) else mpq(c)
            emb2 = (lambda x, s=sub, e=embed: s.embed(e(x)))
            out.extend(_branch_bound(eq, c2, emb2, label))
        return out
