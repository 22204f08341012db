"""Root adjunction with dynamic evaluation.

Adjoining a root of a squarefree polynomial never factors it: over Q the
rational roots are split off and every remaining squarefree factor becomes an
extension modulus directly.  Adjoining a root on top of an existing extension
collapses the would-be tower into a single context through a primitive
element (gamma = new_root + k * old_generator), so all arithmetic stays in
one ``Q[a]/(m)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .exact import (
    ExtContext,
    ExtElem,
    QONE,
    ZeroDivisorSplit,
    is_rational,
    project_scalar,
)
from .poly import (
    MultiPoly,
    UniPoly,
    poly_gcd,
    rational_roots,
    squarefree_decomposition,
    squarefree_part,
)
from .elimination import resultant


@dataclass
class RootBranch:
    """One branch of adjoining a root: the world it lives in and the root.

    ``ctx`` is None when the branch world is plain Q.  ``embed`` maps scalars
    of the previous world into this branch's world.
    """

    ctx: ExtContext | None
    root: object            # mpq or ExtElem in the branch world
    embed: object           # callable scalar -> scalar

    def embed_poly(self, p: UniPoly) -> UniPoly:
        return p.map_coeffs(self.embed)

    def embed_multi(self, p: MultiPoly) -> MultiPoly:
        return p.map_coeffs(self.embed)


def _identity(c):
    return c


def adjoin_root(p: UniPoly, ctx: ExtContext | None) -> list:
    """All branches for a root of ``p`` over the current world.

    ``p`` is a nonconstant polynomial with coefficients in the world of
    ``ctx`` (rationals when ctx is None).  May raise
    :class:`ZeroDivisorSplit` when squarefree-ing over a reducible modulus;
    the caller owns the branch-and-retry loop.
    """
    if p.degree < 1:
        raise ValueError("cannot adjoin a root of a constant")
    if ctx is None:
        return _adjoin_over_q(p)
    return _adjoin_over_ext(p, ctx)


def _adjoin_over_q(p: UniPoly) -> list:
    branches = []
    seen_roots = set()
    seen_moduli = set()
    for factor, _mult in squarefree_decomposition(p.primitive().monic()):
        rem = factor
        for r in rational_roots(factor):
            if r not in seen_roots:
                seen_roots.add(r)
                branches.append(RootBranch(None, r, _identity))
            rem = rem.exact_div(UniPoly(p.var, {0: -r, 1: QONE}))
        if rem.degree >= 2:
            rem = rem.monic()
            if rem not in seen_moduli:
                seen_moduli.add(rem)
                cx = ExtContext(rem.dense(), var="a")
                branches.append(RootBranch(cx, cx.gen(), lambda c, cx=cx: cx.lift(c)))
    return branches


def _ext_poly_to_bivariate(p: UniPoly, ctx: ExtContext, gen_name: str) -> MultiPoly:
    """Rewrite an extension-coefficient polynomial as a bivariate over Q."""
    vars = (gen_name, p.var)
    terms = {}
    for e, c in p.coeffs.items():
        if is_rational(c):
            terms[(0, e)] = terms.get((0, e), mpq(0)) + c
        else:
            for i, q in enumerate(c.rep):
                if q:
                    terms[(i, e)] = terms.get((i, e), mpq(0)) + q
    return MultiPoly(vars, terms)


def _adjoin_over_ext(p: UniPoly, ctx: ExtContext) -> list:
    # squarefree over the current world (may raise ZeroDivisorSplit)
    p = p.map_coeffs(lambda c: ctx.lift(c))
    g = poly_gcd(p, p.derivative())
    if g.degree > 0:
        p = p.exact_div(g)
    p = p.monic()
    if p.degree == 1:
        return [RootBranch(ctx, -p[0], _identity)]

    gen = "s_"
    m1 = MultiPoly.from_unipoly(
        UniPoly(gen, dict(enumerate(ctx.modulus))), (gen, p.var))
    biv = _ext_poly_to_bivariate(p, ctx, gen)
    tname = "t_"
    for k in range(0, 64):
        for kk in (k, -k) if k else (0,):
            shifted = biv.subs({p.var: MultiPoly.var((gen, tname), tname)
                                - mpq(kk) * MultiPoly.var((gen, tname), gen)})
            mg = resultant(m1.with_vars((gen, tname)), shifted, gen)
            mg_uni = mg.restrict_vars()
            if mg_uni.is_zero:
                continue
            mg_uni = mg_uni.to_unipoly(tname) if mg_uni.vars else UniPoly.const(tname, mg_uni.constant())
            if mg_uni.degree < 1:
                continue
            sq = squarefree_part(mg_uni)
            if sq.degree == mg_uni.degree:
                return _collapse_branches(p, ctx, mg_uni.monic(), mpq(kk))
    raise AssertionError("no separating primitive element found")


def _collapse_branches(p: UniPoly, ctx: ExtContext, mg: UniPoly, k) -> list:
    out = []
    for gb in _adjoin_over_q(mg):
        gamma = gb.root
        # locate the old generator inside the new world: it is the unique
        # common root of the old modulus and p(gamma - k*u)
        u = "u_"
        m1u = UniPoly(u, {e: gb.embed(mpq(c)) for e, c in enumerate(ctx.modulus) if c})
        arg = UniPoly(u, {0: gamma, 1: -k}) if k else UniPoly.const(u, gamma)
        pu = UniPoly(u)
        for e, c in p.coeffs.items():
            if is_rational(c):
                cc = UniPoly.const(u, gb.embed(c))
            else:
                # the old generator becomes the unknown u
                cc = UniPoly(u, {i: gb.embed(q) for i, q in enumerate(c.rep) if q})
            pu = pu + cc * (arg ** e)
        common = poly_gcd(m1u, pu)
        if common.degree != 1:
            raise AssertionError("primitive element did not separate")
        s_expr = -common[0] / common[1]

        def embed(c, _s=s_expr, _g=gb):
            if is_rational(c):
                return _g.embed(c)
            acc = _g.embed(mpq(0)) if _g.ctx is not None else mpq(0)
            for q in reversed(c.rep):
                acc = acc * _s + _g.embed(q)
            return acc

        root = gamma - k * s_expr if k else gamma
        out.append(RootBranch(gb.ctx, root, embed))
    return out


def refine_world(exc: ZeroDivisorSplit) -> list:
    """Branches induced by a zero-divisor split of the current modulus."""
    out = []
    for target in exc.contexts:
        if isinstance(target, ExtContext):
            out.append(RootBranch(target, target.gen(),
                                  lambda c, t=target: project_scalar(c, t)))
        else:
            out.append(RootBranch(None, mpq(target),
                                  lambda c, t=target: project_scalar(c, t)))
    return out
