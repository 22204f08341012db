"""Zero-dimensional-ish polynomial system solving over Q with algebraic
back-substitution.

The solver first runs a linear cascade (repeatedly eliminating unknowns that
occur linearly with an invertible constant coefficient), then triangularizes
the residual system by lexicographic Groebner bases, adjoining algebraic
numbers branch by branch.  Components of positive dimension (which arise
from non-coprime or constant paddings of an ansatz) are sliced by
specializing unconstrained variables to zero; every specialization is
recorded so callers can tell exact points from slice representatives.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .exact import ExtContext, QZERO, ZeroDivisorSplit, decide_zero, inv, is_rational
from .poly import MultiPoly, UniPoly
from .elimination import MonomialOrder, buchberger
from .towers import adjoin_root, refine_world


@dataclass
class SystemSolution:
    """One solution branch.

    ``embed`` maps scalars of the original input world into ``ctx``'s world;
    ``specialized`` lists variables that were set to zero for lack of any
    constraint (slice representatives of positive-dimensional components).
    """

    ctx: ExtContext | None
    assignment: dict
    embed: object
    specialized: tuple = ()


class SolveBudget(Exception):
    """Raised when the triangular search exceeds its branch budget."""


def _identity(c):
    return c


def solve_system(eqs, variables, ctx=None, branch_budget: int = 4000,
                 pair_limit: int = 60000):
    """All solutions of the system, as per-branch assignments.

    ``variables`` are triangularized in the given order (last one solved
    first).  Solutions on components where some variable is unconstrained
    are represented by zero-slices and flagged via ``specialized``.
    """
    variables = list(variables)
    state = _State(branch_budget, pair_limit)
    eqs = [e.with_vars(tuple(variables)) for e in eqs]
    return _solve_world(eqs, variables, ctx, _identity, state)


@dataclass
class _State:
    branch_budget: int
    pair_limit: int
    branches: int = 0

    def tick(self):
        self.branches += 1
        if self.branches > self.branch_budget:
            raise SolveBudget("triangular search exceeded %d branches"
                              % self.branch_budget)


def _solve_world(eqs, variables, ctx, emb, state):
    """Cascade + triangularization inside one arithmetic world."""
    state.tick()
    try:
        solved, residual, resvars = _linear_cascade(eqs, variables)
        # the inner embeds map this world into the solution's world
        sols = _triangular(residual, resvars, ctx, {}, _identity, state)
    except ZeroDivisorSplit as exc:
        out = []
        for branch in refine_world(exc):
            eqs2 = [branch.embed_multi(e) for e in eqs]
            emb2 = _compose(branch.embed, emb)
            out.extend(_solve_world(eqs2, variables, branch.ctx, emb2, state))
        return out
    out = []
    for sol in sols:
        assignment = dict(sol.assignment)
        for v, expr in reversed(solved):
            if sol.embed is not _identity:
                expr = expr.map_coeffs(sol.embed)
            val = expr.evaluate({u: assignment[u] for u in expr.vars})
            assignment[v] = mpq(val) if is_rational(val) else val
        out.append(SystemSolution(sol.ctx, assignment,
                                  _compose(sol.embed, emb), sol.specialized))
    return out


def _compose(outer, inner):
    if inner is _identity:
        return outer
    return lambda c: outer(inner(c))


def _linear_cascade(eqs, variables):
    """Eliminate unknowns occurring linearly with constant coefficients.

    Returns (solved, residual_eqs, residual_vars); ``solved`` is ordered and
    each expression only references residual variables.
    """
    eqs = [e for e in eqs if not e.is_zero]
    variables = list(variables)
    solved = []
    changed = True
    while changed:
        changed = False
        for eq in eqs:
            eqr = eq.restrict_vars()
            if eqr.is_constant:
                continue
            for v in eqr.vars:
                if eqr.degree_in(v) != 1:
                    continue
                coeffs = eqr.univar_coeffs(v)
                lead = coeffs[1].restrict_vars()
                if not lead.is_constant:
                    continue
                c = lead.constant()
                if not is_rational(c) and decide_zero(c):
                    continue
                rest = coeffs.get(0)
                expr = (-(rest) * inv(c)) if rest is not None else \
                    MultiPoly(tuple(u for u in eqr.vars if u != v))
                new_eqs = []
                for other in eqs:
                    if other is eq:
                        continue
                    if other.degree_in(v) > 0:
                        other = other.subs({v: expr})
                    new_eqs.append(other)
                solved = [(u, ex.subs({v: expr}) if ex.degree_in(v) > 0 else ex)
                          for u, ex in solved]
                solved.append((v, expr))
                variables.remove(v)
                eqs = [e for e in new_eqs if not e.is_zero]
                changed = True
                break
            if changed:
                break
    return solved, eqs, variables


def _substitute_all(eqs, v, value):
    out = []
    for e in eqs:
        if e.degree_in(v) > 0:
            e = e.subs({v: value})
        if not e.is_zero:
            out.append(e)
    return out


def _triangular(eqs, variables, ctx, partial, emb, state):
    state.tick()
    try:
        return _triangular_inner(eqs, variables, ctx, partial, emb, state)
    except ZeroDivisorSplit as exc:
        out = []
        for branch in refine_world(exc):
            eqs2 = [branch.embed_multi(e) for e in eqs]
            partial2 = {k: branch.embed(v) if not is_rational(v) else mpq(v)
                        for k, v in partial.items()}
            emb2 = _compose(branch.embed, emb)
            out.extend(_triangular(eqs2, variables, branch.ctx, partial2, emb2, state))
        return out


def _triangular_inner(eqs, variables, ctx, partial, emb, state):
    live = []
    for e in eqs:
        er = e.restrict_vars()
        if er.is_constant:
            if decide_zero(er.constant()):
                continue
            return []
        live.append(e)
    if not variables:
        return [SystemSolution(ctx, dict(partial), emb)]
    if not live:
        assignment = dict(partial)
        for v in variables:
            assignment[v] = QZERO
        return [SystemSolution(ctx, assignment, emb, tuple(variables))]

    order = MonomialOrder(tuple(variables), "lex")
    basis = buchberger(live, order, pair_limit=state.pair_limit)
    if len(basis) == 1 and basis[0].restrict_vars().is_constant:
        return []

    v = variables[-1]
    univ = None
    for g in basis:
        gr = g.restrict_vars()
        if set(gr.vars) <= {v} and gr.degree_in(v) > 0:
            univ = gr.to_unipoly(v)
            break

    if univ is None:
        sliced = _substitute_all(basis, v, QZERO)
        sols = _triangular(sliced, variables[:-1], ctx, partial, emb, state)
        return [SystemSolution(s.ctx, dict(s.assignment, **{v: QZERO}),
                               s.embed, s.specialized + (v,))
                for s in sols]

    out = []
    for branch in adjoin_root(univ, ctx):
        state.tick()
        eqs2 = [branch.embed_multi(e) for e in basis]
        partial2 = {k: branch.embed(val) if not is_rational(val) else mpq(val)
                    for k, val in partial.items()}
        eqs2 = _substitute_all(eqs2, v, branch.root)
        partial2[v] = branch.root
        emb2 = _compose(branch.embed, emb)
        out.extend(_triangular(eqs2, variables[:-1], branch.ctx, partial2, emb2, state))
    return out
