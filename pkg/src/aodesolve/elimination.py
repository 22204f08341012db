"""Resultants, Groebner bases, and elimination of one sequence from the
coupled first-order difference system.

The resultant is computed by a subresultant polynomial remainder sequence to
control coefficient growth; a fraction-free Sylvester determinant is kept as
an independent oracle for the tests.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .exact import QONE, QZERO, inv, is_rational
from .poly import (
    MultiPoly,
    UniPoly,
    _align,
    _union,
    mp_exact_div,
    mp_squarefree_part,
    prem,
)


# ---------------------------------------------------------------------------
# resultants
# ---------------------------------------------------------------------------

def resultant(f: MultiPoly, g: MultiPoly, name: str) -> MultiPoly:
    """Resultant of f and g with respect to ``name`` (subresultant PRS).

    Equals the determinant of the Sylvester matrix; at least one input must
    have positive degree in the variable.
    """
    if f.is_zero or g.is_zero:
        raise ValueError("resultant of the zero polynomial")
    f, g = _align(f, g)
    df, dg = f.degree_in(name), g.degree_in(name)
    if df <= 0 and dg <= 0:
        raise ValueError("resultant arguments constant in %s" % name)
    if df == 0:
        return f ** dg
    if dg == 0:
        return g ** df
    sign = 1
    A, B = f, g
    if df < dg:
        A, B = B, A
        if (df * dg) % 2:
            sign = -sign
        df, dg = dg, df
    one = MultiPoly.const(A.vars, QONE)
    gg, hh = one, one
    while True:
        da, db = A.degree_in(name), B.degree_in(name)
        delta = da - db
        if (da % 2) and (db % 2):
            sign = -sign
        R = prem(A, B, name)
        A = B
        if R.is_zero:
            return MultiPoly(A.vars)
        B = mp_exact_div(R, gg * hh ** delta)
        gg = _lead_coeff_in(A, name)
        if delta == 0:
            pass
        elif delta == 1:
            hh = gg
        else:
            hh = mp_exact_div(gg ** delta, hh ** (delta - 1))
        if B.degree_in(name) <= 0:
            break
    da = A.degree_in(name)
    if da == 0:
        raise AssertionError("degenerate remainder sequence")
    res = mp_exact_div(B ** da, hh ** (da - 1)) if da > 1 else B
    if sign < 0:
        res = -res
    return res


def _lead_coeff_in(p: MultiPoly, name: str) -> MultiPoly:
    d = p.degree_in(name)
    i = p.vars.index(name)
    return MultiPoly(p.vars, {e[:i] + (0,) + e[i + 1:]: c
                              for e, c in p.terms.items() if e[i] == d})


def sylvester_matrix(f: MultiPoly, g: MultiPoly, name: str):
    f, g = _align(f, g)
    m, n = f.degree_in(name), g.degree_in(name)
    fc = f.univar_coeffs(name)
    gc = g.univar_coeffs(name)
    rest = tuple(v for v in f.vars if v != name)
    zero = MultiPoly(rest)

    def row(coeffs, deg, offset):
        return [coeffs.get(deg - (j - offset), zero) if 0 <= j - offset <= deg else zero
                for j in range(m + n)]

    rows = [row(fc, m, i) for i in range(n)]
    rows += [row(gc, n, i) for i in range(m)]
    return rows


def sylvester_resultant(f: MultiPoly, g: MultiPoly, name: str) -> MultiPoly:
    """Resultant as a fraction-free (Bareiss) Sylvester determinant.

    Test oracle for :func:`resultant`; quadratic-size matrix, so only meant
    for small inputs.
    """
    rows = sylvester_matrix(f, g, name)
    n = len(rows)
    if n == 0:
        raise ValueError("resultant arguments constant in %s" % name)
    vars = rows[0][0].vars if rows[0] else ()
    sign = 1
    prev = MultiPoly.const(vars, QONE)
    for k in range(n - 1):
        if rows[k][k].is_zero:
            for i in range(k + 1, n):
                if not rows[i][k].is_zero:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return MultiPoly(vars)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = rows[k][k] * rows[i][j] - rows[i][k] * rows[k][j]
                rows[i][j] = mp_exact_div(num, prev)
            rows[i][k] = MultiPoly(vars)
        prev = rows[k][k]
    det = rows[n - 1][n - 1]
    return -det if sign < 0 else det


def resultant_commutes_check(f: MultiPoly, g: MultiPoly, name: str,
                             point: dict) -> bool:
    """Oracle: resultant-then-substitute equals substitute-then-resultant.

    ``point`` assigns scalars to every variable except ``name``; the check is
    meaningful when the leading coefficients do not vanish at the point.
    """
    r = resultant(f, g, name)
    lhs = r.subs(point)
    fs = f.subs(point)
    gs = g.subs(point)
    rhs = resultant(fs, gs, name)
    return (lhs - rhs).is_zero


# ---------------------------------------------------------------------------
# Groebner bases (Buchberger, normal selection, both criteria)
# ---------------------------------------------------------------------------

class MonomialOrder:
    """A monomial order over a fixed variable tuple.

    ``kind`` is "grevlex" or "lex"; for lex, ``ranking`` lists the variables
    from highest to lowest (default: the tuple order).
    """

    def __init__(self, vars, kind: str = "grevlex", ranking=None):
        self.vars = tuple(vars)
        self.kind = kind
        if kind == "lex":
            ranking = tuple(ranking) if ranking is not None else self.vars
            self._perm = tuple(self.vars.index(v) for v in ranking)
        elif kind != "grevlex":
            raise ValueError("unknown order %r" % kind)

    def key(self, e):
        if self.kind == "grevlex":
            return (sum(e), tuple(-x for x in reversed(e)))
        return tuple(e[i] for i in self._perm)


def elimination_order(vars, eliminate) -> MonomialOrder:
    eliminate = [v for v in vars if v in set(eliminate)]
    keep = [v for v in vars if v not in set(eliminate)]
    return MonomialOrder(vars, "lex", ranking=eliminate + keep)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _reduce_terms(terms: dict, basis, order, vars) -> dict:
    out = {}
    work = dict(terms)
    while work:
        lt = max(work, key=order.key)
        for ge, ginv, gterms in basis:
            if _divides(ge, lt):
                q = work[lt] * ginv
                diff = tuple(a - b for a, b in zip(lt, ge))
                for e, c in gterms:
                    t = tuple(a + b for a, b in zip(diff, e))
                    s = work.get(t, QZERO) - q * c
                    if s:
                        work[t] = s
                    else:
                        work.pop(t, None)
                break
        else:
            out[lt] = work.pop(lt)
    return out


def reduce_poly(f: MultiPoly, basis_polys, order: MonomialOrder) -> MultiPoly:
    """Fully reduce f modulo a list of polynomials under the given order."""
    if f.is_zero:
        return f
    vars = order.vars
    f = f.with_vars(vars)
    basis = []
    for g in basis_polys:
        g = g.with_vars(vars)
        if g.is_zero:
            continue
        ge = max(g.terms, key=order.key)
        basis.append((ge, inv(g.terms[ge]), list(g.terms.items())))
    return MultiPoly(vars, _reduce_terms(f.terms, basis, order, vars))


class GroebnerLimit(Exception):
    """Raised when Buchberger exceeds its pair budget."""


def buchberger(gens, order: MonomialOrder, pair_limit: int = 200000):
    """Reduced Groebner basis via Buchberger with both classical criteria."""
    vars = order.vars
    polys = []
    for g in gens:
        g = g.with_vars(vars)
        if not g.is_zero:
            polys.append(g)
    if not polys:
        return []

    basis = []          # list of (ltexp, inv(lc), term-items)
    basis_terms = []    # parallel list of term dicts

    def insert(p_terms: dict):
        lt = max(p_terms, key=order.key)
        basis.append((lt, inv(p_terms[lt]), list(p_terms.items())))
        basis_terms.append(p_terms)
        return len(basis) - 1

    def lcm_exp(a, b):
        return tuple(max(x, y) for x, y in zip(a, b))

    pending = []        # heap of (total deg of lcm, lcm, i, j)
    pending_set = set()

    def push_pair(i, j):
        if i > j:
            i, j = j, i
        lij = lcm_exp(basis[i][0], basis[j][0])
        heapq.heappush(pending, (sum(lij), lij, i, j))
        pending_set.add((i, j))

    for p in polys:
        k = insert(dict(p.terms))
        for i in range(k):
            push_pair(i, k)

    processed = 0
    while pending:
        _, lij, i, j = heapq.heappop(pending)
        if (i, j) not in pending_set:
            continue
        pending_set.discard((i, j))
        processed += 1
        if processed > pair_limit:
            raise GroebnerLimit("pair budget exceeded (%d)" % pair_limit)
        lti, ltj = basis[i][0], basis[j][0]
        # first criterion: coprime leading monomials
        if all(a + b == c for a, b, c in zip(lti, ltj, lij)):
            continue
        # second (chain) criterion
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            if _divides(basis[k][0], lij):
                p1 = (min(i, k), max(i, k))
                p2 = (min(j, k), max(j, k))
                if p1 not in pending_set and p2 not in pending_set:
                    skip = True
                    break
        if skip:
            continue
        # s-polynomial
        di = tuple(a - b for a, b in zip(lij, lti))
        dj = tuple(a - b for a, b in zip(lij, ltj))
        s = {}
        qi = basis[i][1]
        for e, c in basis[i][2]:
            t = tuple(a + b for a, b in zip(di, e))
            s[t] = s.get(t, QZERO) + c * qi
        qj = basis[j][1]
        for e, c in basis[j][2]:
            t = tuple(a + b for a, b in zip(dj, e))
            v = s.get(t, QZERO) - c * qj
            if v:
                s[t] = v
            else:
                s.pop(t, None)
        s = _reduce_terms(s, basis, order, vars)
        if s:
            k = insert(s)
            for i2 in range(k):
                push_pair(i2, k)

    # interreduce to the unique reduced basis
    reduced = []
    items = [MultiPoly(vars, t) for t in basis_terms]
    # drop elements whose lead is divisible by another lead
    keep = []
    for idx, p in enumerate(items):
        lt = max(p.terms, key=order.key)
        dominated = False
        for jdx, q in enumerate(items):
            if jdx == idx:
                continue
            ltq = max(q.terms, key=order.key)
            if _divides(ltq, lt) and (ltq != lt or jdx < idx):
                dominated = True
                break
        if not dominated:
            keep.append(p)
    for idx, p in enumerate(keep):
        others = keep[:idx] + keep[idx + 1:]
        r = reduce_poly(p, others, order)
        if not r.is_zero:
            lt = max(r.terms, key=order.key)
            r = r.scale(inv(r.terms[lt]))
            reduced.append(r)
    reduced.sort(key=lambda p: order.key(max(p.terms, key=order.key)))
    return reduced


def eliminate(gens, keep) -> list:
    """Generators of (ideal cap ring in the kept variables) via lex."""
    keep = set(keep)
    vars = ()
    for g in gens:
        vars = _union(vars, g.vars)
    order = elimination_order(vars, [v for v in vars if v not in keep])
    G = buchberger(gens, order)
    out = []
    for g in G:
        g = g.restrict_vars()
        if set(g.vars) <= keep:
            out.append(g)
    return out


# ---------------------------------------------------------------------------
# the coupled difference system and its second-order consequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DifferenceSystem:
    """Homogenized two-sequence system with the constant folded into side 2.

    The four polynomials are homogeneous of common degree ``n`` in (z, w);
    the associated prolonged system relates steps x, x+1, x+2.
    """

    tp1: MultiPoly
    tq1: MultiPoly
    tp2: MultiPoly
    tq2: MultiPoly
    n: int

    def generators(self):
        """The four prolonged generators in K[w0,w1,w2,z0,z1,z2]."""
        zs = ("z0", "z1", "z2")
        ws = ("w0", "w1", "w2")

        def inject(p, i):
            return p.subs({"z": MultiPoly.var((zs[i],), zs[i]),
                           "w": MultiPoly.var((ws[i],), ws[i])})

        f1 = inject(self.tp1, 1) - inject(self.tp2, 0)
        g1 = inject(self.tq1, 1) - inject(self.tq2, 0)
        f2 = inject(self.tp1, 2) - inject(self.tp2, 1)
        g2 = inject(self.tq1, 2) - inject(self.tq2, 1)
        return f1, g1, f2, g2


@dataclass(frozen=True)
class SecondOrderAODE:
    """A nonzero homogeneous relation F(u(x), u(x+1), u(x+2)) = 0."""

    poly: MultiPoly          # in the three step variables, in order
    steps: tuple             # variable names for x, x+1, x+2

    def __post_init__(self):
        if self.poly.is_zero:
            raise ValueError("second-order relation must be nonzero")
        if not self.poly.is_homogeneous():
            raise ValueError("second-order relation must be homogeneous")


def _first_nonzero_eliminant(f1, g1, f2, g2, elim):
    """Nested-resultant route; None when it degenerates to zero."""
    e0, e2, e1 = elim
    s0 = resultant(f1, g1, e0) if max(f1.degree_in(e0), g1.degree_in(e0)) > 0 else None
    s2 = resultant(f2, g2, e2) if max(f2.degree_in(e2), g2.degree_in(e2)) > 0 else None
    for s in (s0, s2):
        if s is not None and not s.is_zero and s.degree_in(e1) <= 0:
            return s
    if s0 is None or s2 is None or s0.is_zero or s2.is_zero:
        return None
    res = resultant(s0, s2, e1)
    return None if res.is_zero else res


def derive_second_order(system: DifferenceSystem):
    """Nonzero second-order relations for the two sequences.

    Returns (F_A, F_B): F_A in K[z0,z1,z2] for the numerator sequence and
    F_B in K[w0,w1,w2] for the denominator sequence.  Eliminating the w's
    instead of the z's from the same generators realizes the coefficient
    reversal symmetry of the homogenized system, so one generator set serves
    both.  The nested-resultant route is tried first; on degeneration it
    falls back to Groebner elimination, and both failing contradicts the
    nonvanishing of the prolonged ideal's elimination ideals, so it aborts.
    """
    f1, g1, f2, g2 = system.generators()
    out = []
    for keepvars, elim in (
        (("z0", "z1", "z2"), ("w0", "w2", "w1")),
        (("w0", "w1", "w2"), ("z0", "z2", "z1")),
    ):
        t = _first_nonzero_eliminant(f1, g1, f2, g2, elim)
        if t is None:
            cands = [p for p in eliminate([f1, g1, f2, g2], keepvars) if not p.is_zero]
            if not cands:
                raise AssertionError(
                    "elimination returned no nonzero relation; "
                    "this contradicts the prolonged-ideal theorem")
            cands.sort(key=lambda p: (p.total_degree(), len(p.terms)))
            t = cands[0]
        t = t.restrict_vars().with_vars(keepvars)
        f = mp_squarefree_part(t).with_vars(keepvars)
        if f.extension_context() is None:
            f = f.primitive()
        out.append(SecondOrderAODE(f, keepvars))
    return out[0], out[1]
