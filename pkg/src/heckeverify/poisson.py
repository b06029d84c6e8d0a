"""The commutative Poisson algebra B_n = Gr U_z and its checks.

B_n is C[e, f, h, x, y] modulo ``r = e y^2 + h x y - f x^2 + rho Delta^(n+1)``
with ``Delta = h^2 + 4 e f``, and bracket table

    {h, e} = 2e    {h, f} = -2f    {e, f} = h
    {e, x} = 0     {f, x} = y      {h, x} = x
    {e, y} = x     {f, y} = 0      {h, y} = -y
    {x, y} = kappa Delta^n

The printed table has ``kappa = 2n + 1`` and ``rho = -1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from .algebra_zoo import Check, derive_z, make_hz, t_element
from .exact_poly import CoefPoly, divmod_poly, exact_divide
from .rewrite_engine import NCExpr, Presentation

__all__ = [
    "PoissonError",
    "PoissonAlg",
    "BN_VARS",
    "make_bn",
    "bn_delta",
    "consistent_rho",
    "poisson_bracket",
    "reduce_mod",
    "jacobi_check",
    "in_xy_delta",
    "poisson_ideal_check",
    "relation_ideal_check",
    "kleinian_slice_check",
    "commutative_symbol",
    "semiclassical_check",
    "gr_relation",
]

BN_VARS = ("e", "f", "h", "x", "y")


class PoissonError(ValueError):
    pass


@dataclass
class PoissonAlg:
    vars: Tuple[str, ...]
    table: Dict[Tuple[str, str], CoefPoly]
    relations: List[CoefPoly]
    name: str = ""

    def __post_init__(self):
        for (a, b), v in list(self.table.items()):
            if (b, a) in self.table and self.table[(b, a)] != -v:
                raise PoissonError(f"bracket table not antisymmetric on ({a}, {b})")
        for r in self.relations:
            if not r:
                raise PoissonError("zero relation")

    def var(self, name: str) -> CoefPoly:
        if name not in self.vars:
            raise PoissonError(f"unknown variable {name!r}")
        return CoefPoly.var(name, self.vars)

    def bracket_gen(self, a: str, b: str) -> CoefPoly:
        if a == b:
            return CoefPoly.zero(self.vars)
        if (a, b) in self.table:
            return self.table[(a, b)]
        if (b, a) in self.table:
            return -self.table[(b, a)]
        raise PoissonError(f"no bracket for ({a}, {b})")

    @property
    def relation(self) -> CoefPoly:
        return self.relations[0]


def bn_delta(vars: Sequence[str] = BN_VARS) -> CoefPoly:
    e, f, h = (CoefPoly.var(v, vars) for v in ("e", "f", "h"))
    return h * h + 4 * e * f


def consistent_rho(n: int, kappa) -> Fraction:
    """The relation coefficient making the relation a Poisson ideal: ``kappa / (2n+2)``."""
    return Fraction(kappa) / (2 * n + 2)


def make_bn(n: int, kappa=None, rho=None) -> PoissonAlg:
    """B_n with ``{x, y} = kappa Delta^n`` and relation ``e y^2 + h x y - f x^2 + rho Delta^(n+1)``.

    Defaults are the printed values ``kappa = 2n + 1`` and ``rho = -1``.
    """
    if n < 1:
        raise PoissonError("n must be positive")
    kappa = Fraction(2 * n + 1) if kappa is None else Fraction(kappa)
    rho = Fraction(-1) if rho is None else Fraction(rho)
    V = BN_VARS
    e, f, h, x, y = (CoefPoly.var(v, V) for v in V)
    D = bn_delta(V)
    zero = CoefPoly.zero(V)
    table = {
        ("h", "e"): 2 * e,
        ("h", "f"): -2 * f,
        ("e", "f"): h,
        ("e", "x"): zero,
        ("f", "x"): y,
        ("h", "x"): x,
        ("e", "y"): x,
        ("f", "y"): zero,
        ("h", "y"): -y,
        ("x", "y"): kappa * D ** n,
    }
    r = e * y * y + h * x * y - f * x * x + rho * D ** (n + 1)
    return PoissonAlg(V, table, [r], name=f"B_{n}(kappa={kappa}, rho={rho})")


def poisson_bracket(p: CoefPoly, q: CoefPoly, alg: PoissonAlg) -> CoefPoly:
    """``sum_{i,j} dp/dx_i dq/dx_j {x_i, x_j}``."""
    for poly in (p, q):
        extra = set(poly.used_vars()) - set(alg.vars)
        if extra:
            raise PoissonError(f"unknown variables {sorted(extra)}")
    p, q = p.with_vars(alg.vars), q.with_vars(alg.vars)
    dp = {v: p.derivative(v) for v in alg.vars}
    dq = {v: q.derivative(v) for v in alg.vars}
    out = CoefPoly.zero(alg.vars)
    for a in alg.vars:
        if not dp[a]:
            continue
        for b in alg.vars:
            if a == b or not dq[b]:
                continue
            out = out + dp[a] * dq[b] * alg.bracket_gen(a, b)
    return out


def reduce_mod(p: CoefPoly, relation: CoefPoly) -> CoefPoly:
    """Remainder of ``p`` modulo the principal ideal ``(relation)``.

    For a single divisor the division remainder is zero iff the divisor
    divides ``p``; a zero remainder is re-certified by exact division.
    """
    _, r = divmod_poly(p, relation)
    if not r:
        exact_divide(p.with_vars(r.vars), relation.with_vars(r.vars))
    return r


def jacobi_check(alg: PoissonAlg) -> List[Check]:
    """``J(a,b,c)`` modulo the relation for all 10 triples of distinct generators."""
    out = []
    for a, b, c in combinations(alg.vars, 3):
        A, B, C = (alg.var(v) for v in (a, b, c))
        br = lambda p, q: poisson_bracket(p, q, alg)
        J = br(A, br(B, C)) + br(B, br(C, A)) + br(C, br(A, B))
        out.append(Check(f"J({a},{b},{c})", reduce_mod(J, alg.relation)))
    return out


def in_xy_delta(g: CoefPoly, vars: Sequence[str] = BN_VARS) -> CoefPoly:
    """Remainder witness for membership of ``g`` in ``(x, y, Delta)``: zero iff member."""
    g = g.with_vars(tuple(vars))
    g0 = g.subs({"x": 0, "y": 0})
    _, r = divmod_poly(g0, bn_delta(g.vars))
    return r


def poisson_ideal_check(alg: PoissonAlg, gens: Sequence[CoefPoly] | None = None) -> List[Check]:
    """Is ``(x, y, Delta)`` (or the ideal spanned by ``gens``) closed under brackets with generators?"""
    if gens is None:
        gens = [alg.var("x"), alg.var("y"), bn_delta(alg.vars)]
        names = ["x", "y", "Delta"]
    else:
        names = [str(g) for g in gens]
    out = []
    for gname, g in zip(names, gens):
        for v in alg.vars:
            res = in_xy_delta(poisson_bracket(g, alg.var(v), alg), alg.vars)
            out.append(Check(f"{{{gname},{v}}} in (x,y,Delta)", res))
    return out


def relation_ideal_check(alg: PoissonAlg) -> List[Check]:
    """``{r, v}`` lies in ``(r)`` for every generator ``v``."""
    r = alg.relation
    return [Check(f"{{r,{v}}} in (r)", reduce_mod(poisson_bracket(r, alg.var(v), alg), r))
            for v in alg.vars]


def kleinian_slice_check(n: int, rho=None) -> Check:
    """``C^2 - Delta (A^2/4 + Delta^n)`` modulo the relation, with ``e = s^2``.

    ``A = x/s`` and ``C = s y + h x/(2s)``; the identity is multiplied by
    ``s^2`` to stay polynomial, and the relation is taken with ``e = s^2``.
    """
    rho = Fraction(-1) if rho is None else Fraction(rho)
    V = ("s", "f", "h", "x", "y")
    s, f, h, x, y = (CoefPoly.var(v, V) for v in V)
    e = s * s
    D = h * h + 4 * e * f
    half = Fraction(1, 2)
    sC = s * s * y + half * h * x          # s * C
    sA = x                                 # s * A
    lhs = sC * sC - D * (Fraction(1, 4) * sA * sA + s * s * D ** n)
    rel = e * y * y + h * x * y - f * x * x + rho * D ** (n + 1)
    return Check(f"C^2-Delta(A^2/4+Delta^{n}) mod r", reduce_mod(lhs, rel),
                 detail=f"rho={rho}")


def commutative_symbol(p: Presentation, x: NCExpr, vars: Sequence[str] = BN_VARS) -> CoefPoly:
    """Forget the order of letters: word -> monomial."""
    vars = tuple(vars)
    out = CoefPoly.zero(vars)
    for w, c in x.items():
        mono = CoefPoly.const(1, vars)
        for name, k in p.factors(w):
            if k < 0:
                raise PoissonError("negative exponent in a commutative symbol")
            mono = mono * CoefPoly.var(name, vars) ** k
        coef = c if not isinstance(c, CoefPoly) else c.constant_term()
        out = out + mono * coef
    return out


def semiclassical_check(n: int, sign: int | None = None) -> Tuple[List[Check], int | None]:
    """Compare symbols of commutators in H_z' (``z' = (2n+1) Delta^n``) with B_n brackets.

    For each generator pair the component of weight ``deg a + deg b - 2`` of
    ``[a, b]`` is compared with ``sign * {a, b}``.  With ``sign=None`` the
    sign is searched (+1 first) and the one that matches every pair is
    returned as the bracket convention.
    """
    D = CoefPoly.var("Delta", ("Delta",))
    H = make_hz(n, (2 * n + 1) * D ** n)
    B = make_bn(n)
    pairs = list(combinations(B.vars, 2))

    def run(sg: int) -> List[Check]:
        out = []
        for a, b in pairs:
            com = H.commutator(H.gen(a), H.gen(b))
            deg = H.generators[H.gen_index(a)].weight + H.generators[H.gen_index(b)].weight - 2
            sym = commutative_symbol(H, H.component(com, deg))
            out.append(Check(f"sym[{a},{b}]={{{a},{b}}}", sym - sg * B.bracket_gen(a, b)))
        return out

    if sign is not None:
        return run(sign), sign
    for sg in (1, -1):
        checks = run(sg)
        if all(c.vanishes for c in checks):
            return checks, sg
    return run(1), None


def gr_relation(n: int, zprime: CoefPoly, z: CoefPoly | None = None) -> CoefPoly:
    """Top-weight commutative symbol of ``t_z`` in H_z'."""
    z = derive_z(n, zprime) if z is None else z
    H = make_hz(n, zprime)
    t = t_element(H, z)
    return commutative_symbol(H, H.component(t, H.top_degree(t)))
