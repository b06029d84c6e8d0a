"""Parameter dictionaries between the Hecke side and the type-D deformations.

Polynomials ``q``, ``p`` are CoefPolys in ``"x"``; ``Q``
and ``P`` are in ``"u"``; ``z`` and ``z'`` are in ``"Delta"``.  Every map
accepts extra parameter variables and carries them along.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Union

from .exact_poly import CoefPoly, align, compose, exact_divide, sqrt_bracket

__all__ = [
    "CorrespondenceError",
    "LambdaTuple",
    "MuList",
    "gamma_from_q",
    "p_numerator",
    "p_from_q",
    "Q_from_q",
    "mu_from_lambda",
    "q_from_mu",
    "Q_from_z",
    "consistency_check",
]

Value = Union[Fraction, CoefPoly]


class CorrespondenceError(ValueError):
    pass


@dataclass
class LambdaTuple:
    """``(lambda_a, lambda_b, lambda_1, ..., lambda_{n-1}, lambda_c, lambda_d)``."""

    a: Value
    b: Value
    inner: List[Value]
    c: Value
    d: Value

    @property
    def n(self) -> int:
        return len(self.inner) + 1

    def as_list(self) -> List[Value]:
        return [self.a, self.b, *self.inner, self.c, self.d]

    @classmethod
    def from_list(cls, values: Sequence[Value], n: int) -> "LambdaTuple":
        if len(values) != n + 3:
            raise CorrespondenceError(f"expected {n + 3} lambda values for n = {n}, got {len(values)}")
        v = list(values)
        return cls(v[0], v[1], v[2:n + 1], v[n + 1], v[n + 2])

    def __add__(self, other: "LambdaTuple") -> "LambdaTuple":
        if self.n != other.n:
            raise CorrespondenceError("lambda tuples of different length")
        return LambdaTuple(self.a + other.a, self.b + other.b,
                           [p + q for p, q in zip(self.inner, other.inner)],
                           self.c + other.c, self.d + other.d)


@dataclass
class MuList:
    values: List[Value] = field(default_factory=list)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __add__(self, other: "MuList") -> "MuList":
        return MuList([p + q for p, q in zip(self.values, other.values)])


def _x_poly(q: CoefPoly, var: str = "x") -> CoefPoly:
    if var not in q.vars:
        q = q.with_vars((var,) + q.vars)
    return q


def gamma_from_q(q: CoefPoly, var: str = "x") -> CoefPoly:
    """``gamma = -2 q(-1/2)``."""
    q = _x_poly(q, var)
    return -2 * q.subs({var: Fraction(-1, 2)})


def p_numerator(q: CoefPoly, var: str = "x") -> CoefPoly:
    """``-4 q(x) q(-x-1) + gamma^2``."""
    q = _x_poly(q, var)
    x = CoefPoly.var(var, q.vars)
    qq = compose(q, -x - 1, var).with_vars(q.vars)
    g = gamma_from_q(q, var).with_vars(q.vars)
    return -4 * q * qq + g * g


def p_from_q(q: CoefPoly, var: str = "x") -> CoefPoly:
    """``p(x) = (-4 q(x) q(-x-1) + gamma^2) / (1 + 2x)^2``, divided exactly."""
    num = p_numerator(q, var)
    x = CoefPoly.var(var, num.vars)
    return exact_divide(num, (1 + 2 * x) ** 2).with_vars(num.vars)


def Q_from_q(q: CoefPoly, var: str = "x", out_var: str = "u") -> CoefPoly:
    """``Q`` with ``Q(-u - 1/4) = [-sqrt(u) - p(sqrt(u))/2]`` (odd part in sqrt(u))."""
    q = _x_poly(q, var)
    p = p_from_q(q, var)
    x = CoefPoly.var(var, p.vars)
    g = -x - Fraction(1, 2) * p
    _, E = sqrt_bracket(g, var)
    params = tuple(v for v in E.vars if v != var)
    u = CoefPoly.var(out_var, (out_var,) + params)
    return compose(E, -u - Fraction(1, 4), var).with_vars((out_var,) + params)


def mu_from_lambda(lam: LambdaTuple) -> MuList:
    """Prefix sums ``mu_0 = a/2 - b``, ``mu_1 = (a+b)/2``, ``mu_k = mu_1 + lambda_1 + ... + lambda_{k-1}``.

    The last entry is taken verbatim as
    ``mu_{n-1} = mu_1 + lambda_1 + ... + lambda_{n-1} + lambda_c``, so it
    also picks up ``lambda_{n-1}``. ``lambda_d`` is not used.
    """
    n = lam.n
    half = Fraction(1, 2)
    mus: List[Value] = [half * lam.a - lam.b]
    if n == 1:
        return MuList(mus)
    mu1 = half * (lam.a + lam.b)
    mus.append(mu1)
    acc = mu1
    for k in range(2, n):
        acc = acc + lam.inner[k - 2]
        mus.append(acc)
    mus[-1] = mus[-1] + lam.inner[n - 2] + lam.c
    return MuList(mus)


def q_from_mu(mus: MuList | Sequence[Value], var: str = "x") -> CoefPoly:
    """``q(x) = prod (x + mu_i)``."""
    values = list(mus.values if isinstance(mus, MuList) else mus)
    polys = [v for v in values if isinstance(v, CoefPoly)]
    vars = (var,) + tuple(dict.fromkeys(w for p in polys for w in p.vars if w != var))
    x = CoefPoly.var(var, vars)
    out = CoefPoly.const(1, vars)
    for m in values:
        out = out * (x + (m.with_vars(vars) if isinstance(m, CoefPoly) else m))
    return out


def Q_from_z(zprime: CoefPoly, z: CoefPoly, shift: Fraction = Fraction(3, 4), var: str = "Delta",
             out_var: str = "u") -> CoefPoly:
    """``Q(u) = 3 z'(-u - shift) - z(-u - shift)`` (default shift 3/4)."""
    if var not in zprime.vars:
        zprime = zprime.with_vars((var,) + zprime.vars)
    if var not in z.vars:
        z = z.with_vars((var,) + z.vars)
    if (zprime or z) and z.degree(var) != zprime.degree(var) + 1:
        raise CorrespondenceError(f"deg z = {z.degree(var)} but deg z' = {zprime.degree(var)}")
    params = tuple(dict.fromkeys(v for p in (zprime, z) for v in p.vars if v != var))
    u = CoefPoly.var(out_var, (out_var,) + params)
    arg = -u - shift
    a = compose(zprime, arg, var)
    b = compose(z, arg, var)
    a, b = align(a, b)
    return (3 * a - b).with_vars((out_var,) + params)


def consistency_check(q: CoefPoly, zprime: CoefPoly, z: CoefPoly | None = None) -> Dict[str, object]:
    """Does ``q`` realise the Hecke parameter ``z'``?

    Compares ``(Q_from_q(q), gamma_from_q(q))`` with ``(Q_from_z(z', z), 0)``
    and reports ``q(1/2)`` and ``q(-1/2)``.
    """
    from .algebra_zoo import derive_z

    if z is None:
        n = (zprime if "Delta" in zprime.vars else zprime.with_vars(("Delta",))).degree("Delta")
        z = derive_z(n, zprime)
    q = _x_poly(q)
    Qq = Q_from_q(q)
    gq = gamma_from_q(q)
    Qz = Q_from_z(zprime, z)
    q_half = q.subs({"x": Fraction(1, 2)})
    q_mhalf = q.subs({"x": Fraction(-1, 2)})
    Q_match = Qq == Qz
    gamma_match = not gq
    return {
        "Q_from_q": Qq,
        "gamma": gq,
        "Q_from_z": Qz,
        "Q_match": Q_match,
        "gamma_match": gamma_match,
        "match": Q_match and gamma_match,
        "q(1/2)": q_half,
        "q(-1/2)": q_mhalf,
        "vanishes_at": [pt for pt, v in (("1/2", q_half), ("-1/2", q_mhalf)) if not v],
    }
