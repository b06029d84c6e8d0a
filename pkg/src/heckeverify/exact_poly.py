"""Exact commutative polynomials over the rationals.

``CoefPoly`` is the single commutative polynomial type of the package.  It
serves as the coefficient ring of the noncommutative algebras, as the home of
parameter polynomials (``z``, ``z'``, ``Q``, ``P``, ``q``, ``p``) and as the
ring in which unknown-coefficient ansatz variables live.

Rationals are :class:`fractions.Fraction`; nothing in this module touches
floating point.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

__all__ = [
    "CoefPoly",
    "PolyError",
    "VariableMismatchError",
    "NotDivisibleError",
    "NotUnivariateError",
    "LinearSystemError",
    "Rat",
    "rat",
    "align",
    "arith",
    "compose",
    "divmod_poly",
    "exact_divide",
    "solve_linear",
    "solve_linear_equations",
    "solve_P_from_Q",
    "P_functional_residual",
    "sqrt_bracket",
]

Rat = Fraction
Exp = Tuple[int, ...]
Scalar = Union[int, Fraction]


class PolyError(ValueError):
    pass


class VariableMismatchError(PolyError):
    pass


class NotDivisibleError(PolyError):
    """Raised by :func:`exact_divide` when the remainder is nonzero."""

    def __init__(self, num, den, remainder):
        super().__init__(f"{num} is not divisible by {den} (remainder {remainder})")
        self.remainder = remainder


class NotUnivariateError(PolyError):
    pass


class LinearSystemError(PolyError):
    pass


def rat(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/5"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)) or isinstance(value, Rational):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


class CoefPoly:
    """Sparse multivariate polynomial with Fraction coefficients.

    ``terms`` maps exponent tuples (aligned with ``vars``) to nonzero
    coefficients.  Instances are treated as immutable.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars: Sequence[str] = (), terms: Mapping[Exp, Scalar] | None = None):
        self.vars: Tuple[str, ...] = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise PolyError(f"duplicate variable names in {self.vars}")
        clean: Dict[Exp, Fraction] = {}
        nv = len(self.vars)
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != nv or any(k < 0 for k in exp):
                raise PolyError(f"bad exponent vector {exp} for variables {self.vars}")
            c = rat(c)
            if c:
                clean[exp] = clean.get(exp, 0) + c
                if not clean[exp]:
                    del clean[exp]
        self.terms: Dict[Exp, Fraction] = clean
        self._hash = None

    # -- construction -----------------------------------------------------

    @classmethod
    def _raw(cls, vars: Tuple[str, ...], terms: Dict[Exp, Fraction]) -> "CoefPoly":
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c: Scalar, vars: Sequence[str] = ()) -> "CoefPoly":
        vars = tuple(vars)
        c = rat(c)
        return cls._raw(vars, {(0,) * len(vars): c} if c else {})

    @classmethod
    def zero(cls, vars: Sequence[str] = ()) -> "CoefPoly":
        return cls._raw(tuple(vars), {})

    @classmethod
    def var(cls, name: str, vars: Sequence[str] | None = None) -> "CoefPoly":
        vars = (name,) if vars is None else tuple(vars)
        if name not in vars:
            raise VariableMismatchError(f"{name} not among {vars}")
        exp = tuple(1 if v == name else 0 for v in vars)
        return cls._raw(vars, {exp: Fraction(1)})

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Scalar], var: str = "x") -> "CoefPoly":
        """Univariate polynomial from ascending coefficients."""
        return cls((var,), {(i,): c for i, c in enumerate(coeffs)})

    # -- basic queries ----------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def used_vars(self) -> Tuple[str, ...]:
        used = set()
        for exp in self.terms:
            used.update(v for v, k in zip(self.vars, exp) if k)
        return tuple(v for v in self.vars if v in used)

    def degree(self, var: str | None = None) -> int:
        """Total degree, or degree in ``var``; the zero polynomial has degree -1."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.vars:
            return 0
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    def main_var(self, var: str | None = None) -> str:
        if var is not None:
            return var
        used = self.used_vars()
        if len(used) > 1:
            raise NotUnivariateError(f"{self} is not univariate")
        if used:
            return used[0]
        if len(self.vars) == 1:
            return self.vars[0]
        raise NotUnivariateError(f"cannot infer the variable of constant {self}")

    def coefficient_list(self, var: str | None = None) -> List["CoefPoly"]:
        """Ascending coefficients in ``var`` (each a CoefPoly over the same variables)."""
        var = self.main_var(var)
        d = self.degree(var)
        if d < 0:
            return []
        i = self.vars.index(var)
        out: List[Dict[Exp, Fraction]] = [{} for _ in range(d + 1)]
        for exp, c in self.terms.items():
            k = exp[i]
            out[k][exp[:i] + (0,) + exp[i + 1:]] = c
        return [CoefPoly._raw(self.vars, t) for t in out]

    def rational_coeffs(self, var: str | None = None) -> List[Fraction]:
        """Ascending rational coefficients of a univariate polynomial."""
        out = []
        for c in self.coefficient_list(var):
            if not c.is_constant():
                raise NotUnivariateError(f"{self} has non-constant coefficients in {var}")
            out.append(c.constant_term())
        return out

    def leading_coefficient(self, var: str | None = None) -> "CoefPoly":
        coeffs = self.coefficient_list(var)
        return coeffs[-1] if coeffs else CoefPoly.zero(self.vars)

    # -- variable management ----------------------------------------------

    def with_vars(self, vars: Sequence[str]) -> "CoefPoly":
        """Re-embed into a variable list containing every variable in use."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        missing = [v for v in self.used_vars() if v not in vars]
        if missing:
            raise VariableMismatchError(f"variables {missing} not in {vars}")
        idx = [self.vars.index(v) if v in self.vars else None for v in vars]
        terms = {}
        for exp, c in self.terms.items():
            terms[tuple(exp[j] if j is not None else 0 for j in idx)] = c
        return CoefPoly._raw(vars, terms)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "CoefPoly | None":
        if isinstance(other, CoefPoly):
            if other.vars == self.vars:
                return other
            if not other.vars and other.is_constant():
                return CoefPoly.const(other.constant_term(), self.vars)
            if not self.vars:
                return None  # handled by the caller swapping roles
            raise VariableMismatchError(f"variable lists differ: {self.vars} vs {other.vars}")
        if isinstance(other, (int, Fraction)):
            return CoefPoly.const(other, self.vars)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return other + self
        terms = dict(self.terms)
        for exp, c in o.terms.items():
            v = terms.get(exp)
            if v is None:
                terms[exp] = c
            else:
                v += c
                if v:
                    terms[exp] = v
                else:
                    del terms[exp]
        return CoefPoly._raw(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return CoefPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return -(other - self)
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return CoefPoly._raw(self.vars, {})
            return CoefPoly._raw(self.vars, {e: c * other for e, c in self.terms.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o is None:
            return other * self
        terms: Dict[Exp, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = terms.get(e, 0) + c1 * c2
                if v:
                    terms[e] = v
                else:
                    terms.pop(e, None)
        return CoefPoly._raw(self.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolyError("only non-negative integer powers")
        result = CoefPoly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / rat(other))
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term() == other
        if not isinstance(other, CoefPoly):
            return NotImplemented
        if self.vars == other.vars:
            return self.terms == other.terms
        a, b = align(self, other)
        return a.terms == b.terms

    def __hash__(self):
        if self._hash is None:
            used = self.used_vars()
            p = self.with_vars(used)
            self._hash = hash((used, frozenset(p.terms.items())))
        return self._hash

    # -- calculus and substitution -----------------------------------------

    def derivative(self, var: str) -> "CoefPoly":
        if var not in self.vars:
            return CoefPoly.zero(self.vars)
        i = self.vars.index(var)
        terms = {}
        for exp, c in self.terms.items():
            if exp[i]:
                terms[exp[:i] + (exp[i] - 1,) + exp[i + 1:]] = c * exp[i]
        return CoefPoly._raw(self.vars, terms)

    def subs(self, mapping: Mapping[str, Union["CoefPoly", Scalar]]) -> "CoefPoly":
        """Simultaneous substitution of variables by polynomials or numbers.

        The result lives over the unsubstituted variables followed by any new
        variables brought in by the images.
        """
        keep = [v for v in self.vars if v not in mapping]
        out_vars = list(keep)
        for img in mapping.values():
            if isinstance(img, CoefPoly):
                out_vars.extend(v for v in img.vars if v not in out_vars)
        out_vars = tuple(out_vars)
        images = {}
        for name, img in mapping.items():
            if name not in self.vars:
                continue
            images[self.vars.index(name)] = (
                img.with_vars(out_vars) if isinstance(img, CoefPoly) else CoefPoly.const(img, out_vars)
            )
        keep_idx = [out_vars.index(v) if v in keep else None for v in self.vars]
        power_cache: Dict[Tuple[int, int], CoefPoly] = {}

        def power(i, k):
            key = (i, k)
            if key not in power_cache:
                power_cache[key] = images[i] ** k
            return power_cache[key]

        result = CoefPoly.zero(out_vars)
        for exp, c in self.terms.items():
            mono = [0] * len(out_vars)
            factor = None
            for i, k in enumerate(exp):
                if not k:
                    continue
                if i in images:
                    factor = power(i, k) if factor is None else factor * power(i, k)
                else:
                    mono[keep_idx[i]] += k
            term = CoefPoly._raw(out_vars, {tuple(mono): c})
            result = result + (term if factor is None else term * factor)
        return result

    def __call__(self, value):
        return compose(self, value)

    # -- printing -----------------------------------------------------------

    def sorted_terms(self):
        """Terms in descending graded-lex order (deterministic printing)."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, exp) if k
            )
            parts.append(_signed_term(c, mono))
        return _join_signed(parts)

    def __repr__(self) -> str:
        return f"CoefPoly({self})"


def _format_rat(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _signed_term(c: Fraction, mono: str) -> Tuple[str, str]:
    sign = "-" if c < 0 else "+"
    a = abs(c)
    if not mono:
        return sign, _format_rat(a)
    if a == 1:
        return sign, mono
    return sign, f"{_format_rat(a)}*{mono}"


def _join_signed(parts) -> str:
    out = ""
    for i, (sign, body) in enumerate(parts):
        if i == 0:
            out = body if sign == "+" else f"-{body}"
        else:
            out += f" {sign} {body}"
    return out


def align(*polys: CoefPoly) -> Tuple[CoefPoly, ...]:
    """Embed polynomials into the union of their variable lists (first-seen order)."""
    vars: List[str] = []
    for p in polys:
        vars.extend(v for v in p.vars if v not in vars)
    return tuple(p.with_vars(vars) for p in polys)


def arith(a: CoefPoly, b: CoefPoly, op: str) -> CoefPoly:
    """Ring operation ``op`` in {"add", "sub", "mul"} on same-variable polynomials."""
    if a.vars != b.vars:
        raise VariableMismatchError(f"variable lists differ: {a.vars} vs {b.vars}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise PolyError(f"unknown operation {op!r}")


def compose(f: CoefPoly, g: Union[CoefPoly, Scalar], var: str | None = None) -> CoefPoly:
    """Return ``f(g)``: substitute ``g`` for the variable of univariate ``f``.

    With ``var`` given, ``f`` may carry further (parameter) variables that are
    left untouched.
    """
    if var is None:
        used = f.used_vars()
        if len(used) > 1:
            raise NotUnivariateError(f"{f} is not univariate")
        var = f.main_var()
    # Horner keeps intermediate sizes small.
    coeffs = f.coefficient_list(var)
    if not isinstance(g, CoefPoly):
        return f.subs({var: rat(g)})
    rest = tuple(v for v in f.vars if v != var)
    coeffs = [c.with_vars(rest) for c in coeffs]
    if rest:
        coeffs = list(align(*coeffs, g))
        g = coeffs.pop()
    else:
        coeffs = [CoefPoly.const(c.constant_term(), g.vars) for c in coeffs]
    result = CoefPoly.zero(g.vars)
    for c in reversed(coeffs):
        result = result * g + c
    return result


def _leading(p: CoefPoly) -> Tuple[Exp, Fraction]:
    exp = max(p.terms)  # lex order on the variable list
    return exp, p.terms[exp]


def divmod_poly(num: CoefPoly, den: CoefPoly) -> Tuple[CoefPoly, CoefPoly]:
    """Multivariate division with remainder using lex order on ``num.vars``.

    Returns ``(q, r)`` with ``num == q*den + r`` and no term of ``r``
    divisible by the leading monomial of ``den``.
    """
    num, den = align(num, den)
    if not den:
        raise ZeroDivisionError("division by the zero polynomial")
    vars = num.vars
    lexp, lc = _leading(den)
    q: Dict[Exp, Fraction] = {}
    r: Dict[Exp, Fraction] = {}
    p = num
    while p:
        exp, c = _leading(p)
        if all(a >= b for a, b in zip(exp, lexp)):
            qexp = tuple(a - b for a, b in zip(exp, lexp))
            qc = c / lc
            q[qexp] = q.get(qexp, 0) + qc
            p = p - CoefPoly._raw(vars, {qexp: qc}) * den
        else:
            r[exp] = c
            p = CoefPoly._raw(vars, {e: v for e, v in p.terms.items() if e != exp})
    return CoefPoly(vars, q), CoefPoly(vars, r)


def exact_divide(num: CoefPoly, den: CoefPoly) -> CoefPoly:
    """Return ``c`` with ``c*den == num`` or raise :class:`NotDivisibleError`."""
    if not den:
        raise ZeroDivisionError("division by the zero polynomial")
    q, r = divmod_poly(num, den)
    if r:
        raise NotDivisibleError(num, den, r)
    a, b = align(q * align(den, num)[0], num)
    assert a == b, "division post-check failed"
    return q


def solve_linear(matrix: Sequence[Sequence[Scalar]], rhs: Sequence) -> List:
    """Solve ``matrix @ x = rhs`` exactly; rhs entries may be CoefPolys.

    The matrix must be rational.  Raises :class:`LinearSystemError` if the
    system is inconsistent or has more than one solution.
    """
    rows = [[rat(v) for v in row] for row in matrix]
    b = list(rhs)
    if len(rows) != len(b):
        raise LinearSystemError("row count mismatch")
    ncols = len(rows[0]) if rows else 0
    pivots: List[int] = []
    r = 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        b[r], b[pr] = b[pr], b[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        b[r] = b[r] * inv
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * c for a, c in zip(rows[i], rows[r])]
                b[i] = b[i] - b[r] * f
        pivots.append(col)
        r += 1
    for i in range(r, len(rows)):
        if b[i]:
            raise LinearSystemError(f"inconsistent system (residual {b[i]})")
    if len(pivots) < ncols:
        free = sorted(set(range(ncols)) - set(pivots))
        raise LinearSystemError(f"underdetermined system, free columns {free}")
    x = [None] * ncols
    for i, col in enumerate(pivots):
        x[col] = b[i]
    return x


def solve_linear_equations(equations: Sequence[CoefPoly], unknowns: Sequence[str]) -> Dict[str, CoefPoly]:
    """Solve polynomial equations that are linear in ``unknowns``.

    The coefficient of each unknown must be a rational constant; the
    remaining part may involve other (parameter) variables.  Solutions are
    returned over the parameter variables.
    """
    if not equations:
        raise LinearSystemError("no equations")
    eqs = align(*equations)
    vars = eqs[0].vars
    for u in unknowns:
        if u not in vars:
            raise LinearSystemError(f"unknown {u} does not occur")
    uidx = [vars.index(u) for u in unknowns]
    params = tuple(v for v in vars if v not in unknowns)
    pidx = [vars.index(v) for v in params]
    matrix, rhs = [], []
    for eq in eqs:
        row = [Fraction(0)] * len(unknowns)
        const: Dict[Exp, Fraction] = {}
        for exp, c in eq.terms.items():
            ue = [exp[i] for i in uidx]
            if sum(ue) == 0:
                pe = tuple(exp[i] for i in pidx)
                const[pe] = const.get(pe, 0) - c
            elif sum(ue) == 1 and not any(exp[i] for i in pidx):
                row[ue.index(1)] += c
            else:
                raise LinearSystemError(f"equation not linear with constant coefficients: {eq}")
        matrix.append(row)
        rhs.append(CoefPoly(params, const))
    sol = solve_linear(matrix, rhs)
    return dict(zip(unknowns, sol))


def P_functional_residual(Q: CoefPoly, P: CoefPoly, var: str = "u") -> CoefPoly:
    """``Q(-s(s-1)) - Q(-s(s+1)) - (s-1)P(-s(s-1)) - (s+1)P(-s(s+1))`` in ``s``."""
    Q = Q if var in Q.vars else Q.with_vars((var,) + Q.vars)
    P = P if var in P.vars else P.with_vars((var,) + P.vars)
    params = tuple(dict.fromkeys(v for p in (Q, P) for v in p.vars if v != var))
    s = CoefPoly.var("s", ("s",) + params)
    a = -s * (s - 1)
    b = -s * (s + 1)
    parts = align(compose(Q, a, var), compose(Q, b, var), compose(P, a, var), compose(P, b, var), s)
    qa, qb, pa, pb, s = parts
    return qa - qb - ((s - 1) * pa + (s + 1) * pb)


def solve_P_from_Q(Q: CoefPoly, var: str = "u") -> CoefPoly:
    """The unique ``P`` with ``Q(-s(s-1)) - Q(-s(s+1)) = (s-1)P(-s(s-1)) + (s+1)P(-s(s+1))``.

    ``deg P = deg Q - 1``; the unknown coefficients of ``P`` are found by
    Gaussian elimination on the coefficients of ``s`` and the answer is
    substituted back as a check.  ``Q`` may carry parameter variables besides
    ``var``.
    """
    Q = Q if Q.vars else Q.with_vars((var,))
    if var not in Q.vars:
        Q = Q.with_vars((var,) + Q.vars)
    d = Q.degree(var)
    params = tuple(v for v in Q.vars if v != var)
    if d <= 0:
        return CoefPoly.zero((var,) + params)
    s = CoefPoly.var("s", ("s",) + params)
    a = -s * (s - 1)
    b = -s * (s + 1)
    lhs = compose(Q, a, var).with_vars(s.vars)
    # Column i holds the s-coefficients of (s-1)a^i + (s+1)b^i.
    columns = []
    for i in range(d):
        col = (s - 1) * a ** i + (s + 1) * b ** i
        columns.append([c.constant_term() for c in col.coefficient_list("s")])
    lhs = lhs - compose(Q, b, var).with_vars(s.vars)
    lcoeffs = lhs.coefficient_list("s")
    nrows = max([len(c) for c in columns] + [len(lcoeffs)])
    matrix = [[col[k] if k < len(col) else 0 for col in columns] for k in range(nrows)]
    zero = CoefPoly.zero(params)
    rhs = [lcoeffs[k].with_vars(params) if k < len(lcoeffs) else zero for k in range(nrows)]
    coeffs = solve_linear(matrix, rhs)
    uvar = CoefPoly.var(var, (var,) + params)
    P = CoefPoly.zero((var,) + params)
    for i, c in enumerate(coeffs):
        P = P + c.with_vars((var,) + params) * uvar ** i
    if P_functional_residual(Q.with_vars((var,) + params), P, var):
        raise LinearSystemError("back-substitution of P failed")
    return P


def sqrt_bracket(f: CoefPoly, var: str | None = None) -> Tuple[CoefPoly, CoefPoly]:
    """Split ``f(sqrt(x)) = even(x) + sqrt(x) * bracket(x)``."""
    var = f.main_var(var)
    if var not in f.vars:
        f = f.with_vars((var,) + f.vars)
    i = f.vars.index(var)
    even: Dict[Exp, Fraction] = {}
    odd: Dict[Exp, Fraction] = {}
    for exp, c in f.terms.items():
        k = exp[i]
        if k % 2 == 0:
            even[exp[:i] + (k // 2,) + exp[i + 1:]] = c
        else:
            odd[exp[:i] + ((k - 1) // 2,) + exp[i + 1:]] = c
    return CoefPoly(f.vars, even), CoefPoly(f.vars, odd)
