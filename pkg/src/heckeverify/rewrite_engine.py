"""Noncommutative rewriting over polynomial coefficients.

Words are tuples of integer letters.  Generator ``i`` contributes the letter
``2*i + 1``; an invertible generator also has the inverse letter ``2*i``, so
inverse letters sort immediately below their generator and the integer order
on letters is the generator order.  Inverse pairs cancel through two explicit
rules (``g g^-1 -> 1`` and ``g^-1 g -> 1``) that take part in overlap
analysis like any other rule.

Words are compared by ``(weighted degree, inversion count, lexicographic)``.
The weighted degree of a letter is ``weight * (+1 or -1)``, i.e. signed for
inverse letters.

Normal forms are computed by appending one letter at a time to an already
reduced word; a newly created redex must then end at the appended letter.
Results of ``(reduced word, letter)`` steps are memoised per presentation.
"""

from __future__ import annotations

import os
import sys
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from .exact_poly import CoefPoly

__all__ = [
    "Generator",
    "NCExpr",
    "RewriteRule",
    "Presentation",
    "OverlapReport",
    "Overlap",
    "RuleReport",
    "RewriteError",
    "UnknownGeneratorError",
    "StepBudgetExceeded",
    "DEFAULT_STEP_BUDGET",
    "default_step_budget",
    "step_budget",
    "normal_form",
    "commutator",
    "check_termination",
    "check_confluence",
    "filtration_check",
]

DEFAULT_STEP_BUDGET = 10**6
_budget_override: ContextVar[int | None] = ContextVar("step_budget", default=None)


def default_step_budget() -> int:
    """Explicit override, else ``HECKE_STEP_BUDGET``, else 10**6."""
    v = _budget_override.get()
    if v is not None:
        return v
    return int(os.environ.get("HECKE_STEP_BUDGET", DEFAULT_STEP_BUDGET))


@contextmanager
def step_budget(n: int | None):
    """Presentations built inside the block default to budget ``n``."""
    token = _budget_override.set(n)
    try:
        yield
    finally:
        _budget_override.reset(token)

Word = Tuple[int, ...]
Coef = Union[Fraction, CoefPoly]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class RewriteError(ValueError):
    pass


class UnknownGeneratorError(RewriteError):
    pass


class StepBudgetExceeded(RewriteError):
    """Reduction used more rule applications than allowed; suspect non-termination."""


@dataclass(frozen=True)
class Generator:
    name: str
    weight: int = 1
    invertible: bool = False

    def __post_init__(self):
        if self.weight < 1:
            raise RewriteError(f"generator {self.name} needs weight >= 1")


class NCExpr:
    """Finite linear combination of words; coefficients are Fractions or CoefPolys."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, Coef] | None = None):
        self.terms: Dict[Word, Coef] = {}
        for w, c in (terms or {}).items():
            if isinstance(c, int):
                c = Fraction(c)
            if c:
                self.terms[tuple(w)] = c

    @classmethod
    def _raw(cls, terms: Dict[Word, Coef]) -> "NCExpr":
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def scalar(cls, c) -> "NCExpr":
        return cls({(): c})

    @classmethod
    def word(cls, w: Sequence[int], c=1) -> "NCExpr":
        return cls({tuple(w): c})

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def words(self):
        return self.terms.keys()

    def coefficient(self, w: Sequence[int]) -> Coef:
        return self.terms.get(tuple(w), Fraction(0))

    @staticmethod
    def _as_expr(other) -> "NCExpr | None":
        if isinstance(other, NCExpr):
            return other
        if isinstance(other, (int, Fraction, CoefPoly)):
            return NCExpr.scalar(other)
        return None

    def __add__(self, other):
        o = self._as_expr(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        _accumulate(terms, o.terms, 1)
        return NCExpr._raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return NCExpr._raw({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        o = self._as_expr(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        _accumulate(terms, o.terms, -1)
        return NCExpr._raw(terms)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Concatenation product; no reduction is performed."""
        if isinstance(other, (int, Fraction, CoefPoly)):
            return self.scale(other)
        if not isinstance(other, NCExpr):
            return NotImplemented
        terms: Dict[Word, Coef] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                _add_term(terms, w1 + w2, c1 * c2)
        return NCExpr._raw(terms)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CoefPoly)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c) -> "NCExpr":
        if isinstance(c, int):
            c = Fraction(c)
        if not c:
            return NCExpr._raw({})
        terms = {}
        for w, v in self.terms.items():
            _add_term(terms, w, v * c)
        return NCExpr._raw(terms)

    def __eq__(self, other):
        o = self._as_expr(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset((w, hash(c)) for w, c in self.terms.items()))

    def __repr__(self):
        return f"NCExpr({self.terms!r})"


def _add_term(terms: Dict[Word, Coef], w: Word, c) -> None:
    v = terms.get(w)
    v = c if v is None else v + c
    if v:
        terms[w] = v
    else:
        terms.pop(w, None)


def _accumulate(terms: Dict[Word, Coef], other: Mapping[Word, Coef], sign: int) -> None:
    for w, c in other.items():
        _add_term(terms, w, c if sign > 0 else -c)


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: NCExpr


@dataclass
class Overlap:
    word: Word
    kind: str  # "overlap" or "inclusion"
    reduction_a: NCExpr
    reduction_b: NCExpr
    difference: NCExpr

    @property
    def resolved(self) -> bool:
        return not self.difference


@dataclass
class OverlapReport:
    overlaps: List[Overlap] = field(default_factory=list)

    @property
    def unresolved(self) -> List[Overlap]:
        return [o for o in self.overlaps if not o.resolved]

    @property
    def confluent(self) -> bool:
        return not self.unresolved

    def __len__(self):
        return len(self.overlaps)


@dataclass
class RuleReport:
    """Outcome of a rule-by-rule check; ``violations`` holds (lhs, offending rhs word)."""

    name: str
    violations: List[Tuple[Word, Word]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


class Presentation:
    """An algebra given by ordered generators and oriented rewrite rules.

    ``rules`` is a sequence of ``(lhs, rhs)`` pairs where ``lhs`` is a word
    (tuple of letters, see :meth:`letter`) or a string of generator names
    separated by spaces, and ``rhs`` an :class:`NCExpr`.  Right-hand sides
    are brought to normal form once all rules are known.
    """

    def __init__(
        self,
        generators: Sequence[Generator],
        rules: Iterable[Tuple[Union[Word, str], NCExpr]] = (),
        coef_vars: Sequence[str] = (),
        name: str = "",
        step_budget: int | None = None,
    ):
        names = [g.name for g in generators]
        if len(set(names)) != len(names):
            raise RewriteError(f"duplicate generator names {names}")
        self.name = name
        self.generators: Tuple[Generator, ...] = tuple(generators)
        self.coef_vars: Tuple[str, ...] = tuple(coef_vars)
        self._index = {g.name: i for i, g in enumerate(self.generators)}
        if step_budget is None:
            step_budget = default_step_budget()
        self.step_budget = step_budget
        self._letter_weight: Dict[int, int] = {}
        for i, g in enumerate(self.generators):
            self._letter_weight[2 * i + 1] = g.weight
            if g.invertible:
                self._letter_weight[2 * i] = -g.weight
        raw: Dict[Word, NCExpr] = {}
        for i, g in enumerate(self.generators):
            if g.invertible:
                raw[(2 * i + 1, 2 * i)] = self.one()
                raw[(2 * i, 2 * i + 1)] = self.one()
        for lhs, rhs in rules:
            lhs = self.parse_word(lhs) if isinstance(lhs, str) else tuple(lhs)
            if len(lhs) < 2:
                raise RewriteError(f"rule lhs {self.word_str(lhs)} must have at least two letters")
            if lhs in raw:
                raise RewriteError(f"duplicate rule lhs {self.word_str(lhs)}")
            self._check_letters(lhs)
            raw[lhs] = self._normalize_coefs(rhs)
        self._install(raw)
        # Bring every rhs to normal form with respect to the full rule set.
        # A looping rule set keeps its raw rules so check_termination can
        # report it.
        try:
            reduced = {lhs: self.normal_form(rhs) for lhs, rhs in raw.items()}
        except StepBudgetExceeded:
            self._install(raw)
            return
        self._install(reduced)

    # -- setup -------------------------------------------------------------

    def _install(self, rules: Dict[Word, NCExpr]) -> None:
        self.rules: Tuple[RewriteRule, ...] = tuple(
            RewriteRule(lhs, rhs) for lhs, rhs in sorted(rules.items(), key=lambda t: self.order_key(t[0]))
        )
        self._rule_map = dict(rules)
        by_last: Dict[int, List[Tuple[Word, Dict[Word, Coef]]]] = {}
        for r in self.rules:
            by_last.setdefault(r.lhs[-1], []).append((r.lhs, r.rhs.terms))
        for lst in by_last.values():
            lst.sort(key=lambda t: -len(t[0]))
        self._by_last = by_last
        self._cache: Dict[Tuple[Word, int], Dict[Word, Coef]] = {}

    def _normalize_coefs(self, expr: NCExpr) -> NCExpr:
        return NCExpr({w: self.coef(c) for w, c in expr.items()})

    def _check_letters(self, w: Word) -> None:
        for a in w:
            if a not in self._letter_weight:
                raise UnknownGeneratorError(f"letter {a} is not a generator of {self.name or 'presentation'}")

    def coef(self, c) -> Coef:
        """Coerce a scalar into this presentation's coefficient ring."""
        if isinstance(c, int):
            return Fraction(c)
        if isinstance(c, Fraction):
            return c
        if isinstance(c, CoefPoly):
            if c.is_constant():
                return c.constant_term()
            return c.with_vars(self.coef_vars)
        raise TypeError(f"unsupported coefficient {c!r}")

    # -- letters and words -------------------------------------------------

    def gen_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownGeneratorError(f"unknown generator {name!r}") from None

    def letter(self, name: str, sign: int = 1) -> int:
        i = self.gen_index(name)
        if sign < 0:
            if not self.generators[i].invertible:
                raise RewriteError(f"generator {name} is not invertible")
            return 2 * i
        return 2 * i + 1

    def letter_of(self, spec: str) -> int:
        """Letter for ``"g"`` or ``"g^-1"``."""
        if spec.endswith("^-1"):
            return self.letter(spec[:-3], -1)
        return self.letter(spec)

    def word(self, *factors: Tuple[str, int]) -> Word:
        """Word from ``(generator, exponent)`` factors; exponents may be negative."""
        out: List[int] = []
        for name, k in factors:
            a = self.letter(name, 1 if k > 0 else -1)
            out.extend([a] * abs(k))
        return tuple(out)

    def parse_word(self, text: str) -> Word:
        out: List[int] = []
        for tok in text.split():
            if "^" in tok:
                name, k = tok.split("^")
                out.extend(self.word((name, int(k))))
            else:
                out.append(self.letter(tok))
        return tuple(out)

    def factors(self, w: Word) -> List[Tuple[str, int]]:
        """Canonical ``(generator, exponent)`` factorisation of a word."""
        out: List[Tuple[str, int]] = []
        for a in w:
            name = self.generators[a // 2].name
            e = 1 if a % 2 else -1
            if out and out[-1][0] == name and (out[-1][1] > 0) == (e > 0):
                out[-1] = (name, out[-1][1] + e)
            else:
                out.append((name, e))
        return out

    def word_str(self, w: Word) -> str:
        if not w:
            return "1"
        return "*".join(n if k == 1 else f"{n}^{k}" for n, k in self.factors(w))

    def gen(self, name: str) -> NCExpr:
        return NCExpr.word((self.letter(name),))

    def inv(self, name: str) -> NCExpr:
        return NCExpr.word((self.letter(name, -1),))

    def one(self) -> NCExpr:
        return NCExpr.scalar(1)

    def scalar(self, c) -> NCExpr:
        return NCExpr.scalar(self.coef(c))

    def __contains__(self, name: str) -> bool:
        return name in self._index

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    # -- term order ----------------------------------------------------------

    def weighted_degree(self, w: Word) -> int:
        lw = self._letter_weight
        return sum(lw[a] for a in w)

    @staticmethod
    def inversions(w: Word) -> int:
        return sum(1 for i in range(len(w)) for j in range(i + 1, len(w)) if w[i] > w[j])

    def order_key(self, w: Word):
        return (self.weighted_degree(w), self.inversions(w), w)

    # -- reduction -------------------------------------------------------------

    def _append(self, u: Word, a: int) -> Dict[Word, Coef]:
        key = (u, a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        w = u + (a,)
        out = None
        for lhs, rhs in self._by_last.get(a, ()):
            n = len(lhs)
            if len(w) >= n and w[-n:] == lhs:
                self._steps += 1
                if self._steps > self._budget:
                    raise StepBudgetExceeded(
                        f"more than {self._budget} rule applications in {self.name or 'presentation'}"
                    )
                prefix = w[:-n]
                out = {}
                for rw, c in rhs.items():
                    for ww, cc in self._concat(prefix, rw).items():
                        _add_term(out, ww, c * cc)
                break
        if out is None:
            out = {w: Fraction(1)}
        self._cache[key] = out
        return out

    def _concat(self, u: Word, v: Word) -> Dict[Word, Coef]:
        cur: Dict[Word, Coef] = {u: Fraction(1)}
        for a in v:
            nxt: Dict[Word, Coef] = {}
            for w, c in cur.items():
                for ww, cc in self._append(w, a).items():
                    _add_term(nxt, ww, c * cc)
            cur = nxt
        return cur

    def _start(self, budget: int | None):
        self._steps = 0
        self._budget = self.step_budget if budget is None else budget

    def normal_form(self, x: NCExpr, budget: int | None = None) -> NCExpr:
        """Reduce ``x`` to normal form (leftmost reduction, memoised)."""
        self._start(budget)
        terms: Dict[Word, Coef] = {}
        try:
            for w, c in x.items():
                self._check_letters(w)
                for ww, cc in self._concat((), w).items():
                    _add_term(terms, ww, c * cc)
        except RecursionError:
            self._cache.clear()
            raise StepBudgetExceeded("reduction nested too deeply; suspect non-termination") from None
        return NCExpr._raw(terms)

    nf = normal_form

    def mul(self, a: NCExpr, b: NCExpr) -> NCExpr:
        """Normal form of ``a*b`` for ``a`` already in normal form."""
        self._start(None)
        terms: Dict[Word, Coef] = {}
        for w1, c1 in a.items():
            for w2, c2 in b.items():
                for ww, cc in self._concat(w1, w2).items():
                    _add_term(terms, ww, c1 * c2 * cc)
        return NCExpr._raw(terms)

    def mul_all(self, *xs: NCExpr) -> NCExpr:
        out = self.one()
        for x in xs:
            out = self.mul(out, x)
        return out

    def power(self, a: NCExpr, k: int) -> NCExpr:
        if k < 0:
            raise RewriteError("negative powers of expressions are not supported")
        out = self.one()
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def commutator(self, a: NCExpr, b: NCExpr) -> NCExpr:
        a = self.normal_form(a)
        b = self.normal_form(b)
        return self.mul(a, b) - self.mul(b, a)

    def poly_eval(self, f: CoefPoly, x: NCExpr, var: str | None = None) -> NCExpr:
        """Evaluate a (univariate) polynomial at an element by Horner's rule.

        Coefficients of ``f`` that involve other variables are read as
        elements of the coefficient ring.
        """
        var = f.main_var(var) if f else None
        if not f:
            return NCExpr()
        coeffs = f.coefficient_list(var)
        rest = tuple(v for v in f.vars if v != var)
        x = self.normal_form(x)
        out = NCExpr()
        for c in reversed(coeffs):
            out = self.mul(out, x) + self.scalar(c.with_vars(rest))
        return out

    def reduce_naive(self, x: NCExpr, strategy: str = "rightmost", budget: int | None = None) -> NCExpr:
        """Unmemoised reduction choosing the leftmost or rightmost redex each step.

        Kept independent of :meth:`normal_form` so that the two can be
        compared; only used for verification.
        """
        if strategy not in ("leftmost", "rightmost"):
            raise RewriteError(f"unknown strategy {strategy!r}")
        budget = self.step_budget if budget is None else budget
        pending: Dict[Word, Coef] = dict(x.terms)
        done: Dict[Word, Coef] = {}
        steps = 0
        while pending:
            w = max(pending, key=self.order_key)
            c = pending.pop(w)
            hits = [
                (i, lhs) for lhs in self._rule_map for i in range(len(w) - len(lhs) + 1)
                if w[i:i + len(lhs)] == lhs
            ]
            if not hits:
                _add_term(done, w, c)
                continue
            steps += 1
            if steps > budget:
                raise StepBudgetExceeded("naive reduction exceeded its budget")
            i, lhs = (max if strategy == "rightmost" else min)(hits, key=lambda t: (t[0], -len(t[1])))
            for rw, rc in self._rule_map[lhs].items():
                _add_term(pending, w[:i] + rw + w[i + len(lhs):], c * rc)
        return NCExpr._raw(done)

    def one_step(self, w: Word, pos: int, lhs: Word) -> NCExpr:
        """Apply the rule with left side ``lhs`` at position ``pos`` of ``w``."""
        if w[pos:pos + len(lhs)] != lhs:
            raise RewriteError("rule does not match at the given position")
        rhs = self._rule_map[lhs]
        return NCExpr({w[:pos] + rw + w[pos + len(lhs):]: c for rw, c in rhs.items()})

    def is_normal(self, w: Word) -> bool:
        return not any(
            w[i:i + len(lhs)] == lhs for lhs in self._rule_map for i in range(len(w) - len(lhs) + 1)
        )

    # -- inspection --------------------------------------------------------

    def component(self, x: NCExpr, degree: int) -> NCExpr:
        """Terms of ``x`` whose weighted degree equals ``degree``."""
        return NCExpr._raw({w: c for w, c in x.items() if self.weighted_degree(w) == degree})

    def top_degree(self, x: NCExpr) -> int | None:
        return max((self.weighted_degree(w) for w in x.words()), default=None)

    def format(self, x: NCExpr) -> str:
        """Parseable text form, terms in descending term order."""
        if not x:
            return "0"
        parts = []
        for w, c in sorted(x.items(), key=lambda t: self.order_key(t[0]), reverse=True):
            parts.append(_format_term(c, "" if not w else self.word_str(w)))
        out = ""
        for i, (sign, body) in enumerate(parts):
            if i == 0:
                out = body if sign == "+" else f"-{body}"
            else:
                out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Presentation({self.name or ','.join(self.names)}, {len(self.rules)} rules)"


def _format_term(c: Coef, word: str) -> Tuple[str, str]:
    if isinstance(c, CoefPoly) and not c.is_constant():
        if len(c.terms) == 1:
            (exp, v), = c.terms.items()
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(c.vars, exp) if k)
            sign = "-" if v < 0 else "+"
            a = abs(v)
            head = mono if a == 1 else f"{_rat(a)}*{mono}"
            return sign, head if not word else f"{head}*{word}"
        body = f"({c})"
        return "+", body if not word else f"{body}*{word}"
    if isinstance(c, CoefPoly):
        c = c.constant_term()
    sign = "-" if c < 0 else "+"
    a = abs(c)
    if not word:
        return sign, _rat(a)
    if a == 1:
        return sign, word
    return sign, f"{_rat(a)}*{word}"


def _rat(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# -- module-level operations --------------------------------------------------


def normal_form(x: NCExpr, p: Presentation) -> NCExpr:
    return p.normal_form(x)


def commutator(a: NCExpr, b: NCExpr, p: Presentation) -> NCExpr:
    return p.commutator(a, b)


def check_termination(p: Presentation) -> RuleReport:
    """Every rhs word must be strictly below its lhs in the term order."""
    rep = RuleReport("termination")
    for r in p.rules:
        key = p.order_key(r.lhs)
        for w in r.rhs.words():
            if not p.order_key(w) < key:
                rep.violations.append((r.lhs, w))
    return rep


def filtration_check(p: Presentation) -> RuleReport:
    """No rule may raise the weighted (filtration) degree."""
    rep = RuleReport("filtration")
    for r in p.rules:
        d = p.weighted_degree(r.lhs)
        for w in r.rhs.words():
            if p.weighted_degree(w) > d:
                rep.violations.append((r.lhs, w))
    return rep


def check_confluence(p: Presentation, budget: int | None = None) -> OverlapReport:
    """Resolve every overlap and inclusion ambiguity between rule left sides."""
    found: Dict[Tuple[Word, Word, int, Word, int], Tuple[str, NCExpr, NCExpr]] = {}
    lhss = [r.lhs for r in p.rules]
    for l1 in lhss:
        for l2 in lhss:
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    w = l1 + l2[k:]
                    found[(w, l1, 0, l2, len(l1) - k)] = ("overlap", None, None)
            if l1 != l2 and len(l2) < len(l1):
                for i in range(len(l1) - len(l2) + 1):
                    if l1[i:i + len(l2)] == l2:
                        found[(l1, l1, 0, l2, i)] = ("inclusion", None, None)
    report = OverlapReport()
    for (w, l1, i1, l2, i2), (kind, _, _) in sorted(found.items(), key=lambda t: (p.order_key(t[0][0]), t[0])):
        a = p.normal_form(p.one_step(w, i1, l1), budget)
        b = p.normal_form(p.one_step(w, i2, l2), budget)
        report.overlaps.append(Overlap(w, kind, a, b, a - b))
    return report
