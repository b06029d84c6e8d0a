from fractions import Fraction

import pytest
from hypothesis import given

from conftest import polys
from heckeverify.algebra_zoo import derive_z
from heckeverify.exact_poly import CoefPoly
from heckeverify.poisson import (
    BN_VARS,
    PoissonAlg,
    PoissonError,
    bn_delta,
    consistent_rho,
    gr_relation,
    in_xy_delta,
    jacobi_check,
    kleinian_slice_check,
    make_bn,
    poisson_bracket,
    poisson_ideal_check,
    relation_ideal_check,
    semiclassical_check,
)

F = Fraction
B2 = make_bn(2)
e, f, h, x, y = (B2.var(v) for v in BN_VARS)
DELTA = bn_delta()


def br(p, q, alg=B2):
    return poisson_bracket(p, q, alg)


class TestTable:
    def test_examples(self):
        assert br(x, y) == 5 * DELTA ** 2
        assert br(e, x) == 0
        assert br(h, e) == 2 * e
        assert br(e, f) == h
        assert br(h, x) == x and br(h, y) == -y

    def test_antisymmetric_table_enforced(self):
        V = ("a", "b")
        a, b = (CoefPoly.var(v, V) for v in V)
        with pytest.raises(PoissonError):
            PoissonAlg(V, {("a", "b"): a, ("b", "a"): a}, [a])

    def test_zero_relation_rejected(self):
        with pytest.raises(PoissonError):
            PoissonAlg(("a",), {}, [CoefPoly.zero(("a",))])

    def test_unknown_variable(self):
        z = CoefPoly.var("z", ("z",))
        with pytest.raises(PoissonError):
            br(z, x)


class TestBracket:
    def test_examples(self):
        assert br(x + e, x + e) == 0
        assert br(e * e, f) == 2 * e * h
        for g in (e, f, h):
            assert br(DELTA, g) == 0

    @given(polys(BN_VARS, max_terms=3, max_deg=2), polys(BN_VARS, max_terms=3, max_deg=2))
    def test_antisymmetry(self, p, q):
        assert br(p, q) == -br(q, p)

    @given(
        polys(BN_VARS, max_terms=3, max_deg=2),
        polys(BN_VARS, max_terms=3, max_deg=2),
        polys(BN_VARS, max_terms=2, max_deg=2),
    )
    def test_leibniz(self, p, q, r):
        assert br(p, q * r) == br(p, q) * r + q * br(p, r)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_weight_law(self, n):
        B = make_bn(n)
        w = {"e": 2, "f": 2, "h": 2, "x": 2 * n + 1, "y": 2 * n + 1}
        for (a, b), v in B.table.items():
            for exp in v.terms:
                assert sum(k * w[name] for name, k in zip(B.vars, exp)) == w[a] + w[b] - 2


class TestJacobi:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_all_triples(self, n):
        checks = jacobi_check(make_bn(n))
        assert len(checks) == 10
        assert all(c.vanishes for c in checks)

    def test_repeated_argument(self):
        assert br(x, br(x, h)) + br(x, br(h, x)) + br(h, br(x, x)) == 0


class TestIdeals:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_xy_delta(self, n):
        assert all(c.vanishes for c in poisson_ideal_check(make_bn(n)))

    def test_membership_witness(self):
        assert not in_xy_delta(DELTA * e + x * f)
        assert in_xy_delta(e)

    def test_xy_alone_not_an_ideal(self):
        assert br(x, y).subs({"x": 0, "y": 0})

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_consistent_relation(self, n):
        B = make_bn(n, rho=consistent_rho(n, 2 * n + 1))
        assert all(c.vanishes for c in relation_ideal_check(B))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_printed_relation_fails_on_x_and_y(self, n):
        failing = {c.id for c in relation_ideal_check(make_bn(n)) if not c.vanishes}
        assert failing == {"{r,x} in (r)", "{r,y} in (r)"}

    @pytest.mark.xfail(strict=True, reason="printed relation is not a Poisson ideal; see decisions ledger")
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_printed_relation_is_poisson(self, n):
        assert all(c.vanishes for c in relation_ideal_check(make_bn(n)))

    def test_consistent_rho(self):
        assert consistent_rho(2, 5) == F(5, 6)


class TestKleinian:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_slice(self, n):
        assert kleinian_slice_check(n).vanishes

    def test_control(self):
        assert not kleinian_slice_check(2, rho=1).vanishes


class TestSemiclassical:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_all_pairs(self, n):
        checks, sign = semiclassical_check(n)
        assert sign == 1
        assert len(checks) == 10
        assert all(c.vanishes for c in checks)

    def test_wrong_sign_fails(self):
        checks, _ = semiclassical_check(2, sign=-1)
        assert not all(c.vanishes for c in checks)


class TestGr:
    @pytest.mark.parametrize("n", [2, 3])
    def test_top_symbol_of_t(self, n):
        zp = CoefPoly.var("Delta", ("Delta",)) ** n
        lead = derive_z(n, zp).leading_coefficient("Delta").constant_term()
        assert lead > 0
        assert gr_relation(n, zp) == e * y * y + h * x * y - f * x * x + lead * DELTA ** (n + 1)
