from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import polys
from heckeverify.algebra_zoo import delta, make_hz, make_uz_localized, t_body
from heckeverify.exact_poly import CoefPoly
from heckeverify.parse import ParseError, UnknownIdentifierError, parse_expr, parse_poly, tokenize
from heckeverify.poisson import make_bn

D = CoefPoly.var("Delta", ("Delta",))
HZ = make_hz(2, D ** 2)
LOC = make_uz_localized(2, D ** 2)


class TestNC:
    def test_t_body(self):
        got = parse_expr("e*y^2 + 1/2*h*(x*y + y*x) - f*x^2", HZ)
        assert HZ.normal_form(got) == t_body(HZ)

    def test_delta(self):
        assert HZ.normal_form(parse_expr("h^2 + 4*f*e + 2*h", HZ)) == delta(HZ)
        assert HZ.normal_form(parse_expr("Delta", HZ)) == delta(HZ)

    def test_order_preserved(self):
        xy = parse_expr("x*y", HZ)
        yx = parse_expr("y*x", HZ)
        assert xy != yx
        assert HZ.normal_form(xy - yx) == HZ.commutator(HZ.gen("x"), HZ.gen("y"))

    def test_negative_exponent(self):
        si = parse_expr("s^-2", LOC)
        assert LOC.normal_form(si * LOC.gen("s") * LOC.gen("s")) == 1

    def test_negative_exponent_not_invertible(self):
        with pytest.raises(ParseError) as err:
            parse_expr("2*e^-1", HZ)
        assert err.value.column == 3

    def test_round_trip_localized(self):
        x = LOC.normal_form(parse_expr("f*s - 1/3*s^-1*h*y + 7", LOC))
        assert LOC.normal_form(parse_expr(LOC.format(x), LOC)) == x


class TestErrors:
    def test_syntax_column(self):
        with pytest.raises(ParseError) as err:
            parse_expr("x + * y", HZ)
        assert err.value.column == 5
        assert "column 5" in str(err.value)

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError) as err:
            parse_expr("x + q", HZ)
        assert err.value.column == 5

    def test_implicit_multiplication(self):
        with pytest.raises(ParseError):
            parse_expr("2 x", HZ)

    @pytest.mark.parametrize("text", ["", "(x", "x^", "1/0", "x $ y", "x^y"])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_expr(text, HZ)

    def test_tokenize_columns(self):
        toks = tokenize("  ab + 12")
        assert [(t.kind, t.column) for t in toks] == [("IDENT", 3), ("OP", 6), ("INT", 8), ("END", 10)]


class TestPoly:
    def test_poisson_context(self):
        B = make_bn(2)
        assert parse_expr("e*y^2 - f*x^2", B) == B.var("e") * B.var("y") ** 2 - B.var("f") * B.var("x") ** 2

    def test_precedence(self):
        x = CoefPoly.var("x", ("x",))
        assert parse_poly("-x^2 + 3/5*x*(x - 1)", ("x",)) == -x * x + Fraction(3, 5) * x * (x - 1)

    @given(polys(("x", "y")))
    def test_round_trip(self, p):
        assert parse_poly(str(p), ("x", "y")) == p

    @given(st.integers(0, 6), st.integers(-50, 50))
    def test_powers(self, k, c):
        x = CoefPoly.var("x", ("x",))
        assert parse_poly(f"({c})*x^{k}", ("x",)) == c * x ** k
