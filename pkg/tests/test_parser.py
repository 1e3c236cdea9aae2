from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mahlerkit.mahler import ParseError, Poly, RatFunc, parse_coefficient, parse_ratfunc
from mahlerkit.numbers import CycloElem, RootOfUnity


def q(x):
    return CycloElem.rational(Fraction(x))


def test_polynomials():
    f = parse_ratfunc("1 - z + 3*z^2")
    assert f.is_poly() and [c for c in f.num.c] == [q(1), q(-1), q(3)]


def test_quotients_reduce():
    f = parse_ratfunc("(1 - z^2)/(1 - z)")
    assert f == parse_ratfunc("1 + z")


def test_rational_constants_and_negative_powers():
    assert parse_ratfunc("3/4") == RatFunc(q(Fraction(3, 4)))
    assert parse_ratfunc("z^-1 * z") == RatFunc(1)


def test_cyclotomic_constants():
    i = parse_coefficient("zeta(4)")
    assert i * i == q(-1)
    assert i == CycloElem.root(RootOfUnity.from_kn(1, 4))


@pytest.mark.parametrize("text,pos", [("1 +", 3), ("sqrt(2)", 0), ("1 $ z", 2), ("(1 + z", 6), ("zeta(0)", 0)])
def test_errors_report_position(text, pos):
    with pytest.raises(ParseError) as e:
        parse_ratfunc(text)
    assert e.value.pos == pos
    assert f"at position {pos}" in str(e.value)


def test_coefficient_must_be_constant():
    with pytest.raises(ParseError):
        parse_coefficient("z")


def test_trailing_whitespace():
    assert parse_ratfunc("1 + z  ") == parse_ratfunc("1+z")


coeffs = st.lists(st.fractions(-4, 4, max_denominator=5), min_size=1, max_size=5)


@given(coeffs, coeffs)
def test_expr_roundtrip(a, b):
    den = Poly([q(x) for x in b])
    if not den.deg >= 0 or not any(b):
        return
    f = RatFunc(Poly([q(x) for x in a]), den)
    assert parse_ratfunc(f.to_expr()) == f
