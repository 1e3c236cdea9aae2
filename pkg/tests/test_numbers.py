import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mahlerkit.numbers import (CycloElem, RadicalReal, RootOfUnity, orbit_of_root, radical_compare,
                               radical_less_than_one, radical_refine)

CONDUCTORS = [1, 3, 4, 5, 8, 12]
small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def cyclo(draw, n=None):
    n = n or draw(st.sampled_from(CONDUCTORS))
    return CycloElem(n, draw(st.lists(small_fracs, min_size=1, max_size=n + 2)))


def embed(x: CycloElem) -> complex:
    """Independent evaluation with the standard library."""
    w = cmath.exp(2j * math.pi / x.n)
    return sum(float(v) * w ** j for j, v in enumerate(x.c))


@given(st.data())
def test_field_axioms(data):
    n = data.draw(st.sampled_from(CONDUCTORS))
    a, b, c = (data.draw(cyclo(n)) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == CycloElem.rational(0)
    if a:
        assert a * a.inverse() == CycloElem.rational(1)


@given(cyclo(), cyclo())
def test_mixed_conductors_embed_consistently(a, b):
    assert abs(embed(a * b) - embed(a) * embed(b)) < 1e-9
    assert abs(embed(a + b) - (embed(a) + embed(b))) < 1e-9


@given(cyclo())
def test_to_complex_matches_stdlib(a):
    with mpmath.workdps(20):
        assert abs(complex(a.to_complex()) - embed(a)) < 1e-9


@given(st.integers(0, 23), st.integers(1, 24))
def test_roots_have_their_order(k, n):
    z = RootOfUnity.from_kn(k, n)
    e = CycloElem.root(z)
    assert e ** z.order == CycloElem.rational(1)
    assert abs(embed(e) - cmath.exp(2j * math.pi * k / n)) < 1e-9


@given(cyclo(), st.sampled_from([1, 5, 7, 11]))
def test_galois_is_a_ring_map(a, g):
    assume(math.gcd(g, a.n) == 1)
    b = a * a + a
    assert b.galois(g) == a.galois(g) * a.galois(g) + a.galois(g)


def test_orbit_of_root():
    orbit = orbit_of_root(RootOfUnity.from_kn(1, 12), 2)
    assert [w.exponent for w in orbit] == [Fraction(1, 12), Fraction(1, 6), Fraction(1, 3), Fraction(2, 3)]


def test_expr_text():
    z = CycloElem.root(RootOfUnity.from_kn(1, 4))
    assert (z * 3 - 1).to_expr() == "(-1 + 3*zeta(4))"
    assert CycloElem.rational(Fraction(-2, 3)).to_expr() == "-2/3"


def test_radical_refinement_is_nested_and_encloses():
    x = RadicalReal({2: Fraction(1, 2)})
    lo1, hi1 = radical_refine(x, Fraction(1, 100))
    lo2, hi2 = radical_refine(x, Fraction(1, 10 ** 9))
    assert lo1 <= lo2 <= hi2 <= hi1
    assert lo2 ** 2 <= 2 <= hi2 ** 2


@given(st.dictionaries(st.sampled_from([2, 3, 5, 7]), st.fractions(-6, 6, max_denominator=5), min_size=1))
def test_less_than_one_matches_logs(exps):
    x = RadicalReal(exps)
    s = sum(float(e) * math.log(p) for p, e in x.exponents.items())
    assume(abs(s) > 1e-9 or not x.exponents)
    assert radical_less_than_one(x) == (s < 0)


def test_less_than_one_large_exponents():
    # 3^k vs 2^j with k/j just on either side of log 2 / log 3
    k = 10 ** 40
    with mpmath.workdps(80):
        j_small = int(mpmath.floor(k * mpmath.log(3) / mpmath.log(2)))
    assert radical_less_than_one(RadicalReal({3: k, 2: -(j_small + 1)}))
    assert not radical_less_than_one(RadicalReal({3: k, 2: -j_small}))
    assert not radical_less_than_one(RadicalReal({}))


@given(st.fractions(Fraction(1, 50), 3, max_denominator=50), st.fractions(Fraction(1, 50), 3, max_denominator=50))
def test_compare_rational(x, c):
    r = RadicalReal.from_rational(x)
    assert radical_compare(r, c) == (x > c) - (x < c)


def test_compare_radical():
    assert radical_compare(RadicalReal({2: Fraction(1, 2)}), Fraction(1414, 1000)) == 1
    assert radical_compare(RadicalReal({2: Fraction(1, 2)}), Fraction(1415, 1000)) == -1
    with pytest.raises(ValueError):
        RadicalReal.from_rational(Fraction(-1, 2))
