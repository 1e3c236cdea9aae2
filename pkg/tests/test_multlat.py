import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from mahlerkit.multlat import (DecompositionError, check_decomposition, factorize, integers_independent,
                               lvdp_decompose, mult_kernel, pairwise_independent, partition_bases)
from mahlerkit.numbers import RootOfUnity
from mahlerkit.selfcheck import oracle_decomposition_ok

unit_fracs = st.builds(lambda d, n: Fraction(n % (d - 1) + 1, d), st.integers(2, 50), st.integers(0, 100))


@given(st.fractions(Fraction(-10 ** 6), 10 ** 6, max_denominator=10 ** 6).filter(bool))
def test_factorize_roundtrip(x):
    c = factorize(x)
    want = {int(p): int(e) for p, e in sympy.factorint(x.numerator).items()}
    for p, e in sympy.factorint(x.denominator).items():
        want[int(p)] = want.get(int(p), 0) - int(e)
    assert {p: e for p, e in c.free.items() if e} == {p: e for p, e in want.items() if e and p != -1}
    assert c.torsion == (RootOfUnity.from_kn(1, 2) if x < 0 else RootOfUnity.from_kn(0, 1))


def test_intro_relation():
    rels = mult_kernel([factorize(Fraction(1, n)) for n in (2, 5, 10)])
    assert len(rels) == 1
    assert sorted((rels[0].exponents, tuple(-e for e in rels[0].exponents)))[0] in {(-1, -1, 1), (1, 1, -1)}


def test_pairwise_witness():
    res = pairwise_independent([factorize(Fraction(1, 2)), factorize(Fraction(1, 4))])
    assert not res and res.pair == (0, 1)
    assert res.relation.text() == "2·e1 = e2"


def test_torsion_relation():
    # (-1/2)^2 = 1/4: dependent, with exact relation after clearing torsion
    res = pairwise_independent([factorize(Fraction(-1, 2)), factorize(Fraction(1, 4))])
    assert not res
    assert res.relation.torsion.exponent in {Fraction(0), Fraction(1, 2)}


def _brute_dependent(a, b):
    return any(a ** i == b ** j for i in range(1, 21) for j in range(1, 21))


@given(st.lists(st.integers(2, 40), min_size=1, max_size=6))
def test_partition_is_equivalence(qs):
    classes = partition_bases(qs)
    label = {i: k for k, c in enumerate(classes) for i in c.members}
    assert sorted(label) == list(range(len(qs)))
    for i in range(len(qs)):
        for j in range(len(qs)):
            assert (label[i] == label[j]) == _brute_dependent(qs[i], qs[j])
    for c in classes:
        for i, a in zip(c.members, c.alignment):
            assert qs[i] ** a == c.radix


def test_integers_independent():
    assert integers_independent(2, 3)
    assert not integers_independent(4, 8)


def test_fixed_decompositions():
    d = lvdp_decompose([factorize(Fraction(1, n)) for n in (2, 5, 10)])
    assert [g.exponents for g in d.generators] == [{2: -1}, {5: -1}]
    assert d.exponents == [[1, 0], [0, 1], [1, 1]]
    d = lvdp_decompose([factorize(Fraction(*x)) for x in ((3, 4), (2, 9), (1, 2))])
    assert d.scale == 3 and d.exponents == [[3, 0], [0, 3], [2, 1]]
    assert [g.exponents for g in d.generators] == [{2: Fraction(-2, 3), 3: Fraction(1, 3)},
                                                   {2: Fraction(1, 3), 3: Fraction(-2, 3)}]


@given(st.lists(unit_fracs, min_size=1, max_size=4))
def test_decomposition_invariants(points):
    d = lvdp_decompose([factorize(p) for p in points])
    assert oracle_decomposition_ok(points, d) == []
    assert check_decomposition([factorize(p) for p in points], d) == []


def test_dependent_rank_case_stays_small():
    pts = [Fraction(3, 7), Fraction(7, 40), Fraction(3, 20), Fraction(1, 2)]
    d = lvdp_decompose([factorize(p) for p in pts])
    assert oracle_decomposition_ok(pts, d) == []
    assert max(abs(m) for row in d.exponents for m in row) < 10


def test_signed_points_carry_torsion():
    d = lvdp_decompose([factorize(Fraction(-1, 2)), factorize(Fraction(1, 3))])
    assert d.torsions[0] == RootOfUnity.from_kn(1, 2)


@pytest.mark.parametrize("bad", [Fraction(3, 2), Fraction(1), Fraction(-1)])
def test_decomposition_rejects_large_points(bad):
    with pytest.raises(DecompositionError):
        lvdp_decompose([factorize(bad)])


def test_decomposition_deterministic():
    rng = random.Random(5)
    pts = [Fraction(rng.randint(1, 20), rng.randint(21, 50)) for _ in range(4)]
    a = lvdp_decompose([factorize(p) for p in pts]).to_json()
    b = lvdp_decompose([factorize(p) for p in pts]).to_json()
    assert a == b
