from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mahlerkit.mahler import (DependentExponents, InconsistentSeeds, InsufficientSeeds, MahlerSystem, MPoly,
                              RadixMismatch, SingularSystem, build_block_system, expand, expand_block,
                              fiber_decompose, iterate, reconstruct, residual, substitute_monomial, twist)
from mahlerkit.numbers import CycloElem, RootOfUnity
from mahlerkit.samples import SAMPLES, system


def rat(x):
    return CycloElem.rational(Fraction(x))


def is_power(n, q):
    while n > 1 and n % q == 0:
        n //= q
    return n == 1


def test_fredholm_coefficients():
    f = expand(system("fredholm"), 300)[0]
    assert f == [rat(int(n >= 1 and is_power(n, 2))) for n in range(301)]


def test_thue_morse_coefficients():
    t = expand(system("thue-morse"), 300)[0]
    assert t == [rat((-1) ** bin(n).count("1")) for n in range(301)]


def test_cube_lacunary():
    f = expand(system("cube-lacunary"), 100)[0]
    assert f == [rat(int(n >= 1 and is_power(n, 3))) for n in range(101)]


def test_geometric():
    assert expand(system("geometric"), 40)[0] == [rat(1)] * 41


def test_extra_seed_cross_checked():
    d = dict(SAMPLES["fredholm"], seeds={"0": ["0", "1"], "1": ["1", "0"]})
    assert expand(MahlerSystem.from_json(d), 10)[0][1] == rat(1)
    d = dict(SAMPLES["fredholm"], seeds={"0": ["0", "1"], "1": ["2", "0"]})
    with pytest.raises(InconsistentSeeds):
        expand(MahlerSystem.from_json(d), 10)


def test_missing_seed():
    d = dict(SAMPLES["fredholm"], seeds={})
    with pytest.raises(InsufficientSeeds) as e:
        expand(MahlerSystem.from_json(d), 5)
    assert e.value.index == 0


def test_inconsistent_seed_at_zero():
    d = {"q": 2, "matrix": [["1 - z"]], "seeds": {"0": ["2"]}}
    assert expand(MahlerSystem.from_json(d), 3)[0][0] == rat(2)
    d = {"q": 2, "matrix": [["2 - z"]], "seeds": {"0": ["1"]}}
    with pytest.raises(InconsistentSeeds):
        expand(MahlerSystem.from_json(d), 3)


def test_singular_and_pole_at_origin():
    with pytest.raises(SingularSystem):
        MahlerSystem.from_json({"q": 2, "matrix": [["1", "z"], ["1", "z"]], "seeds": {}})
    with pytest.raises(SingularSystem):
        expand(MahlerSystem.from_json({"q": 2, "matrix": [["1/z"]], "seeds": {"0": ["1"]}}), 3)


def test_inverse_convention():
    # T(z^2) = T(z)/(1 - z) written as G(z^q) = B(z) G(z)
    d = {"q": 2, "matrix": [["1/(1 - z)"]], "seeds": {"0": ["1"]}, "convention": "inverse"}
    assert expand(MahlerSystem.from_json(d), 60) == expand(system("thue-morse"), 60)


def test_residual_vanishes():
    S = system("thue-morse")
    assert residual(S, expand(S, 50), 50) == []


@pytest.mark.parametrize("name", ["fredholm", "thue-morse"])
@pytest.mark.parametrize("order", [1, 2, 3, 4, 6, 8, 12])
def test_twist_coefficients(name, order):
    S = system(name)
    base = expand(S, 64)[S.distinguished]
    z = RootOfUnity.from_kn(1, order)
    T = twist(S, z)
    got = expand(T, 64)[T.distinguished]
    assert got == [CycloElem.root(z ** n) * c for n, c in enumerate(base)]


def test_twist_preperiodic_orbit_has_essential_block():
    T = twist(system("fredholm"), RootOfUnity.from_kn(1, 4))
    assert len(T.matrix) == 6 and T.essential == (4, 5)
    assert T.labels[0] == "g0@e(2pi*i*1/4)"


@pytest.mark.parametrize("name", sorted(SAMPLES))
@pytest.mark.parametrize("ell", [1, 2, 3])
def test_iteration_invariance(name, ell):
    S = system(name)
    assert expand(iterate(S, ell), 80) == expand(S, 80)


def test_json_roundtrip():
    T = twist(system("thue-morse"), RootOfUnity.from_kn(1, 3))
    again = MahlerSystem.from_json(T.to_json())
    assert expand(again, 30) == expand(T, 30)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=12),
       st.sampled_from([(1, 0), (2, 1), (1, 3), (0, 2)]), st.integers(4, 14))
def test_substitute_monomial(coeffs, mu, N):
    h = substitute_monomial([rat(c) for c in coeffs], mu, N)
    for n, c in enumerate(coeffs):
        e = (n * mu[0], n * mu[1])
        if c and sum(e) <= N:
            assert h.terms[e] == rat(c)
    assert all(sum(e) <= N for e in h.terms)


@given(st.dictionaries(st.tuples(st.integers(0, 6), st.integers(0, 6)), st.integers(-3, 3)),
       st.sampled_from([(1, 0), (1, 1), (2, 1), (1, 3)]))
def test_fiber_reconstruct(terms, mu1):
    h = MPoly(2, {e: rat(c) for e, c in terms.items()})
    fibers = fiber_decompose(h, mu1)
    assert reconstruct(fibers, mu1, 2) == h
    for lam in fibers:
        assert min(a - b for a, b in zip(lam, mu1) if b) < 0   # cannot be lowered further


def test_block_expansion_matches_substitution():
    F, TM = system("fredholm"), system("thue-morse")
    mus = [(1, 0), (0, 1), (1, 1)]
    M = build_block_system([(F, mus[0]), (TM, mus[1]), (F, mus[2])])
    assert M.T == [[2, 0], [0, 2]] and M.dimension == 5 and M.distinguished_rows() == [0, 2, 3]
    N = 14
    for i, (S, mu) in enumerate([(F, mus[0]), (TM, mus[1]), (F, mus[2])]):
        got = expand_block(M, i, N)
        for comp, series in zip(got, expand(S, N)):
            assert comp == substitute_monomial(series, mu, N)


def test_block_errors():
    F, C = system("fredholm"), system("cube-lacunary")
    with pytest.raises(RadixMismatch):
        build_block_system([(F, (1, 0)), (C, (0, 1))])
    with pytest.raises(DependentExponents) as e:
        build_block_system([(F, (1, 2)), (F, (2, 4))])
    assert "exponent vectors 1 and 2 are linearly dependent" in str(e.value)
