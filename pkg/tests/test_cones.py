import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mahlerkit import cones
from mahlerkit.selfcheck import oracle_line_cone

vec2 = st.lists(st.integers(-4, 4), min_size=2, max_size=2)
small_nonneg = lambda t: st.lists(st.integers(0, 5), min_size=t, max_size=t).filter(any)  # noqa: E731


def test_lp_optimal_and_certified():
    # max x + y  s.t.  x + 2y + s = 4, 3x + y + u = 6
    A = [[1, 2, 1, 0], [3, 1, 0, 1]]
    b = [4, 6]
    res = cones.lp_solve([1, 1, 0, 0], A, b)
    assert res.status == "optimal" and res.optimum == Fraction(14, 5)
    assert res.verify([1, 1, 0, 0], A, b, [True] * 4)


def test_lp_infeasible_farkas():
    A, b = [[1, 1]], [-1]
    res = cones.lp_solve([0, 0], A, b)
    assert res.status == "infeasible"
    assert res.verify([0, 0], A, b, [True, True])


def test_lp_unbounded_ray():
    A, b = [[1, -1]], [1]
    res = cones.lp_solve([1, 0], A, b)
    assert res.status == "unbounded"
    assert res.verify([1, 0], A, b, [True, True])


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=3),
       st.lists(st.integers(-5, 5), min_size=1, max_size=3), st.lists(st.integers(-2, 2), min_size=3, max_size=3))
def test_lp_certificates_always_verify(A, b, c):
    A = A[:len(b)]
    b = b[:len(A)]
    res = cones.lp_solve(c, A, b)
    assert res.verify(c, A, b, [True] * 3)


def _brute_member(x, gens):
    """Caratheodory: nonnegative solve on every linearly independent subset."""
    import sympy
    X = sympy.Matrix(x)
    if not any(x):
        return True
    for s in range(1, len(gens) + 1):
        for idx in itertools.combinations(range(len(gens)), s):
            B = sympy.Matrix([gens[i] for i in idx]).T
            if B.rank() < s:
                continue
            sol = (B.T * B).inv() * B.T * X
            if B * sol == X and all(v >= 0 for v in sol):
                return True
    return False


@given(st.lists(vec2, min_size=0, max_size=4), vec2)
def test_membership_matches_caratheodory(gens, x):
    cone = cones.RationalCone(gens, 2)
    res = cones.cone_member(x, cone)
    assert res.verify(x, cone)
    assert res.member == _brute_member(x, gens)


@given(st.lists(small_nonneg(3), min_size=1, max_size=5))
def test_basis_is_minimal_and_generating(gens):
    kept, certs = cones.cone_basis(gens, certificates=True)
    for i, g in enumerate(kept):
        others = cones.RationalCone([h for j, h in enumerate(kept) if j != i] or [], 3)
        if any(h != g for h in kept):
            assert not cones.cone_member(g, others).member
    sub = cones.RationalCone(kept, 3)
    for i, coeffs in certs.items():
        assert cones.cone_member(gens[i], sub).member
        assert all(c >= 0 for c in coeffs)


def test_enclosing_cone_rational_weights():
    gens = [(1, 0, 1), (0, 1, 1), (1, 1, 1), (2, 1, 2)]
    w = [-1, -1, 0]
    cone = cones.RationalCone(gens, 3)
    rays = cones.enclosing_simplicial_cone(cone, w)
    assert len(rays) == cone.rank()
    enc = cones.RationalCone(rays, 3)
    assert all(cones.cone_member(g, enc).member for g in gens)
    assert all(sum(a * b for a, b in zip(w, u)) < 0 for u in rays)


def test_enclosing_cone_rank_deficient():
    # square pyramid: four extreme rays in rank 3, so new rays are needed
    gens = [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)]
    cone = cones.RationalCone(gens, 3)
    assert cone.rank() == 3 and len(cones.cone_basis(gens)) == 4
    w = [Fraction(1, 3), Fraction(1, 5), -1]
    rays = cones.enclosing_simplicial_cone(cone, w)
    assert len(rays) == 3
    assert all(cones.cone_member(g, cones.RationalCone(rays, 3)).member for g in gens)
    assert all(sum(a * b for a, b in zip(w, u)) < 0 for u in rays)


def test_enclosing_cone_in_a_plane():
    gens = [(1, 0, 0), (1, 1, 0), (1, 2, 0), (2, 3, 0)]
    rays = cones.enclosing_simplicial_cone(cones.RationalCone(gens, 3), [-1, 0, 0])
    assert len(rays) == 2
    assert all(cones.cone_member(g, cones.RationalCone(rays, 3)).member for g in gens)


def test_enclosing_cone_rejects_bad_half_space():
    with pytest.raises(ValueError):
        cones.enclosing_simplicial_cone(cones.RationalCone([(1, 0)], 2), [1, 0])


def test_intersection_example():
    cone = cones.RationalCone([(0, 1)], 2)
    assert cones.line_cone_intersection((0, 0), (1, 0), [(3, 0), (5, 2)], cone) == [3]


def test_intersection_unbounded():
    cone = cones.RationalCone([(1, 0)], 2)
    with pytest.raises(cones.UnboundedIntersection):
        cones.line_cone_intersection((0, 0), (1, 0), [(0, 0)], cone)


@given(st.integers(0, 3), st.lists(st.integers(0, 4), min_size=2, max_size=2),
       st.lists(st.lists(st.integers(0, 6), min_size=2, max_size=2), min_size=1, max_size=2))
def test_intersection_matches_brute_force(which, lam, Gamma):
    mu1, rest = [((1, 2), [(2, 1)]), ((1, 0), [(0, 1)]), ((3, 1), [(1, 1), (0, 1)]), ((1, 1), [])][which]
    cone = cones.RationalCone(rest, 2)
    got = cones.line_cone_intersection(lam, mu1, Gamma, cone)
    assert [k for k in got if k <= 30] == oracle_line_cone(lam, mu1, Gamma, rest, 30)
    assert cones.bound_Bd_check(lam, mu1, Gamma, cone, got)
