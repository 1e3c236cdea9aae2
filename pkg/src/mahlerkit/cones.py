"""Exact rational polyhedral cones and the simplex method behind them.

Everything here is rational: membership answers come with either the
nonnegative coefficients or a separating functional (Farkas), and norm
comparisons are done on squares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import linalg


class UnboundedIntersection(ValueError):
    pass


def _vec(v):
    return tuple(Fraction(x) for x in v)


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


@dataclass(frozen=True)
class RationalCone:
    generators: tuple
    ambient_dim: int

    def __init__(self, generators, ambient_dim=None):
        gens = tuple(_vec(g) for g in generators)
        if ambient_dim is None:
            if not gens:
                raise ValueError("ambient dimension needed for a cone without generators")
            ambient_dim = len(gens[0])
        if any(len(g) != ambient_dim for g in gens):
            raise ValueError("generator dimension mismatch")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "ambient_dim", ambient_dim)

    def rank(self):
        return linalg.rank([list(g) for g in self.generators], self.ambient_dim) if self.generators else 0


# ---------------------------------------------------------------------------
# simplex


@dataclass
class LPResult:
    status: str                      # "optimal" | "infeasible" | "unbounded"
    optimum: Fraction | None = None
    x: list | None = None            # primal solution
    farkas: list | None = None       # y with y.A_j >= 0 (=0 on free vars) and y.b < 0
    ray: list | None = None          # A d = 0, d feasible direction, improving the objective
    maximize: bool = True

    def verify(self, c, A, b, nonneg) -> bool:
        """Check whichever certificate this result carries by exact substitution."""
        if self.status == "optimal":
            ok = all(_dot(row, self.x) == bi for row, bi in zip(A, b))
            ok = ok and all(xj >= 0 for xj, f in zip(self.x, nonneg) if f)
            return ok and _dot(c, self.x) == self.optimum
        if self.status == "infeasible":
            y = self.farkas
            cols = list(zip(*A)) if A else []
            for j, f in enumerate(nonneg):
                s = _dot(y, cols[j]) if cols else Fraction(0)
                if (f and s < 0) or (not f and s != 0):
                    return False
            return _dot(y, b) < 0
        d = self.ray
        return (all(_dot(row, d) == 0 for row in A)
                and all(dj >= 0 for dj, f in zip(d, nonneg) if f)
                and (_dot(c, d) > 0 if self.maximize else _dot(c, d) < 0))


def _pivot(T, basis, r, c):
    piv = T[r][c]
    T[r] = [v / piv for v in T[r]]
    for i in range(len(T)):
        if i != r and T[i][c]:
            f = T[i][c]
            Tr = T[r]
            T[i] = [a - f * b if b else a for a, b in zip(T[i], Tr)]
    basis[r] = c


def _run_simplex(T, basis, cost, allowed):
    """Minimize ``cost`` over the tableau with Bland's rule; returns None or the unbounded column."""
    while True:
        enter = None
        for j in allowed:
            if j in basis:
                continue
            red = cost[j] - sum((cost[bi] * T[i][j] for i, bi in enumerate(basis) if T[i][j]), Fraction(0))
            if red < 0:
                enter = j
                break
        if enter is None:
            return None
        best = None
        for i, row in enumerate(T):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return enter
        _pivot(T, basis, best[1], enter)


def lp_solve(objective, A, b, nonneg=None, maximize=True) -> LPResult:
    """Optimize ``objective . x`` subject to ``A x = b`` with the flagged variables ``>= 0``.

    Exact two-phase simplex with Bland's rule.  Infeasible problems carry a
    Farkas vector, unbounded ones a recession ray.
    """
    n = len(objective)
    A = [_vec(row) for row in A]
    b = _vec(b)
    c = _vec(objective)
    if nonneg is None:
        nonneg = [True] * n
    if len(A) != len(b) or any(len(row) != n for row in A) or len(nonneg) != n:
        raise ValueError("dimension mismatch in linear program")
    m = len(A)
    # expanded columns: (original index, sign)
    cols = []
    for j in range(n):
        cols.append((j, 1))
        if not nonneg[j]:
            cols.append((j, -1))
    ncols = len(cols)
    signs = [(-1 if bi < 0 else 1) for bi in b]
    T = []
    for i in range(m):
        s = signs[i]
        row = [s * sg * A[i][j] for j, sg in cols]
        row += [Fraction(int(k == i)) for k in range(m)]
        row.append(s * b[i])
        T.append(row)
    basis = [ncols + i for i in range(m)]
    cost1 = [Fraction(0)] * ncols + [Fraction(1)] * m
    _run_simplex(T, basis, cost1, range(ncols + m))
    w = sum((cost1[bi] * T[i][-1] for i, bi in enumerate(basis)), Fraction(0))
    if w > 0:
        ystar = [sum((cost1[bi] * T[i][ncols + k] for i, bi in enumerate(basis)), Fraction(0))
                 for k in range(m)]
        farkas = [-signs[k] * ystar[k] for k in range(m)]
        return LPResult("infeasible", farkas=farkas)
    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= ncols:
            j = next((j for j in range(ncols) if T[i][j]), None)
            if j is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, basis, i, j)
        i += 1
    T = [row[:ncols] + [row[-1]] for row in T]
    sgn = -1 if maximize else 1
    cost2 = [sgn * sg * c[j] for j, sg in cols]
    enter = _run_simplex(T, basis, cost2, range(ncols))
    if enter is not None:
        d = [Fraction(0)] * ncols
        d[enter] = Fraction(1)
        for i, bi in enumerate(basis):
            d[bi] = -T[i][enter]
        ray = [Fraction(0)] * n
        for k, (j, sg) in enumerate(cols):
            ray[j] += sg * d[k]
        return LPResult("unbounded", ray=ray, maximize=maximize)
    xe = [Fraction(0)] * ncols
    for i, bi in enumerate(basis):
        xe[bi] = T[i][-1]
    x = [Fraction(0)] * n
    for k, (j, sg) in enumerate(cols):
        x[j] += sg * xe[k]
    return LPResult("optimal", optimum=_dot(c, x), x=x, maximize=maximize)


# ---------------------------------------------------------------------------
# cones


@dataclass
class Membership:
    member: bool
    coefficients: list | None = None   # a_i >= 0 with sum a_i g_i = x
    functional: list | None = None     # phi with phi(g) >= 0 on generators, phi(x) < 0

    def __bool__(self):
        return self.member

    def verify(self, x, cone: RationalCone) -> bool:
        x = _vec(x)
        if self.member:
            if any(a < 0 for a in self.coefficients):
                return False
            total = [sum((a * g[k] for a, g in zip(self.coefficients, cone.generators)), Fraction(0))
                     for k in range(cone.ambient_dim)]
            return tuple(total) == x
        phi = self.functional
        return all(_dot(phi, g) >= 0 for g in cone.generators) and _dot(phi, x) < 0


def _primitive(v):
    """Positive rescaling of a rational vector to a primitive integer vector."""
    den = 1
    for a in v:
        den = den * a.denominator // math.gcd(den, a.denominator)
    ints = [int(a * den) for a in v]
    g = 0
    for a in ints:
        g = math.gcd(g, a)
    return [Fraction(a // g) for a in ints] if g else [Fraction(0)] * len(v)


def cone_member(x, cone: RationalCone) -> Membership:
    """Decide ``x in cone`` exactly, with a certificate either way."""
    x = _vec(x)
    if len(x) != cone.ambient_dim:
        raise ValueError("dimension mismatch")
    gens = cone.generators
    if not gens:
        if not any(x):
            return Membership(True, coefficients=[])
        return Membership(False, functional=[-a for a in x])
    A = [[g[k] for g in gens] for k in range(cone.ambient_dim)]
    res = lp_solve([0] * len(gens), A, x)
    if res.status == "optimal":
        return Membership(True, coefficients=res.x)
    return Membership(False, functional=_primitive(res.farkas))


def cone_basis(generators, certificates=False):
    """Greedy minimal generating sublist: drop ``g`` when it lies in the cone of the others kept.

    With ``certificates=True`` also returns ``{dropped index: coefficients}``
    expressing each dropped generator over the final kept list.
    """
    gens = [_vec(g) for g in generators]
    if not gens:
        raise ValueError("empty generator list")
    keep = list(range(len(gens)))
    for i in range(len(gens)):
        others = [j for j in keep if j != i]
        if not others:
            continue
        if cone_member(gens[i], RationalCone([gens[j] for j in others], len(gens[i]))).member:
            keep = others
    kept = [gens[j] for j in keep]
    if not certificates:
        return kept
    certs = {}
    sub = RationalCone(kept, len(gens[0]))
    for i in range(len(gens)):
        if i not in keep:
            certs[i] = cone_member(gens[i], sub).coefficients
    return kept, certs


def _rational_weights(weights):
    if all(isinstance(w, (int, Fraction)) for w in weights):
        return [Fraction(w) for w in weights]
    return None


def _facet_normals(coords, t):
    """Primitive inward normals of the facets of ``cone(coords)`` (full-dimensional in ``Q^t``)."""
    normals = set()
    for sub in combinations(coords, t - 1):
        ns = linalg.nullspace([list(c) for c in sub], t)
        if len(ns) != 1:
            continue
        f = ns[0]
        vals = [_dot(f, c) for c in coords]
        if all(v >= 0 for v in vals):
            normals.add(tuple(_primitive(f)))
        elif all(v <= 0 for v in vals):
            normals.add(tuple(_primitive([-a for a in f])))
    return sorted(normals, key=lambda f: (sum(abs(a) for a in f), f))


def enclosing_simplicial_cone(cone: RationalCone, weights=None, is_negative=None):
    """``t`` independent integer rays spanning a simplicial cone that contains ``cone``.

    Every generator and every returned ray lies in the open half-space
    ``{v : w(v) < 0}``, where ``w`` is either the rational functional
    ``weights`` or the one behind the exact sign test ``is_negative``.

    The rays come from the dual side: the facet normals of the cone generate
    its dual, ``-w`` is interior to that dual, and any ``t`` facet normals
    whose open cone contains ``-w`` have a dual basis with both properties.
    Among those choices the one with the smallest entries is returned.
    """
    if is_negative is None:
        exact = _rational_weights(weights or [])
        if exact is None:
            raise ValueError("need rational weights or an exact sign predicate")

        def is_negative(v):
            return _dot(exact, v) < 0

    gens = list(cone.generators)
    for g in gens:
        if not is_negative(g):
            raise ValueError(f"generator {[str(a) for a in g]} is not in the open half-space")
    t = cone.rank()
    basis = []
    for g in cone_basis(gens):
        if g not in basis:
            basis.append(g)
    if len(basis) == t:
        return basis

    span_rows, _ = linalg.rref([list(g) for g in basis], cone.ambient_dim)
    cols = [[row[k] for row in span_rows] for k in range(cone.ambient_dim)]
    coords = [tuple(linalg.solve(cols, list(g))) for g in basis]
    best = None
    for F in combinations(_facet_normals(coords, t), t):
        if not linalg.det([list(f) for f in F]):
            continue
        inv, _ = linalg.rref([list(f) + [Fraction(int(i == j)) for j in range(t)] for i, f in enumerate(F)], 2 * t)
        rays = []
        for j in range(t):
            u = [inv[i][t + j] for i in range(t)]
            rays.append(_primitive([sum((u[i] * span_rows[i][k] for i in range(t)), Fraction(0))
                                    for k in range(cone.ambient_dim)]))
        if all(is_negative(u) for u in rays):
            size = max(abs(a) for u in rays for a in u)
            if best is None or (size, rays) < best:
                best = (size, rays)
    if best is None:
        raise ValueError("the functional lies on a face of the dual cone; no simplicial enclosure found")
    return best[1]


# ---------------------------------------------------------------------------
# lines against translated cones


def line_cone_intersection(lam, mu1, Gamma, cone: RationalCone) -> list[int]:
    """All ``k >= 0`` with ``lam + k*mu1`` in ``Gamma + cone``, via two LPs per ``gamma``."""
    lam, mu1 = _vec(lam), _vec(mu1)
    gens = cone.generators
    dim = len(lam)
    ks = set()
    for gamma in Gamma:
        gamma = _vec(gamma)
        # variables (k, a_1..a_s): k*mu1 - sum a_j g_j = gamma - lam
        A = [[mu1[r]] + [-g[r] for g in gens] for r in range(dim)]
        rhs = [gamma[r] - lam[r] for r in range(dim)]
        obj = [1] + [0] * len(gens)
        hi = lp_solve(obj, A, rhs, maximize=True)
        if hi.status == "infeasible":
            continue
        if hi.status == "unbounded":
            raise UnboundedIntersection(
                f"k is unbounded for gamma={[str(a) for a in gamma]}: mu1 lies in the cone")
        lo = lp_solve(obj, A, rhs, maximize=False)
        kmin = math.ceil(lo.optimum)
        kmax = math.floor(hi.optimum)
        ks.update(range(max(kmin, 0), kmax + 1))
    return sorted(ks)


def _le_times_sqrt_sum(L, a, b, c):
    """Exact test ``L <= sqrt(c) * (sqrt(a) + sqrt(b))`` for rationals ``L, a, b, c >= 0``."""
    if L <= 0:
        return True
    if c == 0:
        return False
    s = L * L / c - a - b
    if s <= 0:
        return True
    return s * s <= 4 * a * b


def bound_Bd_check(lam, mu1, Gamma, cone: RationalCone, ks=None) -> bool:
    """Every ``k`` in the intersection satisfies ``k <= B / d_lo``.

    ``B = max |gamma| + |lam|`` and ``d_lo = |phi(mu1)| / |phi|`` for a
    separating functional ``phi``, a lower bound on ``dist(mu1, cone)``.
    """
    lam, mu1 = _vec(lam), _vec(mu1)
    if ks is None:
        ks = line_cone_intersection(lam, mu1, Gamma, cone)
    if not ks:
        return True
    sep = cone_member(mu1, cone)
    if sep.member:
        raise ValueError("mu1 lies in the cone; no positive distance")
    phi = _vec(sep.functional)
    margin = -_dot(phi, mu1)
    phi2 = _dot(phi, phi)
    lam2 = _dot(lam, lam)
    for k in ks:
        L = k * margin
        if not any(_le_times_sqrt_sum(L, _dot(_vec(g), _vec(g)), lam2, phi2) for g in Gamma):
            return False
    return True
