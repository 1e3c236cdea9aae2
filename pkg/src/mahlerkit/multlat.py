"""Multiplicative lattices over the primes.

Rational points are handled through their prime-exponent vectors; the
torsion part (a root of unity) is carried alongside.  Independence always
means independence modulo torsion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint

from . import linalg
from .numbers import (
    ONE_ROOT,
    RadicalReal,
    RootOfUnity,
    lcm,
    radical_less_than_one,
    rat_str,
)


class FactorizationError(ValueError):
    pass


@dataclass(frozen=True)
class MultiplicativeCoordinates:
    """``torsion * prod p**free[p]``."""

    torsion: RootOfUnity
    free: dict = field(default_factory=dict)

    def primes(self):
        return sorted(self.free)

    def modulus_less_than_one(self) -> bool:
        num = math.prod(p ** e for p, e in self.free.items() if e > 0)
        den = math.prod(p ** -e for p, e in self.free.items() if e < 0)
        return num < den

    def abs_value(self) -> Fraction:
        v = Fraction(1)
        for p, e in self.free.items():
            v *= Fraction(p) ** e
        return v

    def __mul__(self, other):
        free = dict(self.free)
        for p, e in other.free.items():
            free[p] = free.get(p, 0) + e
        return MultiplicativeCoordinates(self.torsion * other.torsion,
                                         {p: e for p, e in sorted(free.items()) if e})

    def describe(self) -> str:
        v = rat_str(self.abs_value())
        if self.torsion.is_one():
            return v
        if self.torsion.exponent == Fraction(1, 2):
            return "-" + v
        t = self.torsion.exponent
        return f"exp(2pi*i*{t.numerator}/{t.denominator})*{v}"

    def to_json(self):
        return {"torsion": self.torsion.to_json(),
                "free": {str(p): e for p, e in self.free.items()}}


# trial division bound before handing the cofactor to sympy (Pollard rho / p-1 / ECM)
TRIAL_LIMIT = 10 ** 6


def _factor_int(n: int) -> dict:
    out = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d, step = 7, 0
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    while d * d <= n and d <= TRIAL_LIMIT:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += wheel[step]
        step = (step + 1) % 8
    if n > 1:
        try:
            rest = factorint(n)
        except Exception as exc:  # pragma: no cover - sympy failure is exotic
            raise FactorizationError(f"could not factor {n}") from exc
        for p, e in rest.items():
            out[p] = out.get(p, 0) + e
    return out


def factorize(x) -> MultiplicativeCoordinates:
    """Multiplicative coordinates of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("cannot factor 0")
    torsion = ONE_ROOT if x > 0 else RootOfUnity(Fraction(1, 2))
    free = dict(_factor_int(abs(x.numerator)))
    for p, e in _factor_int(x.denominator).items():
        free[p] = free.get(p, 0) - e
    return MultiplicativeCoordinates(torsion, {p: e for p, e in sorted(free.items()) if e})


def exponent_matrix(xs):
    """Rows: free-part vectors of ``xs`` over the sorted union of their primes."""
    primes = sorted({p for x in xs for p in x.free})
    return [[x.free.get(p, 0) for p in primes] for x in xs], primes


@dataclass(frozen=True)
class Relation:
    """``prod xs[i]**exponents[i] == torsion``; ``exact_power`` clears the torsion."""

    exponents: tuple
    torsion: RootOfUnity

    @property
    def exact_power(self) -> int:
        return self.torsion.order

    def text(self, labels=None) -> str:
        labels = labels or [f"e{i + 1}" for i in range(len(self.exponents))]

        def side(sign):
            terms = []
            for c, lab in zip(self.exponents, labels):
                if c * sign > 0:
                    terms.append(lab if abs(c) == 1 else f"{abs(c)}·{lab}")
            return " + ".join(terms) or "0"

        return f"{side(1)} = {side(-1)}"

    def to_json(self):
        return {"exponents": list(self.exponents), "torsion": self.torsion.to_json(),
                "exact_power": self.exact_power}


def mult_kernel(xs) -> list[Relation]:
    """Basis of ``{k : prod x_i**k_i is a root of unity}`` with the attached torsion values."""
    if not xs:
        return []
    M, _ = exponent_matrix(xs)
    if not M[0]:
        M = [[0] for _ in xs]
    basis = linalg.integer_kernel(M)
    out = []
    for k in basis:
        t = ONE_ROOT
        for x, ki in zip(xs, k):
            t = t * (x.torsion ** ki)
        out.append(Relation(tuple(k), t))
    return out


@dataclass(frozen=True)
class PairwiseResult:
    independent: bool
    pair: tuple | None = None
    relation: Relation | None = None

    def __bool__(self):
        return self.independent


def pairwise_independent(xs) -> PairwiseResult:
    """Check every pair; on failure return the first dependent pair (0-based) and its relation."""
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            rels = mult_kernel([xs[i], xs[j]])
            if rels:
                return PairwiseResult(False, (i, j), rels[0])
    return PairwiseResult(True)


# ---------------------------------------------------------------------------
# radix classes


@dataclass(frozen=True)
class BaseClass:
    members: tuple          # 0-based indices
    base: int               # primitive integer c with every member a power of c
    radix: int              # common radix rho = c**L
    alignment: tuple        # a_i with q_i**a_i == radix, aligned with members
    base_powers: tuple      # e_i with q_i == c**e_i

    def to_json(self):
        return {"members": [i + 1 for i in self.members], "base": self.base,
                "radix": str(self.radix), "alignment": list(self.alignment),
                "base_powers": list(self.base_powers)}


def _primitive_root(q: int) -> tuple[int, int]:
    f = _factor_int(q)
    g = 0
    for e in f.values():
        g = math.gcd(g, e)
    c = math.prod(p ** (e // g) for p, e in f.items())
    return c, g


def partition_bases(qs) -> list[BaseClass]:
    """Group radices that are multiplicatively dependent; classes ordered by first member."""
    if any(q < 2 for q in qs):
        raise ValueError("radices must be >= 2")
    groups = {}
    order = []
    for i, q in enumerate(qs):
        c, e = _primitive_root(q)
        if c not in groups:
            groups[c] = []
            order.append(c)
        groups[c].append((i, e))
    classes = []
    for c in order:
        members = groups[c]
        L = lcm(*(e for _, e in members))
        classes.append(BaseClass(
            members=tuple(i for i, _ in members),
            base=c,
            radix=c ** L,
            alignment=tuple(L // e for _, e in members),
            base_powers=tuple(e for _, e in members),
        ))
    return classes


def integers_independent(a: int, b: int) -> bool:
    """Multiplicative independence of two integers >= 2."""
    return _primitive_root(a)[0] != _primitive_root(b)[0]


# ---------------------------------------------------------------------------
# Loxton--van der Poorten decomposition


@dataclass
class LvdPDecomposition:
    generators: list        # RadicalReal beta_j
    torsions: list          # RootOfUnity zeta_i
    exponents: list         # r x t nonnegative integers mu_{i,j}
    primes: list            # coordinate order of the exponent space
    simplicial_rays: list   # the enclosing rays u_j before scaling (Fractions)
    scale: int              # D: generators are u_j / D

    @property
    def t(self):
        return len(self.generators)

    def point_exponents(self, i: int) -> dict:
        """Exponent map of ``beta ** mu_i``."""
        out = {}
        for mu, g in zip(self.exponents[i], self.generators):
            for p, e in g.exponents.items():
                out[p] = out.get(p, Fraction(0)) + mu * e
        return {p: e for p, e in sorted(out.items()) if e}

    def monomial_point(self, i: int) -> RadicalReal:
        return RadicalReal(self.point_exponents(i))

    def to_json(self):
        return {
            "t": self.t,
            "primes": list(self.primes),
            "generators": [g.to_json() for g in self.generators],
            "torsions": [z.to_json() for z in self.torsions],
            "exponents": [list(row) for row in self.exponents],
            "scale": self.scale,
        }


class DecompositionError(ValueError):
    pass


def lvdp_decompose(alphas) -> LvdPDecomposition:
    """Write each ``alpha_i = zeta_i * prod_j beta_j**mu_ij`` with independent ``beta_j < 1``."""
    from . import cones

    if not alphas:
        raise DecompositionError("need at least one point")
    for i, a in enumerate(alphas):
        if not a.free:
            raise DecompositionError(f"point {i + 1} has modulus 1")
        if not a.modulus_less_than_one():
            raise DecompositionError(f"point {i + 1} does not satisfy |alpha| < 1")
    M, primes = exponent_matrix(alphas)
    vs = [[Fraction(e) for e in row] for row in M]

    def negative(vec):
        return radical_less_than_one(RadicalReal(dict(zip(primes, vec))))

    cone = cones.RationalCone(vs)
    rays = cones.enclosing_simplicial_cone(cone, is_negative=negative)
    coeffs = []
    for v in vs:
        res = cones.cone_member(v, cones.RationalCone(rays))
        if not res.member:
            raise DecompositionError("enclosing cone does not contain a point vector")
        coeffs.append(res.coefficients)
    D = lcm(*(c.denominator for row in coeffs for c in row))
    mu = [[int(c * D) for c in row] for row in coeffs]
    gens = [RadicalReal(dict(zip(primes, (e / D for e in u)))) for u in rays]
    return LvdPDecomposition(
        generators=gens,
        torsions=[a.torsion for a in alphas],
        exponents=mu,
        primes=primes,
        simplicial_rays=[list(u) for u in rays],
        scale=D,
    )


def check_decomposition(alphas, dec: LvdPDecomposition) -> list[str]:
    """Problems with a decomposition (empty when all invariants hold)."""
    problems = []
    for i, a in enumerate(alphas):
        want = {p: Fraction(e) for p, e in a.free.items()}
        if dec.point_exponents(i) != want:
            problems.append(f"reconstruction fails for point {i + 1}")
        if dec.torsions[i] != a.torsion:
            problems.append(f"torsion mismatch for point {i + 1}")
        if any(m < 0 for m in dec.exponents[i]) or not any(dec.exponents[i]):
            problems.append(f"exponent row {i + 1} is negative or zero")
    for j, g in enumerate(dec.generators):
        if not radical_less_than_one(g):
            problems.append(f"generator {j + 1} is not < 1")
    if dec.generators:
        ps = sorted({p for g in dec.generators for p in g.exponents})
        den = lcm(*(e.denominator for g in dec.generators for e in g.exponents.values()))
        rows = [[int(g.exponents.get(p, 0) * den) for p in ps] for g in dec.generators]
        if linalg.integer_kernel(rows if ps else [[0]] * len(rows)):
            problems.append("generators are multiplicatively dependent")
    return problems


def rows_pairwise_independent(rows) -> tuple[int, int] | None:
    """First pair of rows that is linearly dependent over Q, or None."""
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if linalg.rank([[Fraction(v) for v in rows[i]], [Fraction(v) for v in rows[j]]]) < 2:
                return (i, j)
    return None
