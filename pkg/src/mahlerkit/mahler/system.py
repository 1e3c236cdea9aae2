"""Univariate Mahler systems ``G(z) = A(z) G(z^q)``: expansion, iteration and twisting."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import linalg
from ..numbers import ZERO, CycloElem, RootOfUnity, lcm, orbit_of_root
from .parser import parse_coefficient, parse_ratfunc
from .poly import Poly, RatFunc


class MahlerError(ValueError):
    pass


class InsufficientSeeds(MahlerError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"seed coefficients required at index {index}: the recurrence does not determine it")


class InconsistentSeeds(MahlerError):
    def __init__(self, index: int, detail: str = ""):
        self.index = index
        super().__init__(f"seed coefficients inconsistent with the system at index {index}" + (f": {detail}" if detail else ""))


class SingularSystem(MahlerError):
    pass


def matmul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = RatFunc(0)
            for t in range(k):
                if A[i][t] and B[t][j]:
                    acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def matrix_inverse(M):
    """Inverse of a square matrix of rational functions (Gauss--Jordan)."""
    n = len(M)
    aug = [list(row) + [RatFunc(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = linalg.rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise SingularSystem("matrix is not invertible over Q(z)")
    return [row[n:] for row in R]


@dataclass
class MahlerSystem:
    """``G(z) = A(z) G(z^q)`` with seed coefficients pinning down the solution vector ``G``."""

    q: int
    matrix: list                    # m x m RatFunc
    seeds: dict                     # index -> tuple of m CycloElem
    distinguished: int = 0
    labels: tuple = ()
    essential: tuple = ()           # components carrying the determinant condition (default: all)
    _norm: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.q < 2:
            raise MahlerError("radix must be >= 2")
        m = len(self.matrix)
        if m == 0 or any(len(row) != m for row in self.matrix):
            raise MahlerError("matrix must be square and nonempty")
        self.matrix = [[RatFunc.coerce(x) for x in row] for row in self.matrix]
        self.seeds = {int(k): tuple(CycloElem.coerce(c) for c in v) for k, v in sorted(self.seeds.items())}
        for k, v in self.seeds.items():
            if len(v) != m:
                raise MahlerError(f"seed at index {k} has {len(v)} entries, expected {m}")
        if not 0 <= self.distinguished < m:
            raise MahlerError("distinguished row out of range")
        if not self.labels:
            self.labels = tuple(f"g{i}" for i in range(m))
        self.essential = tuple(self.essential) or tuple(range(m))
        if not self.det():
            raise SingularSystem("det A(z) vanishes identically")

    @property
    def m(self) -> int:
        return len(self.matrix)

    @property
    def conductor(self) -> int:
        ns = [x.num.conductor() for row in self.matrix for x in row]
        ns += [x.den.conductor() for row in self.matrix for x in row]
        ns += [c.n for v in self.seeds.values() for c in v]
        return lcm(*ns)

    def det(self) -> RatFunc:
        """Determinant of the essential block, i.e. of ``A`` unless the system is a twist.

        In a twist the components indexed by the pre-periodic part of the
        root orbit are fed by, but never feed, the periodic part, so their
        columns vanish; the determinant condition lives on the periodic part.
        """
        E = self.essential
        d = linalg.det([[self.matrix[r][c] for c in E] for r in E])
        return RatFunc.coerce(d) if not isinstance(d, RatFunc) else d

    def normalized(self):
        """``(a, Ahat)`` with ``A = Ahat / a``, ``a`` the lcm of the entry denominators."""
        if self._norm is None:
            a = Poly.const(1)
            for row in self.matrix:
                for x in row:
                    if x.den.deg > 0:
                        a = a * (x.den // a.gcd(x.den))
            if not a[0]:
                raise SingularSystem("A(z) has a pole at z = 0")
            a = a * a[0].inverse()
            Ahat = [[(x.num * (a // x.den)) if x else Poly() for x in row] for row in self.matrix]
            self._norm = (a, Ahat)
        return self._norm

    # -- serialization ------------------------------------------------------

    @classmethod
    def from_json(cls, d: dict) -> "MahlerSystem":
        matrix = [[parse_ratfunc(e) for e in row] for row in d["matrix"]]
        if d.get("convention", "forward") == "inverse":
            # G(z^q) = B(z) G(z)  <=>  G(z) = B(z)^{-1} G(z^q)
            B0 = [[x(CycloElem.rational(0)) if x.den[0] else None for x in row] for row in matrix]
            if any(v is None for row in B0 for v in row) or not linalg.det(B0):
                raise SingularSystem("inverse convention needs det B(0) != 0")
            matrix = matrix_inverse(matrix)
        elif d.get("convention", "forward") != "forward":
            raise MahlerError(f"unknown convention {d['convention']!r}")
        seeds = {int(k): tuple(parse_coefficient(c) for c in v) for k, v in d.get("seeds", {}).items()}
        return cls(int(d["q"]), matrix, seeds, int(d.get("distinguished", 0)),
                   tuple(d.get("labels", ())), tuple(d.get("essential", ())))

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "matrix": [[x.to_expr() for x in row] for row in self.matrix],
            "seeds": {str(k): [c.to_expr() for c in v] for k, v in self.seeds.items()},
            "distinguished": self.distinguished,
            "labels": list(self.labels),
            "essential": list(self.essential),
        }


def _nonsingular(M) -> bool:
    return linalg.det(M) != 0


def expand(S: MahlerSystem, N: int) -> list:
    """Coefficients ``0..N`` of every component of ``G``; ``out[i][n]`` is a CycloElem."""
    a, Ahat = S.normalized()
    m, q = S.m, S.q
    a0_inv = a[0].inverse()
    G = []

    def rhs(n):
        v = [ZERO] * m
        for k in range(n % q, n + 1, q):
            i = (n - k) // q
            if i == n:
                continue
            Gi = G[i]
            if not any(Gi):
                continue
            for r in range(m):
                acc = v[r]
                for c in range(m):
                    coef = Ahat[r][c][k]
                    if coef and Gi[c]:
                        acc = acc + coef * Gi[c]
                v[r] = acc
        for j in range(1, min(n, a.deg) + 1):
            if a[j]:
                for r in range(m):
                    v[r] = v[r] - a[j] * G[n - j][r]
        return v

    # index 0: (a0 I - Ahat(0)) G_0 = 0
    M0 = [[(a[0] if r == c else ZERO) - Ahat[r][c][0] for c in range(m)] for r in range(m)]
    if _nonsingular(M0):
        G0 = tuple([ZERO] * m)
        if 0 in S.seeds and any(S.seeds[0]):
            raise InconsistentSeeds(0, "the recurrence forces G_0 = 0")
    else:
        if 0 not in S.seeds:
            raise InsufficientSeeds(0)
        G0 = S.seeds[0]
        for r in range(m):
            acc = ZERO
            for c in range(m):
                acc = acc + M0[r][c] * G0[c]
            if acc:
                raise InconsistentSeeds(0, "(a(0) I - Ahat(0)) G_0 != 0")
    G.append(tuple(G0))
    for n in range(1, N + 1):
        v = rhs(n)
        Gn = tuple(x * a0_inv for x in v)
        if n in S.seeds and tuple(S.seeds[n]) != Gn:
            raise InconsistentSeeds(n)
        G.append(Gn)
    series = [[G[n][r] for n in range(N + 1)] for r in range(m)]
    if residual(S, series, N):
        raise InconsistentSeeds(N, "residual check failed")
    return series


def residual(S: MahlerSystem, series, N: int) -> list:
    """Indices ``n <= N`` where ``a(z) G(z) - Ahat(z) G(z^q)`` has a nonzero coefficient."""
    a, Ahat = S.normalized()
    bad = []
    for r in range(S.m):
        for n in range(N + 1):
            acc = ZERO
            for j in range(min(n, a.deg) + 1):
                if a[j]:
                    acc = acc + a[j] * series[r][n - j]
            for c in range(S.m):
                P = Ahat[r][c]
                for k in range(n % S.q, min(n, P.deg) + 1, S.q):
                    if P[k]:
                        acc = acc - P[k] * series[c][(n - k) // S.q]
            if acc:
                bad.append(n)
    return sorted(set(bad))


def iterate(S: MahlerSystem, ell: int) -> MahlerSystem:
    """System of radix ``q**ell`` with matrix ``A(z) A(z^q) ... A(z^(q^(ell-1)))``."""
    if ell < 1:
        raise MahlerError("iteration count must be >= 1")
    M = S.matrix
    for j in range(1, ell):
        M = matmul(M, [[x.inflate(S.q ** j) for x in row] for row in S.matrix])
    return MahlerSystem(S.q ** ell, M, dict(S.seeds), S.distinguished, S.labels, S.essential)


def twist(S: MahlerSystem, zeta: RootOfUnity) -> MahlerSystem:
    """System whose distinguished component expands to ``f(zeta z)``.

    Components are ``G(w z)`` for ``w`` in the forward orbit of ``zeta`` under
    ``x -> x**q``; block row ``w`` carries ``A(w z)`` in block column ``w**q``.
    """
    orbit = orbit_of_root(zeta, S.q)
    cond = lcm(zeta.order, S.conductor)
    m = S.m
    pos = {w: i for i, w in enumerate(orbit)}
    zero = RatFunc(0)
    big = [[zero] * (m * len(orbit)) for _ in range(m * len(orbit))]
    for bi, w in enumerate(orbit):
        bj = pos[w ** S.q]
        wc = CycloElem.root(w, cond)
        for r in range(m):
            for c in range(m):
                big[bi * m + r][bj * m + c] = S.matrix[r][c].scale_var(wc)
    seeds = {}
    for n, vec in S.seeds.items():
        seeds[n] = tuple(CycloElem.root(w ** n, cond) * x for w in orbit for x in vec)
    labels = tuple(f"{lab}@{_root_label(w)}" for w in orbit for lab in S.labels)
    start = pos[orbit[-1] ** S.q]  # the orbit enters its cycle here
    essential = tuple(b * m + e for b in range(start, len(orbit)) for e in S.essential)
    return MahlerSystem(S.q, big, seeds, S.distinguished, labels, essential)


def _root_label(w: RootOfUnity) -> str:
    e = w.exponent
    return "1" if e == 0 else f"e(2pi*i*{e.numerator}/{e.denominator})"

