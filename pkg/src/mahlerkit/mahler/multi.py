"""Multivariate block systems ``G(z) = A(z) G(z^T)`` with ``T = q^l I_t``.

Each block is a univariate system ``A_i`` with its variable replaced by the
monomial ``z^mu_i``.  Truncation is by total degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from ..multlat import rows_pairwise_independent
from ..numbers import ZERO
from .poly import MPoly, Poly
from .system import MahlerError, MahlerSystem, expand


class RadixMismatch(MahlerError):
    pass


class DependentExponents(MahlerError):
    def __init__(self, pair):
        self.pair = pair
        i, j = pair
        super().__init__(f"exponent vectors {i + 1} and {j + 1} are linearly dependent over Q")


def substitute_monomial(series, mu, N: int) -> MPoly:
    """``sum c_n z^n  ->  sum c_n z^(n mu)``, keeping total degree ``<= N``."""
    mu = tuple(int(m) for m in mu)
    if not any(mu):
        raise ValueError("exponent vector must be nonzero")
    if any(m < 0 for m in mu):
        raise ValueError("exponent vector must be nonnegative")
    step = sum(mu)
    terms = {}
    for n, c in enumerate(series):
        if n * step > N:
            break
        if c:
            terms[tuple(n * m for m in mu)] = c
    return MPoly(len(mu), terms)


def fiber_decompose(h: MPoly, mu1) -> dict:
    """Split ``h`` as ``sum_lambda z^lambda a_lambda(z^mu1)``.

    Classes are taken modulo ``Z mu1`` inside the nonnegative orthant; the
    key of a class is its element of smallest Euclidean norm (ties broken
    lexicographically), which for ``mu1 >= 0`` is the element that cannot be
    lowered by ``mu1`` any further.
    """
    mu1 = tuple(int(m) for m in mu1)
    if not any(mu1) or any(m < 0 for m in mu1):
        raise ValueError("mu1 must be a nonzero nonnegative vector")
    support = [j for j, m in enumerate(mu1) if m]
    fibers: dict = {}
    for e, c in h.terms.items():
        k = min(e[j] // mu1[j] for j in support)
        lam = tuple(x - k * m for x, m in zip(e, mu1))
        fibers.setdefault(lam, {})[k] = c
    out = {}
    for lam in sorted(fibers, key=lambda v: (sum(x * x for x in v), v)):
        coeffs = fibers[lam]
        out[lam] = Poly([coeffs.get(k, ZERO) for k in range(max(coeffs) + 1)])
    return out


def reconstruct(fibers: dict, mu1, t: int) -> MPoly:
    out = MPoly(t)
    for lam, a in fibers.items():
        out = out + MPoly(t, {tuple(l + k * m for l, m in zip(lam, mu1)): c for k, c in enumerate(a.c)})
    return out


@dataclass
class Block:
    system: MahlerSystem
    mu: tuple
    offset: int          # first row of this block in the big matrix

    def to_json(self):
        return {"mu": list(self.mu), "offset": self.offset,
                "distinguished_row": self.offset + self.system.distinguished,
                "system": self.system.to_json()}


@dataclass
class MultiMahlerSystem:
    t: int
    radix: int
    blocks: list

    @property
    def T(self):
        return [[self.radix if i == j else 0 for j in range(self.t)] for i in range(self.t)]

    @property
    def spectral_radius(self) -> int:
        return self.radix

    @property
    def dimension(self) -> int:
        return sum(b.system.m for b in self.blocks)

    def distinguished_rows(self):
        return [b.offset + b.system.distinguished for b in self.blocks]

    def block_entry(self, i: int, r: int, c: int):
        """Entry ``(r, c)`` of block ``i`` as numerator/denominator sparse polynomials."""
        b = self.blocks[i]
        x = b.system.matrix[r][c]
        return MPoly.from_univariate(x.num, b.mu), MPoly.from_univariate(x.den, b.mu)

    def to_json(self):
        return {"t": self.t, "T": self.T, "spectral_radius": str(self.spectral_radius),
                "dimension": self.dimension,
                "blocks": [b.to_json() for b in self.blocks]}


def build_block_system(class_inputs, check_exponents: bool = True) -> MultiMahlerSystem:
    """Assemble the block-diagonal system from ``[(system, mu), ...]`` sharing one radix."""
    if not class_inputs:
        raise MahlerError("no blocks given")
    radices = {S.q for S, _ in class_inputs}
    if len(radices) != 1:
        raise RadixMismatch(f"blocks have different radices {sorted(radices)}")
    mus = [tuple(int(m) for m in mu) for _, mu in class_inputs]
    t = len(mus[0])
    if any(len(mu) != t for mu in mus):
        raise MahlerError("exponent vectors have different lengths")
    if any(not any(mu) or min(mu) < 0 for mu in mus):
        raise MahlerError("exponent vectors must be nonzero and nonnegative")
    if check_exponents:
        pair = rows_pairwise_independent(mus)
        if pair is not None:
            raise DependentExponents(pair)
    blocks, off = [], 0
    for (S, _), mu in zip(class_inputs, mus):
        blocks.append(Block(S, mu, off))
        off += S.m
    return MultiMahlerSystem(t, radices.pop(), blocks)


def _monomials(t: int, N: int):
    for d in range(N + 1):
        for e in product(range(d + 1), repeat=t):
            if sum(e) == d:
                yield e


def expand_block(M: MultiMahlerSystem, i: int, N: int) -> list:
    """Expansion of block ``i`` to total degree ``N`` by its own multivariate recurrence.

    Solves ``a(z^mu) G(z) = Ahat(z^mu) G(z^T)`` monomial by monomial in order of
    total degree; ``G(0)`` comes from the block's seeds.
    """
    b = M.blocks[i]
    S, mu = b.system, b.mu
    a, Ahat = S.normalized()
    am = MPoly.from_univariate(a, mu).terms
    Am = [[MPoly.from_univariate(P, mu).terms for P in row] for row in Ahat]
    m, R = S.m, M.radix
    a0_inv = a[0].inverse()
    G = {(0,) * M.t: tuple(comp[0] for comp in expand(S, 0))}
    for e in _monomials(M.t, N):
        if not any(e):
            continue
        v = [ZERO] * m
        for f, coef in am.items():
            if any(f) and all(x >= y for x, y in zip(e, f)):
                prev = G.get(tuple(x - y for x, y in zip(e, f)))
                if prev:
                    for r in range(m):
                        v[r] = v[r] - coef * prev[r]
        for r in range(m):
            for c in range(m):
                for f, coef in Am[r][c].items():
                    d = tuple(x - y for x, y in zip(e, f))
                    if min(d) < 0 or any(x % R for x in d):
                        continue
                    src = G.get(tuple(x // R for x in d))
                    if src and src[c]:
                        v[r] = v[r] + coef * src[c]
        if any(v):
            G[e] = tuple(x * a0_inv for x in v)
    return [MPoly(M.t, {e: vec[r] for e, vec in G.items()}) for r in range(m)]

