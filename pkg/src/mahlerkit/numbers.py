"""Exact scalars: rationals, roots of unity, cyclotomic field elements and radical reals."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

import mpmath
from sympy import cyclotomic_poly, integer_nthroot, totient
from sympy.abc import x as _x

from . import linalg

Rat = Fraction


def parse_rat(s) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int into a reduced :class:`Fraction`."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise TypeError(f"expected rational string, got {type(s).__name__}")
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {s!r}") from exc


def rat_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def lcm(*xs: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), xs, 1)


# ---------------------------------------------------------------------------
# roots of unity


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """``exp(2*pi*i*exponent)`` with ``exponent`` a reduced fraction in ``[0, 1)``."""

    exponent: Fraction

    def __post_init__(self):
        e = Fraction(self.exponent) % 1
        object.__setattr__(self, "exponent", e)

    @classmethod
    def from_kn(cls, k: int, n: int) -> "RootOfUnity":
        if n <= 0:
            raise ValueError("order must be positive")
        return cls(Fraction(k, n))

    @property
    def order(self) -> int:
        return self.exponent.denominator

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        return RootOfUnity(self.exponent + other.exponent)

    def __pow__(self, k: int) -> "RootOfUnity":
        return RootOfUnity(self.exponent * k)

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(-self.exponent)

    def is_one(self) -> bool:
        return self.exponent == 0

    def to_json(self):
        return {"k": self.exponent.numerator, "n": self.exponent.denominator}

    @classmethod
    def from_json(cls, d) -> "RootOfUnity":
        return cls.from_kn(int(d["k"]), int(d["n"]))

    def __repr__(self):
        return f"RootOfUnity({self.exponent.numerator}/{self.exponent.denominator})"


ONE_ROOT = RootOfUnity(Fraction(0))


def orbit_of_root(zeta: RootOfUnity, q: int) -> list[RootOfUnity]:
    """Forward orbit of ``zeta`` under ``x -> x**q``, listed until the first repeat."""
    if q < 2:
        raise ValueError("q must be >= 2")
    seen = []
    cur = zeta
    while cur not in seen:
        seen.append(cur)
        cur = cur ** q
    return seen


# ---------------------------------------------------------------------------
# cyclotomic fields


@lru_cache(maxsize=None)
def phi(n: int) -> int:
    return int(totient(n))


@lru_cache(maxsize=None)
def cyclotomic_coeffs(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, constant term first."""
    p = cyclotomic_poly(n, _x, polys=True)
    return tuple(int(c) for c in reversed(p.all_coeffs()))


def _reduce_mod_cyclotomic(coeffs: list, n: int) -> tuple:
    d = phi(n)
    cyc = cyclotomic_coeffs(n)
    c = list(coeffs)
    for k in range(len(c) - 1, d - 1, -1):
        a = c[k]
        if a:
            for j in range(d):
                if cyc[j]:
                    c[k - d + j] -= a * cyc[j]
    c = c[:d] + [Fraction(0)] * (d - len(c))
    return tuple(Fraction(v) for v in c)


class CycloElem:
    """Element of ``Q(zeta_n)`` stored densely modulo the n-th cyclotomic polynomial.

    Operands of different conductors are lifted to the lcm conductor; no
    conductor minimization is performed afterwards.
    """

    __slots__ = ("n", "c")

    def __init__(self, n: int, coeffs):
        self.n = n
        coeffs = list(coeffs)
        if len(coeffs) == phi(n) and all(type(v) is Fraction for v in coeffs):
            self.c = tuple(coeffs)
        else:
            self.c = _reduce_mod_cyclotomic([Fraction(v) for v in coeffs], n)

    @classmethod
    def rational(cls, q) -> "CycloElem":
        return cls(1, (Fraction(q),))

    @classmethod
    def root(cls, zeta: RootOfUnity, n: int | None = None) -> "CycloElem":
        """Embed ``zeta`` into ``Q(zeta_n)`` (default: its own order)."""
        m = zeta.order if n is None else n
        if m % zeta.order:
            raise ValueError(f"conductor {m} does not contain roots of order {zeta.order}")
        power = zeta.exponent.numerator * (m // zeta.order)
        coeffs = [Fraction(0)] * (power + 1)
        coeffs[power] = Fraction(1)
        return cls(m, coeffs)

    def lift(self, m: int) -> "CycloElem":
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"cannot lift conductor {self.n} to {m}")
        s = m // self.n
        coeffs = [Fraction(0)] * ((len(self.c) - 1) * s + 1)
        for j, v in enumerate(self.c):
            coeffs[j * s] = v
        return CycloElem(m, coeffs)

    @staticmethod
    def coerce(x) -> "CycloElem":
        if isinstance(x, CycloElem):
            return x
        if isinstance(x, (int, Fraction)):
            return CycloElem(1, (Fraction(x),))
        if isinstance(x, RootOfUnity):
            return CycloElem.root(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to CycloElem")

    def _pair(self, other):
        other = CycloElem.coerce(other)
        if self.n == other.n:
            return self, other
        m = lcm(self.n, other.n)
        return self.lift(m), other.lift(m)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.n, (self.c[0] + other,) + self.c[1:])
        a, b = self._pair(other)
        return CycloElem(a.n, [x + y for x, y in zip(a.c, b.c)])

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.n, [-x for x in self.c])

    def __sub__(self, other):
        return self + (-CycloElem.coerce(other))

    def __rsub__(self, other):
        return CycloElem.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElem(self.n, [x * other for x in self.c])
        a, b = self._pair(other)
        if a.n <= 2:
            return CycloElem(a.n, (a.c[0] * b.c[0],))
        prod = [Fraction(0)] * (len(a.c) + len(b.c) - 1)
        for i, u in enumerate(a.c):
            if u:
                for j, v in enumerate(b.c):
                    if v:
                        prod[i + j] += u * v
        return CycloElem(a.n, _reduce_mod_cyclotomic(prod, a.n))

    __rmul__ = __mul__

    def inverse(self) -> "CycloElem":
        if not self:
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        if self.n <= 2:
            return CycloElem(self.n, (1 / self.c[0],))
        d = len(self.c)
        # columns: self * x^j reduced
        cols = []
        for j in range(d):
            shifted = [Fraction(0)] * j + list(self.c)
            cols.append(_reduce_mod_cyclotomic(shifted, self.n))
        A = [[cols[j][i] for j in range(d)] for i in range(d)]
        e0 = [Fraction(1)] + [Fraction(0)] * (d - 1)
        sol = linalg.solve(A, e0)
        return CycloElem(self.n, sol)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return CycloElem(self.n, [x / other for x in self.c])
        return self * CycloElem.coerce(other).inverse()

    def __rtruediv__(self, other):
        return CycloElem.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycloElem(self.n, (Fraction(1),) + (Fraction(0),) * (len(self.c) - 1))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __bool__(self):
        return any(self.c)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.c[0] == other
        if not isinstance(other, (CycloElem, RootOfUnity)):
            return NotImplemented
        a, b = self._pair(other)
        return a.c == b.c

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash("CycloElem")

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.c[0]

    def galois(self, a: int) -> "CycloElem":
        """Image under the automorphism ``zeta_n -> zeta_n**a`` (``gcd(a, n) = 1``)."""
        if math.gcd(a, self.n) != 1:
            raise ValueError("automorphism exponent must be coprime to the conductor")
        coeffs = [Fraction(0)] * self.n
        for j, v in enumerate(self.c):
            coeffs[(j * a) % self.n] += v
        return CycloElem(self.n, coeffs)

    def to_complex(self):
        """Value under the embedding ``zeta_n -> exp(2*pi*i/n)`` at the current mpmath precision."""
        if self.is_rational():
            return mpmath.mpf(self.c[0].numerator) / self.c[0].denominator
        w = mpmath.expjpi(mpmath.mpf(2) / self.n)
        total = mpmath.mpc(0)
        for j, v in enumerate(self.c):
            if v:
                total += (mpmath.mpf(v.numerator) / v.denominator) * w ** j
        return total

    def to_json(self):
        if self.is_rational():
            return rat_str(self.c[0])
        return {"n": self.n, "c": [rat_str(v) for v in self.c]}

    @classmethod
    def from_json(cls, d) -> "CycloElem":
        if isinstance(d, dict):
            return cls(int(d["n"]), [parse_rat(v) for v in d["c"]])
        return cls.rational(parse_rat(d))

    def to_expr(self) -> str:
        """Text accepted by the rational-function parser."""
        if self.is_rational():
            return rat_str(self.c[0])
        terms = []
        for j, v in enumerate(self.c):
            if not v:
                continue
            mono = "" if j == 0 else (f"zeta({self.n})" if j == 1 else f"zeta({self.n})^{j}")
            if not mono:
                terms.append(rat_str(v))
            elif v == 1:
                terms.append(mono)
            elif v == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{rat_str(v)}*{mono}")
        return "(" + " + ".join(terms).replace("+ -", "- ") + ")"

    def __repr__(self):
        if self.is_rational():
            return f"CycloElem({rat_str(self.c[0])})"
        return f"CycloElem(n={self.n}, {[rat_str(v) for v in self.c]})"


ZERO = CycloElem.rational(0)
ONE = CycloElem.rational(1)


# ---------------------------------------------------------------------------
# radical reals


class RadicalReal:
    """Positive real ``prod p**e_p`` with rational exponents, plus a refinable cached enclosure."""

    __slots__ = ("exponents", "_interval", "_lock")

    def __init__(self, exponents):
        exps = {}
        for p, e in dict(exponents).items():
            e = parse_rat(e) if isinstance(e, str) else Fraction(e)
            if e:
                exps[int(p)] = e
        self.exponents = dict(sorted(exps.items()))
        self._interval = None
        self._lock = threading.Lock()

    @classmethod
    def from_rational(cls, q: Fraction) -> "RadicalReal":
        from .multlat import factorize

        q = Fraction(q)
        if q <= 0:
            raise ValueError("radical reals are positive")
        return cls({p: Fraction(e) for p, e in factorize(q).free.items()})

    def as_root(self) -> tuple[Fraction, int]:
        """``(r, D)`` with this number equal to the positive real ``r**(1/D)``."""
        D = lcm(*(e.denominator for e in self.exponents.values()))
        num, den = 1, 1
        for p, e in self.exponents.items():
            k = int(e * D)
            if k > 0:
                num *= p ** k
            else:
                den *= p ** (-k)
        return Fraction(num, den), D

    def is_rational(self) -> bool:
        return all(e.denominator == 1 for e in self.exponents.values())

    def rational_value(self) -> Fraction:
        r, D = self.as_root()
        if D != 1:
            raise ValueError("radical real is irrational")
        return r

    def __mul__(self, other: "RadicalReal") -> "RadicalReal":
        exps = dict(self.exponents)
        for p, e in other.exponents.items():
            exps[p] = exps.get(p, Fraction(0)) + e
        return RadicalReal(exps)

    def __pow__(self, k) -> "RadicalReal":
        k = Fraction(k)
        return RadicalReal({p: e * k for p, e in self.exponents.items()})

    def __eq__(self, other):
        return isinstance(other, RadicalReal) and self.exponents == other.exponents

    def __hash__(self):
        return hash(tuple(self.exponents.items()))

    def to_mpf(self):
        v = mpmath.mpf(1)
        for p, e in self.exponents.items():
            v *= mpmath.power(p, mpmath.mpf(e.numerator) / e.denominator)
        return v

    def to_json(self):
        return {str(p): rat_str(e) for p, e in self.exponents.items()}

    @classmethod
    def from_json(cls, d) -> "RadicalReal":
        return cls({int(p): parse_rat(e) for p, e in d.items()})

    def __repr__(self):
        inner = ", ".join(f"{p}: {rat_str(e)}" for p, e in self.exponents.items())
        return f"RadicalReal({{{inner}}})"


def radical_refine(x: RadicalReal, width: Fraction) -> tuple[Fraction, Fraction]:
    """Rational ``(lo, hi)`` with ``lo <= x <= hi`` and ``hi - lo <= width``.

    Refinements are nested: a later call never returns an interval that is not
    contained in an earlier one.
    """
    width = Fraction(width)
    if width <= 0:
        raise ValueError("width must be positive")
    with x._lock:
        cached = x._interval
        if cached is not None and cached[1] - cached[0] <= width:
            return cached
        r, D = x.as_root()
        if D == 1:
            lo = hi = r
        else:
            S = 1 << max(0, math.ceil(math.log2(1 / width)) + 1)
            while Fraction(1, S) > width:
                S <<= 1
            y = (r.numerator * S ** D) // r.denominator
            root, exact = integer_nthroot(y, D)
            lo = Fraction(root, S)
            exact = exact and (r.numerator * S ** D) % r.denominator == 0
            hi = lo if exact else Fraction(root + 1, S)
        if cached is not None:
            lo, hi = max(lo, cached[0]), min(hi, cached[1])
        x._interval = (lo, hi)
        return lo, hi


def radical_less_than_one(x: RadicalReal) -> bool:
    """Exact test ``prod p**e_p < 1``.

    Small exponents compare integer D-th powers.  Large ones decide the sign
    of ``sum e_p log p`` by interval arithmetic at growing precision; that sum
    vanishes only for the empty product because logarithms of distinct primes
    are linearly independent over Q, so the loop terminates.
    """
    if not x.exponents:
        return False
    D = lcm(*(e.denominator for e in x.exponents.values()))
    if sum(abs(e * D) * p.bit_length() for p, e in x.exponents.items()) <= 4096:
        r, _ = x.as_root()
        return r.numerator < r.denominator
    iv, saved = mpmath.iv, mpmath.iv.prec
    prec = 64 + max(abs(e.numerator).bit_length() for e in x.exponents.values())
    try:
        while True:
            iv.prec = prec
            total = iv.mpf(0)
            for p, e in x.exponents.items():
                total += iv.mpf(e.numerator) / e.denominator * iv.log(p)
            if total.b < 0:
                return True
            if total.a > 0:
                return False
            prec *= 2
    finally:
        iv.prec = saved


def radical_compare(x: RadicalReal, c: Fraction) -> int:
    """Sign of ``x - c`` for a rational ``c``, decided exactly."""
    c = Fraction(c)
    if c <= 0:
        return 1
    r, D = x.as_root()
    cD = c ** D
    return (r > cD) - (r < cD)
