"""Univariate polynomials and rational functions over cyclotomic fields, and sparse multivariate polynomials."""

from __future__ import annotations

from ..numbers import ONE, ZERO, CycloElem, RootOfUnity


def _c(x) -> CycloElem:
    return CycloElem.coerce(x)


class Poly:
    """Dense polynomial in ``z``; coefficients lowest degree first, no trailing zeros."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [_c(a) for a in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def const(cls, a) -> "Poly":
        return cls([a])

    @classmethod
    def z(cls) -> "Poly":
        return cls([0, 1])

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def __bool__(self):
        return bool(self.c)

    def __getitem__(self, k) -> CycloElem:
        return self.c[k] if 0 <= k < len(self.c) else ZERO

    def lead(self) -> CycloElem:
        return self.c[-1]

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly.const(other)
        n = max(len(self.c), len(other.c))
        return Poly([self[k] + other[k] for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-a for a in self.c])

    def __sub__(self, other):
        other = other if isinstance(other, Poly) else Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            a = _c(other)
            return Poly([x * a for x in self.c])
        if not self.c or not other.c:
            return Poly()
        out = [ZERO] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return len(self.c) == len(other.c) and all(a == b for a, b in zip(self.c, other.c))

    def __hash__(self):
        return hash(tuple(hash(a) for a in self.c))

    def divmod(self, other: "Poly"):
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        inv = other.lead().inverse()
        q = [ZERO] * max(0, len(r) - len(other.c) + 1)
        while len(r) >= len(other.c) and r:
            f = r[-1] * inv
            s = len(r) - len(other.c)
            q[s] = f
            for j, b in enumerate(other.c):
                r[s + j] = r[s + j] - f * b
            r.pop()
            while r and not r[-1]:
                r.pop()
        return Poly(q), Poly(r)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        return self * self.lead().inverse() if self else self

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while b:
            a, b = b, a % b
        return a.monic()

    def __call__(self, x):
        acc = ZERO if isinstance(x, CycloElem) else 0
        for a in reversed(self.c):
            acc = acc * x + (a if isinstance(x, CycloElem) else a.to_complex())
        return acc

    def inflate(self, k: int) -> "Poly":
        """``P(z**k)``."""
        if k == 1 or not self.c:
            return self
        out = [ZERO] * ((len(self.c) - 1) * k + 1)
        for j, a in enumerate(self.c):
            out[j * k] = a
        return Poly(out)

    def scale_var(self, w) -> "Poly":
        """``P(w*z)``."""
        w = _c(w)
        out, p = [], ONE
        for a in self.c:
            out.append(a * p)
            p = p * w
        return Poly(out)

    def valuation(self) -> int:
        return next(k for k, a in enumerate(self.c) if a) if self.c else 0

    def conductor(self) -> int:
        from ..numbers import lcm
        return lcm(*(a.n for a in self.c)) if self.c else 1

    def galois(self, a: int) -> "Poly":
        n = self.conductor()
        return Poly([x.lift(n).galois(a) for x in self.c])

    def to_expr(self) -> str:
        if not self.c:
            return "0"
        terms = []
        for k, a in enumerate(self.c):
            if not a:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            coef = a.to_expr()
            if not mono:
                terms.append(coef)
            elif a == 1:
                terms.append(mono)
            elif a == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{coef}*{mono}")
        s = " + ".join(terms)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.to_expr()})"


class RatFunc:
    """Reduced quotient of polynomials; the denominator is scaled so its constant
    term is 1 when that term is nonzero, otherwise to be monic."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        num = num if isinstance(num, Poly) else Poly.const(num)
        den = Poly.const(1) if den is None else (den if isinstance(den, Poly) else Poly.const(den))
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce and den.deg > 0 and num:
            g = num.gcd(den)
            if g.deg > 0:
                num, den = num // g, den // g
        if not num:
            den = Poly.const(1)
        s = den[0] if den[0] else den.lead()
        if s != 1:
            inv = s.inverse()
            num, den = num * inv, den * inv
        self.num, self.den = num, den

    @classmethod
    def coerce(cls, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        return cls(x if isinstance(x, Poly) else Poly.const(x), reduce=False)

    def is_poly(self) -> bool:
        return self.den.deg == 0

    def __bool__(self):
        return bool(self.num)

    def __add__(self, other):
        o = RatFunc.coerce(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-RatFunc.coerce(other))

    def __rsub__(self, other):
        return RatFunc.coerce(other) - self

    def __mul__(self, other):
        o = RatFunc.coerce(other)
        if self.is_poly() and o.is_poly():
            return RatFunc(self.num * o.num, reduce=False)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RatFunc.coerce(other)
        if not o:
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return RatFunc(1) / (self ** -k)
        return RatFunc(self.num ** k, self.den ** k, reduce=False)

    def __eq__(self, other):
        o = RatFunc.coerce(other)
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def inflate(self, k: int) -> "RatFunc":
        return RatFunc(self.num.inflate(k), self.den.inflate(k), reduce=False)

    def scale_var(self, w) -> "RatFunc":
        if isinstance(w, RootOfUnity):
            w = CycloElem.root(w)
        return RatFunc(self.num.scale_var(w), self.den.scale_var(w))

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def to_expr(self) -> str:
        if self.is_poly():
            return self.num.to_expr()
        n, d = self.num.to_expr(), self.den.to_expr()
        return f"({n})/({d})"

    def __repr__(self):
        return f"RatFunc({self.to_expr()})"


# ---------------------------------------------------------------------------
# sparse multivariate


class MPoly:
    """Sparse polynomial in ``t`` variables: ``{exponent tuple: CycloElem}``."""

    __slots__ = ("t", "terms")

    def __init__(self, t: int, terms=None):
        self.t = t
        self.terms = {e: _c(a) for e, a in (terms or {}).items() if a}

    @classmethod
    def from_univariate(cls, p: Poly, mu) -> "MPoly":
        mu = tuple(int(m) for m in mu)
        return cls(len(mu), {tuple(k * m for m in mu): a for k, a in enumerate(p.c) if a})

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "MPoly"):
        out = dict(self.terms)
        for e, a in other.terms.items():
            out[e] = out.get(e, ZERO) + a
        return MPoly(self.t, out)

    def __neg__(self):
        return MPoly(self.t, {e: -a for e, a in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            a = _c(other)
            return MPoly(self.t, {e: b * a for e, b in self.terms.items()})
        out = {}
        for e1, a in self.terms.items():
            for e2, b in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, ZERO) + a * b
        return MPoly(self.t, out)

    def __eq__(self, other):
        return isinstance(other, MPoly) and self.t == other.t and not (self - other).terms

    def truncate(self, N: int) -> "MPoly":
        return MPoly(self.t, {e: a for e, a in self.terms.items() if sum(e) <= N})

    def __getitem__(self, e) -> CycloElem:
        return self.terms.get(tuple(e), ZERO)

    def to_json(self):
        return [[list(e), a.to_json()] for e, a in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))]

    def __repr__(self):
        return f"MPoly({self.to_json()})"


class MRatFunc:
    """Quotient of multivariate polynomials (kept unreduced)."""

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly):
        self.num, self.den = num, den

    @classmethod
    def from_univariate(cls, f: RatFunc, mu) -> "MRatFunc":
        return cls(MPoly.from_univariate(f.num, mu), MPoly.from_univariate(f.den, mu))

    def __bool__(self):
        return bool(self.num)

