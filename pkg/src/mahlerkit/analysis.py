"""Semantic checks on Mahler systems and truncation-level oracles.

Regularity and admissibility are exact.  Evaluation and value-relation
search are numerical and labelled heuristic in everything they return.
Linear-independence verdicts are always "up to (D, N)".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import mpmath
import sympy
from sympy.polys.matrices import DomainMatrix

from . import linalg
from .multlat import factorize, mult_kernel
from .numbers import (
    CycloElem,
    RadicalReal,
    radical_compare,
    radical_less_than_one,
    radical_refine,
    rat_str,
)
from .mahler.poly import MPoly, Poly
from .mahler.system import MahlerSystem, expand


class AnalysisError(ValueError):
    pass


class InconclusiveBeyondCutoff(AnalysisError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"no cutoff justification within k <= {report.k_max}")


class NotRegular(AnalysisError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"point is not regular: {report.verdict}")


class UnsupportedTransformation(AnalysisError):
    pass


class TruncationTooShort(AnalysisError):
    pass


class PrecisionTooLow(AnalysisError):
    pass


def _as_radical(point) -> RadicalReal:
    if isinstance(point, RadicalReal):
        return point
    x = Fraction(point)
    if x <= 0:
        raise AnalysisError("points must be positive reals; use a twist for other arguments")
    return RadicalReal.from_rational(x)


def point_json(point):
    if isinstance(point, RadicalReal):
        return point.to_json() if not point.is_rational() else rat_str(point.rational_value())
    return rat_str(Fraction(point))


# ---------------------------------------------------------------------------
# regularity


@dataclass
class RegularityReport:
    point: object
    q: int
    k_max: int
    orbit_points_checked: list = field(default_factory=list)   # {"k", "interval"}
    det_zero_tests: list = field(default_factory=list)         # {"k", "polynomial", "vanishes"}
    zero_at_origin: list = field(default_factory=list)
    cutoff: dict | None = None
    verdict: str = "inconclusive"

    @property
    def regular(self) -> bool:
        return self.verdict == "regular"

    def to_json(self):
        return {
            "point": point_json(self.point),
            "q": self.q,
            "k_max": self.k_max,
            "orbit_points_checked": self.orbit_points_checked,
            "det_zero_tests": self.det_zero_tests,
            "zero_at_origin": self.zero_at_origin,
            "cutoff": self.cutoff,
            "verdict": self.verdict,
            "reconstruction_note": "operational regularity: the orbit avoids zeros and poles "
                                   "of det A and poles of the entries of A",
        }


def norm_polynomial(P: Poly) -> list:
    """Rational coefficients (low degree first) of the product of all Galois conjugates of ``P``."""
    n = P.conductor()
    if n <= 2:
        return [c.rational_value() for c in P.c]
    N = Poly.const(1)
    for a in range(1, n):
        if math.gcd(a, n) == 1:
            N = N * P.galois(a)
    return [c.rational_value() for c in N.c]


def _relevant_polys(S: MahlerSystem):
    out = []
    for r, row in enumerate(S.matrix):
        for c, x in enumerate(row):
            if x.den.deg > 0:
                out.append((f"den A[{r}][{c}]", x.den))
    d = S.det()
    if d.num.deg > 0:
        out.append(("num det A", d.num))
    if d.den.deg > 0:
        out.append(("den det A", d.den))
    return out


def _cauchy_lower_bound(coeffs) -> Fraction:
    """Every nonzero complex root has modulus >= |p0| / (|p0| + max |p_j|)."""
    p0 = abs(coeffs[0])
    return p0 / (p0 + max(abs(c) for c in coeffs[1:]))


def _positive_interval(x: RadicalReal, width: Fraction):
    lo, hi = radical_refine(x, width)
    while lo <= 0:
        width /= 1024
        lo, hi = radical_refine(x, width)
    return lo, hi


def regular_point_check(S: MahlerSystem, point, k_max: int = 64) -> RegularityReport:
    """Decide exactly whether the orbit ``gamma^(q^k)`` hits a zero or pole.

    ``gamma = r^(1/D)``; a polynomial ``P`` vanishes at ``gamma^(q^k)`` iff
    ``gcd(P, x^D - r^(q^k))`` has a root in an isolating interval of the
    positive real root.  Beyond a Cauchy-type lower bound on the moduli of
    all nonzero roots, no orbit point can be a root.
    """
    gamma = _as_radical(point)
    if not radical_less_than_one(gamma):
        raise AnalysisError("point must satisfy 0 < gamma < 1")
    r, D = gamma.as_root()
    report = RegularityReport(point=point, q=S.q, k_max=k_max)
    x = sympy.Symbol("x")
    polys = []
    for label, P in _relevant_polys(S):
        coeffs = norm_polynomial(P)
        v = next(i for i, c in enumerate(coeffs) if c)
        if v:
            report.zero_at_origin.append(label)
            coeffs = coeffs[v:]
        if len(coeffs) > 1:
            polys.append((label, coeffs, sympy.Poly(list(reversed(coeffs)), x, domain="QQ")))
    bound = min((_cauchy_lower_bound(c) for _, c, _ in polys), default=None)
    for k in range(k_max + 1):
        xk = RadicalReal({p: e * S.q ** k for p, e in gamma.exponents.items()})
        if bound is None or radical_compare(xk, bound) < 0:
            report.cutoff = {
                "k": k,
                "bound": rat_str(bound) if bound is not None else None,
                "justification": ("no nonconstant polynomial to avoid" if bound is None else
                                  "gamma^(q^k) lies below a lower bound on every nonzero root modulus, "
                                  "and the orbit decreases"),
            }
            report.verdict = "regular"
            return report
        width = min(Fraction(1, 10 ** 12), bound / 4)
        if D == 1:
            Rk = r ** (S.q ** k)
            report.orbit_points_checked.append({"k": k, "interval": [rat_str(Rk), rat_str(Rk)]})
            for label, coeffs, _ in polys:
                val = sum(c * Rk ** j for j, c in enumerate(coeffs))
                report.det_zero_tests.append({"k": k, "polynomial": label, "vanishes": val == 0})
                if val == 0:
                    report.verdict = f"notRegular({k})"
                    return report
        else:
            lo, hi = _positive_interval(xk, width)
            report.orbit_points_checked.append({"k": k, "interval": [rat_str(lo), rat_str(hi)]})
            Rk = r ** (S.q ** k)
            target = sympy.Poly(x ** D - sympy.Rational(Rk.numerator, Rk.denominator), x, domain="QQ")
            for label, _, P in polys:
                g = P.gcd(target)
                hit = g.degree() > 0 and g.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                                       sympy.Rational(hi.numerator, hi.denominator)) > 0
                report.det_zero_tests.append({"k": k, "polynomial": label, "vanishes": bool(hit)})
                if hit:
                    report.verdict = f"notRegular({k})"
                    return report
    raise InconclusiveBeyondCutoff(report)


# ---------------------------------------------------------------------------
# admissibility


@dataclass
class AdmissibilityReport:
    admissible: bool
    scalar: int
    independent: bool
    moduli_below_one: list
    reason: str
    trusted_step: str = "imported-admissibility"

    def to_json(self):
        return {"admissible": self.admissible, "T_scalar": self.scalar,
                "independent": self.independent, "moduli_below_one": self.moduli_below_one,
                "reason": self.reason, "trusted_step": self.trusted_step}


def _scalar_of(T) -> int:
    if isinstance(T, int):
        return T
    n = len(T)
    s = T[0][0]
    for i in range(n):
        for j in range(n):
            if T[i][j] != (s if i == j else 0):
                raise UnsupportedTransformation("only T = q^l * I is supported")
    return int(s)


def admissibility_check(T, betas) -> AdmissibilityReport:
    """Operational admissibility for ``T = q^l I``: independent coordinates, each below 1."""
    s = _scalar_of(T)
    if s < 2:
        raise UnsupportedTransformation("T must be q^l * I with q^l >= 2")
    betas = [_as_radical(b) for b in betas]
    primes = sorted({p for b in betas for p in b.exponents})
    den = math.lcm(1, *(e.denominator for b in betas for e in b.exponents.values()))
    rows = [[int(b.exponents.get(p, 0) * den) for p in primes] for b in betas]
    independent = not linalg.integer_kernel(rows if primes else [[0]] * len(rows))
    below = [radical_less_than_one(b) for b in betas]
    ok = independent and all(below)
    if ok:
        reason = "coordinates multiplicatively independent and of modulus < 1"
    elif not independent:
        reason = "coordinates multiplicatively dependent"
    else:
        reason = "some coordinate has modulus >= 1"
    return AdmissibilityReport(ok, s, independent, below, reason)


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class EvalResult:
    values: list
    error_estimate: object
    digits: int
    K: int
    N: int
    heuristic: bool = True

    def to_json(self, distinguished: int | None = None):
        def fmt(v):
            v = mpmath.mpmathify(v)
            out = {"re": mpmath.nstr(mpmath.re(v), self.digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)}
            if mpmath.im(v) != 0:
                out["im"] = mpmath.nstr(mpmath.im(v), self.digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
            return out
        d = {"digits": self.digits, "K": self.K, "N": self.N,
             "values": [fmt(v) for v in self.values],
             "error_estimate": mpmath.nstr(self.error_estimate, 5),
             "heuristic": True,
             "error_model": "max |coefficient| times geometric tail at the last orbit point, "
                            "propagated through the product of infinity norms"}
        if distinguished is not None:
            d["distinguished"] = distinguished
        return d


def _eval_matrix(S: MahlerSystem, x):
    return mpmath.matrix([[e.num(x) / e.den(x) for e in row] for row in S.matrix])


def eval_value(S: MahlerSystem, point, digits: int = 40, K: int | None = None, N: int = 32,
               k_max: int = 64, check_regular: bool = True) -> EvalResult:
    """``G(gamma) ~ A(gamma) A(gamma^q) ... A(gamma^(q^K)) G_N(gamma^(q^(K+1)))``."""
    gamma = _as_radical(point)
    if check_regular:
        rep = regular_point_check(S, gamma, k_max)
        if not rep.regular:
            raise NotRegular(rep)
    series = expand(S, N)
    with mpmath.workdps(digits + 15):
        g = gamma.to_mpf()
        target = mpmath.mpf(10) ** (-(digits + 5))
        if K is None:
            K = 0
            while abs(g ** (S.q ** (K + 1))) ** (N + 1) >= target and K < k_max:
                K += 1
        P = mpmath.eye(S.m)
        norm_prod = mpmath.mpf(1)
        for k in range(K + 1):
            xk = g ** (S.q ** k)
            Ak = _eval_matrix(S, xk)
            P = P * Ak
            norm_prod *= mpmath.mnorm(Ak, "inf")
        x_last = g ** (S.q ** (K + 1))
        tail_vec = mpmath.matrix([sum(c.to_complex() * x_last ** n for n, c in enumerate(comp) if c)
                                  for comp in series])
        vals = P * tail_vec
        C = max((abs(c.to_complex()) for comp in series for c in comp), default=mpmath.mpf(0))
        ax = abs(x_last)
        tail = C * ax ** (N + 1) / (1 - ax) if ax < 1 else mpmath.inf
        err = tail * norm_prod
        values = []
        for i in range(S.m):
            v = vals[i]
            if isinstance(v, mpmath.mpc) and v.imag == 0:
                v = v.real
            values.append(+v)
    return EvalResult(values, err, digits, K, N)


# ---------------------------------------------------------------------------
# linear independence over Q(z), up to truncation


def _plain(series, N):
    """Fractions when every coefficient is rational, otherwise CycloElems."""
    s = [CycloElem.coerce(c) for c in series[:N + 1]]
    if all(c.is_rational() for c in s):
        return [c.rational_value() for c in s]
    return s


@dataclass
class IndependenceUpTo:
    degree_bound: int
    truncation: int
    relations: list          # each relation: list of m Poly

    @property
    def independent(self) -> bool:
        return not self.relations

    def to_json(self):
        return {"degree_bound": self.degree_bound, "truncation": self.truncation,
                "independent_up_to": not self.relations,
                "relations": [[p.to_expr() for p in rel] for rel in self.relations],
                "note": "evidence at truncation, not a proof"}


def verify_relation(series_list, relation, N: int) -> bool:
    for n in range(N + 1):
        acc = CycloElem.rational(0)
        for g, a in zip(series_list, relation):
            for d, c in enumerate(a.c):
                if c and n - d >= 0:
                    acc = acc + c * CycloElem.coerce(g[n - d])
        if acc:
            return False
    return True


def linear_independence_Qz(series_list, D: int, N: int) -> IndependenceUpTo:
    """Relations ``sum a_i(z) g_i(z) = 0 mod z^(N+1)`` with ``deg a_i <= D``."""
    m = len(series_list)
    if N < m * (D + 1) + D:
        raise TruncationTooShort(f"need N >= m(D+1)+D = {m * (D + 1) + D}, got {N}")
    if any(len(g) < N + 1 for g in series_list):
        raise TruncationTooShort("a series is shorter than the truncation order")
    gs = [_plain(g, N) for g in series_list]
    zero = 0
    rows = []
    for n in range(N + 1):
        rows.append([gs[i][n - d] if n - d >= 0 else zero for i in range(m) for d in range(D + 1)])
    basis = linalg.nullspace(rows, m * (D + 1))
    if basis:
        basis, _ = linalg.rref(basis, m * (D + 1))
    relations = []
    for v in basis:
        rel = [Poly(v[i * (D + 1):(i + 1) * (D + 1)]) for i in range(m)]
        if not verify_relation(series_list, rel, N):
            raise AssertionError("relation failed exact verification")
        relations.append(rel)
    return IndependenceUpTo(D, N, relations)


# ---------------------------------------------------------------------------
# purity at truncation


@dataclass
class PurityReport:
    truncation: int
    support: int
    mus: list
    relation: list | None          # list of MPoly per series, or None
    verified: bool
    checks_enabled: bool = True

    @property
    def found(self) -> bool:
        return self.relation is not None

    def to_json(self):
        return {
            "truncation": self.truncation,
            "support": self.support,
            "mus": [list(m) for m in self.mus],
            "verdict": ("relation found" if self.relation is not None
                        else f"no relation up to (N={self.truncation}, support={self.support})"),
            "relation": None if self.relation is None else [h.to_json() for h in self.relation],
            "verified": self.verified,
            "checks_enabled": self.checks_enabled,
        }


def _monomials(t, d):
    return [e for e in product(range(d + 1), repeat=t) if sum(e) <= d]


def purity_check(families, N: int, support: int, check_mu: bool = True) -> PurityReport:
    """Search relations ``sum h_ij(z) g_ij(z^mu_i) = 0`` modulo total degree ``N + 1``.

    ``families`` is ``[(mu_i, [g_i1, g_i2, ...]), ...]``; the ``h`` range over
    polynomials of total degree ``<= support``.
    """
    from .mahler.multi import substitute_monomial

    mus = [tuple(int(v) for v in mu) for mu, _ in families]
    if check_mu:
        from .multlat import rows_pairwise_independent
        pair = rows_pairwise_independent(mus)
        if pair is not None:
            raise AnalysisError(f"exponent vectors {pair[0] + 1} and {pair[1] + 1} are dependent")
    t = len(mus[0])
    subs = []
    for mu, gs in families:
        for g in gs:
            subs.append(substitute_monomial(g, mu, N))
    mons = _monomials(t, support)
    targets = {e: i for i, e in enumerate(_monomials(t, N))}
    ncols = len(subs) * len(mons)
    rows = [[0] * ncols for _ in targets]
    rational = all(c.is_rational() for s in subs for c in s.terms.values())
    for j, s in enumerate(subs):
        for k, lam in enumerate(mons):
            col = j * len(mons) + k
            for e, c in s.terms.items():
                f = tuple(x + y for x, y in zip(e, lam))
                if f in targets:
                    rows[targets[f]][col] = c.rational_value() if rational else c
    basis = linalg.nullspace(rows, ncols)
    if not basis:
        return PurityReport(N, support, mus, None, True, check_mu)
    v = linalg.rref(basis, ncols)[0][0]
    hs = [MPoly(t, {lam: v[j * len(mons) + k] for k, lam in enumerate(mons)}) for j in range(len(subs))]
    total = MPoly(t)
    for h, s in zip(hs, subs):
        total = total + (h * s).truncate(N)
    return PurityReport(N, support, mus, hs, not total.terms, check_mu)


# ---------------------------------------------------------------------------
# heuristic integer relations among values


def _monomial_exponents(n, d):
    return sorted((e for e in product(range(d + 1), repeat=n) if sum(e) <= d),
                  key=lambda e: (sum(e), tuple(-x for x in e)))


def precision_threshold(n_values: int, degree: int) -> int:
    M = len(_monomial_exponents(n_values, degree))
    return 3 * M + 5


def value_relation_search(values, max_degree: int, precision: int) -> list:
    """Candidate integer polynomial relations (heuristic, via LLL on the monomial vector)."""
    n = len(values)
    exps = _monomial_exponents(n, max_degree)
    M = len(exps)
    if precision < precision_threshold(n, max_degree):
        raise PrecisionTooLow(f"need at least {precision_threshold(n, max_degree)} digits "
                              f"for {M} monomials, got {precision}")
    with mpmath.workdps(precision + 10):
        vals = [mpmath.mpf(v) for v in values]
        mono = [mpmath.fprod(v ** k for v, k in zip(vals, e)) for e in exps]
        scale = mpmath.mpf(10) ** precision
        ZZ = sympy.ZZ
        rows = [[ZZ(int(i == j)) for j in range(M)] + [ZZ(int(mpmath.nint(scale * mono[i])))]
                for i in range(M)]
        red = DomainMatrix(rows, (M, M + 1), ZZ).lll().to_Matrix().tolist()
        height_cap = mpmath.mpf(10) ** (mpmath.mpf(precision) / (2 * M))
        res_cap = mpmath.mpf(10) ** (-(3 * precision) // 4)
        out = []
        for row in red:
            coeffs = [int(c) for c in row[:M]]
            if not any(coeffs):
                continue
            H = max(abs(c) for c in coeffs)
            resid = abs(mpmath.fsum(c * m for c, m in zip(coeffs, mono)))
            if H <= height_cap and resid <= res_cap * H:
                first = next(c for c in coeffs if c)
                if first < 0:
                    coeffs = [-c for c in coeffs]
                out.append({
                    "coefficients": {_mono_label(e): c for e, c in zip(exps, coeffs) if c},
                    "height": H,
                    "residual": mpmath.nstr(resid, 3),
                    "heuristic": True,
                })
    out.sort(key=lambda r: (r["height"], sorted(r["coefficients"].items())))
    return out


def _mono_label(e) -> str:
    parts = [f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k]
    return "*".join(parts) or "1"


def global_relations(points) -> list:
    """Multiplicative relations among all points, e.g. the one behind ``1/10 = (1/2)(1/5)``."""
    coords = [factorize(p) if not hasattr(p, "free") else p for p in points]
    return mult_kernel(coords)
