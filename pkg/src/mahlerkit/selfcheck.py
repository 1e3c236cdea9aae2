"""Embedded oracle suite.

Each criterion compares library output against an oracle that does not go
through the code under test: brute-force Caratheodory enumeration with sympy
solves for cones, sympy factorization for decompositions, closed-form partial
sums and products for values.  ``run_all`` drives the ``selfcheck``
subcommand; the acceptance tests call the same functions at full size.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import sympy

from . import cones
from .analysis import eval_value, purity_check, regular_point_check
from .certify import CertInput, certify, render_certificate, validate_certificate
from .mahler import expand, iterate, twist
from .multlat import factorize, lvdp_decompose
from .numbers import CycloElem, RootOfUnity
from .samples import cert_input, system


@dataclass
class Outcome:
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.criterion:2d} [{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"

    def to_json(self):
        return {"criterion": self.criterion, "name": self.name, "passed": self.passed,
                "detail": self.detail}


# ---------------------------------------------------------------------------
# oracles


def oracle_decomposition_ok(alphas, dec) -> list[str]:
    """Check a decomposition with sympy only."""
    problems = []
    for i, a in enumerate(alphas):
        want = {}
        for p, e in sympy.factorint(abs(a.numerator)).items():
            want[p] = want.get(p, 0) + e
        for p, e in sympy.factorint(a.denominator).items():
            want[p] = want.get(p, 0) - e
        got = {}
        for mu, g in zip(dec.exponents[i], dec.generators):
            if mu < 0:
                problems.append(f"negative exponent for point {i + 1}")
            for p, e in g.exponents.items():
                got[p] = got.get(p, 0) + mu * e
        if {p: e for p, e in got.items() if e} != {p: Fraction(e) for p, e in want.items() if e}:
            problems.append(f"point {i + 1} not reconstructed")
        if not any(dec.exponents[i]):
            problems.append(f"zero exponent row for point {i + 1}")
    primes = sorted({p for g in dec.generators for p in g.exponents})
    M = sympy.Matrix([[sympy.Rational(g.exponents.get(p, 0).numerator, g.exponents.get(p, 0).denominator)
                       for p in primes] for g in dec.generators])
    if M.rank() != len(dec.generators):
        problems.append("generators dependent")
    for j, g in enumerate(dec.generators):
        D = 1
        for e in g.exponents.values():
            D = sympy.ilcm(D, e.denominator)
        power = sympy.Integer(1)
        for p, e in g.exponents.items():
            power *= sympy.Integer(p) ** int(e * D)
        if not power < 1:
            problems.append(f"generator {j + 1} is not below 1")
    return problems


def _pinv(cols):
    B = sympy.Matrix(cols).T
    return B, (B.T * B).inv() * B.T


def oracle_line_cone(lam, mu1, Gamma, gens, K: int = 100) -> list[int]:
    """``{k <= K : lam + k mu1 in Gamma + cone(gens)}`` by Caratheodory enumeration.

    A point lies in a cone iff it is a nonnegative combination of some
    linearly independent subset of the generators.
    """
    t = len(lam)
    subsets = []
    for s in range(0, min(len(gens), t) + 1):
        for idx in itertools.combinations(range(len(gens)), s):
            if s == 0:
                subsets.append(None)
                continue
            B = sympy.Matrix([list(gens[i]) for i in idx]).T
            if B.rank() == s:
                subsets.append(_pinv([list(gens[i]) for i in idx]))
    mu = sympy.Matrix(list(mu1))
    ks = set()
    for gamma in Gamma:
        base = sympy.Matrix([l - g for l, g in zip(lam, gamma)])
        for sub in subsets:
            if sub is None:
                for k in range(K + 1):
                    if base + k * mu == sympy.zeros(t, 1):
                        ks.add(k)
                continue
            B, P = sub
            c0, c1 = P * base, P * mu
            r0, r1 = B * c0 - base, B * c1 - mu
            for k in range(K + 1):
                if k in ks:
                    continue
                if all(a + k * b == 0 for a, b in zip(r0, r1)) and all(a + k * b >= 0 for a, b in zip(c0, c1)):
                    ks.add(k)
    return sorted(ks)


def fredholm_partial_sum(n_max: int, x: Fraction) -> Fraction:
    return sum((x ** (2 ** n) for n in range(n_max + 1)), Fraction(0))


def thue_morse_partial_product(n_max: int, x: Fraction) -> Fraction:
    out = Fraction(1)
    for n in range(n_max + 1):
        out *= 1 - x ** (2 ** n)
    return out


# ---------------------------------------------------------------------------
# random instances


def random_pairwise_independent(rng, t, count, entry_max):
    vs = []
    tries = 0
    while len(vs) < count and tries < 1000:
        tries += 1
        v = tuple(rng.randint(0, entry_max) for _ in range(t))
        if not any(v):
            continue
        if all(sympy.Matrix([list(v), list(w)]).rank() == 2 for w in vs):
            vs.append(v)
    return vs


def random_lemma_instance(rng, t_max=4, entry_max=6):
    t = rng.randint(1, t_max)
    count = rng.randint(1, t + 2) if t > 1 else 1
    mus = random_pairwise_independent(rng, t, count, entry_max)
    kept = cones.cone_basis(mus)
    mu1 = kept[rng.randrange(len(kept))]
    rest = [m for m in mus if tuple(Fraction(x) for x in m) != mu1]
    lam = tuple(rng.randint(0, entry_max) for _ in range(t))
    Gamma = [tuple(rng.randint(0, entry_max) for _ in range(t)) for _ in range(rng.randint(1, 3))]
    return lam, tuple(int(x) for x in mu1), Gamma, rest


# ---------------------------------------------------------------------------
# criteria


def criterion_1(n_random=500, seed=0) -> tuple[bool, str]:
    fixed = [
        ([Fraction(1, 2), Fraction(1, 5), Fraction(1, 10)],
         [{2: Fraction(-1)}, {5: Fraction(-1)}], [[1, 0], [0, 1], [1, 1]], 1),
        ([Fraction(3, 4), Fraction(2, 9), Fraction(1, 2)],
         [{2: Fraction(-2, 3), 3: Fraction(1, 3)}, {2: Fraction(1, 3), 3: Fraction(-2, 3)}],
         [[3, 0], [0, 3], [2, 1]], 3),
    ]
    for pts, gens, mu, D in fixed:
        dec = lvdp_decompose([factorize(p) for p in pts])
        if [g.exponents for g in dec.generators] != gens or dec.exponents != mu or dec.scale != D:
            return False, f"fixed case {[str(p) for p in pts]} mismatch"
    rng = random.Random(seed)
    failures = 0
    t0 = time.perf_counter()
    for _ in range(n_random):
        r = rng.randint(1, 4)
        pts = []
        while len(pts) < r:
            d = rng.randint(2, 50)
            n = rng.randint(1, min(d - 1, 50))
            pts.append(Fraction(n, d))
        dec = lvdp_decompose([factorize(p) for p in pts])
        if oracle_decomposition_ok(pts, dec):
            failures += 1
    dt = time.perf_counter() - t0
    return failures == 0 and dt < 60, \
        f"2 fixed cases matched, {n_random - failures}/{n_random} random roundtrips in {dt:.1f}s"


def criterion_2(n=200, seed=1, K=100) -> tuple[bool, str]:
    rng = random.Random(seed)
    mismatches = bound_fail = 0
    for _ in range(n):
        lam, mu1, Gamma, rest = random_lemma_instance(rng)
        cone = cones.RationalCone(rest, len(lam))
        got = [k for k in cones.line_cone_intersection(lam, mu1, Gamma, cone) if k <= K]
        want = oracle_line_cone(lam, mu1, Gamma, rest, K)
        if got != want:
            mismatches += 1
        if not cones.bound_Bd_check(lam, mu1, Gamma, cone):
            bound_fail += 1
    return mismatches == 0 and bound_fail == 0, \
        f"{n} instances, {mismatches} mismatches, {bound_fail} bound failures"


def criterion_3(n=200, seed=2) -> tuple[bool, str]:
    rng = random.Random(seed)
    failures = 0
    for _ in range(n):
        t = rng.randint(2, 4)
        mus = random_pairwise_independent(rng, t, rng.randint(2, 6), 6)
        if len(mus) < 2:
            continue
        kept = cones.cone_basis(mus)
        mu1 = kept[0]
        rest = [m for m in mus if tuple(Fraction(x) for x in m) != mu1]
        res = cones.cone_member(mu1, cones.RationalCone(rest, t))
        phi = res.functional
        ok = (not res.member and phi is not None
              and all(sum(Fraction(a) * b for a, b in zip(phi, g)) >= 0 for g in rest)
              and sum(Fraction(a) * b for a, b in zip(phi, mu1)) < 0)
        failures += not ok
    return failures == 0, f"{n} generator sets, {failures} failures"


def criterion_4(n_max=200) -> tuple[bool, str]:
    bad = []
    for name in ("fredholm", "thue-morse"):
        S = system(name)
        base = expand(S, n_max)[S.distinguished]
        for order in (1, 2, 3, 4, 6, 8):
            zeta = RootOfUnity.from_kn(1, order)
            T = twist(S, zeta)
            got = expand(T, n_max)[T.distinguished]
            for n in range(n_max + 1):
                if got[n] != CycloElem.root(zeta ** n) * base[n]:
                    bad.append((name, order, n))
                    break
    return not bad, "all coefficients match" if not bad else f"mismatch {bad[:3]}"


def criterion_5(n_max=200) -> tuple[bool, str]:
    bad = []
    for name in ("fredholm", "thue-morse", "geometric", "cube-lacunary"):
        S = system(name)
        ref = expand(S, n_max)
        for ell in (1, 2, 3):
            if expand(iterate(S, ell), n_max) != ref:
                bad.append((name, ell))
    return not bad, "expansions identical" if not bad else f"mismatch {bad}"


def criterion_6() -> tuple[bool, str]:
    half = Fraction(1, 2)
    with mpmath.workdps(60):
        fred = eval_value(system("fredholm"), half, digits=40).values[0]
        f_oracle = fredholm_partial_sum(7, half)
        e1 = abs(fred - mpmath.mpf(f_oracle.numerator) / f_oracle.denominator)
        tm = eval_value(system("thue-morse"), half, digits=40).values[0]
        t_oracle = thue_morse_partial_product(5, half)
        e2 = abs(tm - mpmath.mpf(t_oracle.numerator) / t_oracle.denominator)
        tw = twist(system("fredholm"), RootOfUnity.from_kn(1, 2))
        neg = eval_value(tw, half, digits=40).values[tw.distinguished]
        e3 = abs(neg - (fred - 1))
    ok = e1 < 1e-12 and e2 < 1e-8 and e3 < 1e-12
    return ok, f"errors {mpmath.nstr(e1, 3)}, {mpmath.nstr(e2, 3)}, {mpmath.nstr(e3, 3)}"


def criterion_7() -> tuple[bool, str]:
    geo = expand(system("geometric"), 12)[0]
    fred = expand(system("fredholm"), 12)[0]
    clean = purity_check([((1, 0), [geo]), ((0, 1), [fred])], 12, 6)
    bait = purity_check([((1, 0), [geo]), ((1, 0), [geo])], 12, 6, check_mu=False)
    one = [1] + [0] * 12
    prop = purity_check([((1, 0), [one, fred]), ((2, 0), [fred])], 12, 2, check_mu=False)
    ok = (not clean.found) and bait.found and bait.verified and prop.found and prop.verified
    return ok, (f"independent case: {clean.to_json()['verdict']}; degenerate cases: "
                f"{'verified relation' if bait.verified and prop.verified else 'missing'}")


def criterion_8() -> tuple[bool, str]:
    t0 = time.perf_counter()
    c = certify(CertInput.from_json(cert_input(["1/2", "1/5", "1/10"])))
    dt = time.perf_counter() - t0
    rels = [g["identity"] for g in c.global_relations]
    ok1 = (c.status == "complete" and c.conclusion["tr_deg"] == 3 and len(c.classes) == 1
           and "1/10 = (1/2)(1/5)" in rels and dt < 30
           and c.classes[0]["decomposition"]["exponents"] == [[1, 0], [0, 1], [1, 1]])
    c2 = certify(CertInput.from_json(cert_input(["1/2", "1/3"], radices=[2, 3])))
    ok2 = (c2.status == "complete" and c2.conclusion["tr_deg"] == 2
           and c2.cross_class["pairwise_independent"] and c2.cross_class["spectral_radii"] == ["2", "3"])
    valid = not validate_certificate(c.to_json()) and not validate_certificate(c2.to_json())
    return ok1 and ok2 and valid, f"intro: tr.deg {c.conclusion['tr_deg']} in {dt:.2f}s, relation {rels}; " \
                                  f"two classes: tr.deg {c2.conclusion['tr_deg']}"


def criterion_9() -> tuple[bool, str]:
    import os
    import tempfile

    from .cli import main

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "in.json")
        out = os.path.join(d, "cert.json")
        with open(path, "w") as fh:
            json.dump(cert_input(["1/2", "1/4"]), fh)
        code = main(["certify", "--input", path, "--out", out])
        with open(out) as fh:
            cert = json.load(fh)
    witness = (cert.get("failed_step") or {}).get("detail", "")
    rep = regular_point_check(system("pole"), Fraction(1, 2))
    ok = code == 2 and "2·e1 = e2" in witness and rep.verdict == "notRegular(0)"
    return ok, f"exit {code}, witness '{witness}', pole verdict {rep.verdict}"


def _acceptance_outputs() -> list[str]:
    half = Fraction(1, 2)
    outs = []
    for pts in (["1/2", "1/5", "1/10"], ["3/4", "2/9", "1/2"]):
        dec = lvdp_decompose([factorize(Fraction(p)) for p in pts])
        outs.append(json.dumps(dec.to_json(), sort_keys=True))
    for name in ("fredholm", "thue-morse"):
        S = system(name)
        outs.append(json.dumps([[c.to_expr() for c in comp] for comp in expand(twist(S, RootOfUnity.from_kn(1, 6)), 60)]))
        outs.append(json.dumps(eval_value(S, half, digits=40).to_json(S.distinguished), sort_keys=True))
    outs.append(json.dumps(regular_point_check(system("pole"), half).to_json(), sort_keys=True))
    for case in (cert_input(["1/2", "1/5", "1/10"]), cert_input(["1/2", "1/3"], radices=[2, 3]),
                 cert_input(["1/2", "1/4"]), cert_input(["3/4", "2/9", "1/2"])):
        outs.append(render_certificate(certify(CertInput.from_json(case)), "json"))
    return outs


def criterion_10(runs=3) -> tuple[bool, str]:
    first = _acceptance_outputs()
    for _ in range(runs - 1):
        if _acceptance_outputs() != first:
            return False, "outputs differ across runs"
    return True, f"{len(first)} outputs x {runs} runs byte-identical"


CRITERIA = [
    (1, "LvdP roundtrip", criterion_1),
    (2, "line/cone intersection vs brute force", criterion_2),
    (3, "cone basis non-membership", criterion_3),
    (4, "twist coefficients", criterion_4),
    (5, "iteration invariance", criterion_5),
    (6, "evaluation oracles", criterion_6),
    (7, "purity at truncation", criterion_7),
    (8, "certify end-to-end", criterion_8),
    (9, "negative paths", criterion_9),
    (10, "determinism", criterion_10),
]

QUICK_SIZES = {1: {"n_random": 40}, 2: {"n": 15}, 3: {"n": 30}, 4: {"n_max": 48},
               5: {"n_max": 64}, 10: {"runs": 2}}


def run_all(quick: bool = True, seed: int = 0) -> list[Outcome]:
    out = []
    for num, name, fn in CRITERIA:
        kwargs = dict(QUICK_SIZES.get(num, {})) if quick else {}
        if "seed" in fn.__code__.co_varnames:
            kwargs["seed"] = seed + num
        t0 = time.perf_counter()
        try:
            passed, detail = fn(**kwargs)
        except Exception as exc:  # reported, not raised: selfcheck summarizes every criterion
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(Outcome(num, name, passed, detail, time.perf_counter() - t0))
    return out
