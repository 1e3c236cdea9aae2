"""End-to-end independence certificates.

The pipeline runs every hypothesis check needed to conclude that the values
``f_1(alpha_1), ..., f_r(alpha_r)`` have transcendence degree ``r``, records
the imported results it relies on, and assembles the bookkeeping
``tr.deg = sum_k Card(I_k) = r``.  Whether a value lies in the base field is
not decidable here; it enters as a per-entry attestation.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import __version__
from .analysis import (
    AnalysisError,
    InconclusiveBeyondCutoff,
    admissibility_check,
    eval_value,
    linear_independence_Qz,
    purity_check,
    regular_point_check,
    value_relation_search,
)
from .mahler import (
    MahlerError,
    MahlerSystem,
    build_block_system,
    expand,
    expand_block,
    iterate,
    substitute_monomial,
    twist,
)
from .multlat import (
    MultiplicativeCoordinates,
    factorize,
    integers_independent,
    lvdp_decompose,
    mult_kernel,
    pairwise_independent,
    partition_bases,
    rows_pairwise_independent,
)
from .numbers import RootOfUnity, parse_rat

FORMAT = "mahlerkit-certificate/1"

TRUSTED_STEPS = [
    {"id": "imported-admissibility",
     "source": "companion work, Theorem 5.9",
     "use": "for T = q^l I, independent coordinates of modulus < 1 make (T, beta) admissible"},
    {"id": "imported-purity-reduction",
     "source": "companion work, Corollary 3.9",
     "use": "at an admissible regular point, the transcendence degree of the values of a "
            "T-Mahler system equals that of the functions over Q(z)"},
    {"id": "imported-function-tr-deg",
     "source": "companion work, Corollary 3.5",
     "use": "transcendence degree of the functions f_i(z^mu_i) is computed class by class"},
    {"id": "imported-class-additivity",
     "source": "companion work, Lemma 10.3",
     "use": "for pairwise multiplicatively independent spectral radii, the transcendence degree "
            "of the union of the classes is the sum over the classes"},
    {"id": "imported-single-value",
     "source": "earlier work, Corollaire 1.8",
     "use": "a value f(alpha) of an M_q-function at a regular algebraic point is either in the base "
            "field or transcendental"},
    {"id": "imported-well-posedness",
     "source": "companion work, Lemma 11.1",
     "use": "the seed protocol and regularity notion used here are operational reconstructions"},
]

ASSUMPTIONS = [
    "points are rational numbers times roots of unity",
    "regularity and admissibility are operational reconstructions of notions defined elsewhere",
    "independence over Q(z) is checked up to a degree bound and truncation order, which is evidence and not proof",
    "membership of a value in the base field is not decided; it is attested per entry",
    "numerical values carry a heuristic error estimate",
]


class CertifyError(ValueError):
    pass


@dataclass
class CertEntry:
    q: int
    system: MahlerSystem
    point: MultiplicativeCoordinates
    attested: bool
    provenance: str = ""


@dataclass
class CertOptions:
    truncation: int = 128
    degree_bound: int = 8
    purity_truncation: int = 12
    purity_support: int = 3
    block_check_order: int = 12
    eval_digits: int = 30
    k_max: int = 64
    relation_search: bool = False
    relation_degree: int = 2
    threads: int = 1


@dataclass
class CertInput:
    entries: list
    options: CertOptions = field(default_factory=CertOptions)

    @classmethod
    def from_json(cls, d: dict, options: CertOptions | None = None) -> "CertInput":
        entries = []
        for i, e in enumerate(d["entries"]):
            sysd = dict(e["system"])
            q = int(e.get("q", sysd.get("q", 0)))
            sysd.setdefault("q", q)
            S = MahlerSystem.from_json(sysd)
            if S.q != q:
                raise CertifyError(f"entry {i + 1}: radix {q} differs from the system radix {S.q}")
            att = e.get("attestation") or {}
            entries.append(CertEntry(q, S, parse_point(e["point"]),
                                     bool(att.get("not_in_field", False)), str(att.get("provenance", ""))))
        opts = options or CertOptions()
        for k, v in (d.get("options") or {}).items():
            if not hasattr(opts, k):
                raise CertifyError(f"unknown option {k!r}")
            setattr(opts, k, type(getattr(opts, k))(v))
        return cls(entries, opts)


def parse_point(p) -> MultiplicativeCoordinates:
    """``"1/2"`` or ``{"value": "1/2", "torsion": {"k": 1, "n": 2}}``."""
    if isinstance(p, dict):
        c = factorize(parse_rat(p["value"]))
        if "torsion" in p:
            c = MultiplicativeCoordinates(c.torsion * RootOfUnity.from_json(p["torsion"]), c.free)
        return c
    return factorize(parse_rat(p))


def point_text(c: MultiplicativeCoordinates) -> str:
    return c.describe()


def relation_identity(rel, points) -> str:
    """``1/10 = (1/2)(1/5)``: negative exponents on the left, positive on the right."""
    def factor(x, k, alone):
        base = point_text(x)
        if alone and k == 1:
            return base
        return f"({base})" + (f"^{k}" if k > 1 else "")

    def side(sign):
        fs = [(x, abs(k)) for x, k in zip(points, rel.exponents) if k * sign > 0]
        return "".join(factor(x, k, len(fs) == 1) for x, k in fs) or "1"

    rhs = side(1)
    if not rel.torsion.is_one():
        t = rel.torsion.exponent
        rhs += f" * exp(2pi*i*{t.numerator}/{t.denominator})"
    return f"{side(-1)} = {rhs}"


# ---------------------------------------------------------------------------


@dataclass
class IndependenceCertificate:
    format: str
    version: str
    input_digest: str
    status: str                          # complete | conditional | partial
    failed_step: dict | None
    entries: list
    pairwise_independence: dict
    global_relations: list
    class_partition: dict | None
    decomposition: dict | None
    classes: list
    cross_class: dict | None
    checks: list
    independence_evidence: dict
    trusted_steps: list
    attestations: list
    conclusion: dict
    assumptions: list
    parameters: dict

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "IndependenceCertificate":
        return cls(**d)


def _digest(inp: CertInput) -> str:
    payload = {
        "entries": [{"q": e.q, "system": e.system.to_json(), "point": e.point.to_json(),
                     "attested": e.attested} for e in inp.entries],
        "options": asdict(inp.options) | {"threads": None},
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


class _Run:
    def __init__(self, inp: CertInput):
        self.inp = inp
        self.opts = inp.options
        self.checks = []
        self.failed = None

    def check(self, step, name, passed, detail="", witness=None):
        self.checks.append({"step": step, "name": name, "passed": bool(passed), "detail": detail})
        if not passed and self.failed is None:
            self.failed = {"step": step, "name": name, "detail": detail, "witness": witness}
        return passed


def _class_work(run: _Run, cls_index: int, bc, entries, points):
    """Everything done inside one radix class (pure; safe to run in a worker thread)."""
    opts = run.opts
    members = list(bc.members)
    local_checks = []

    def check(name, passed, detail="", witness=None):
        local_checks.append((name, bool(passed), detail, witness))
        return passed

    class_points = [points[i] for i in members]
    dec = lvdp_decompose(class_points)
    systems, block_inputs, reg_reports = [], [], []
    aligned = []
    for pos, i in enumerate(members):
        S = entries[i].system
        a_i = bc.alignment[pos]
        Si = iterate(S, a_i)
        St = twist(Si, class_points[pos].torsion)
        aligned.append(St)
        block_inputs.append((St, tuple(dec.exponents[pos])))
        systems.append({"entry": i + 1, "iterations": a_i, "radix": str(St.q),
                        "twist": class_points[pos].torsion.to_json(), "dimension": St.m,
                        "distinguished": St.distinguished})
    mus = [tuple(r) for r in dec.exponents]
    pair = rows_pairwise_independent(mus)
    mu_ok = check("mu pairwise linearly independent", pair is None,
                  "" if pair is None else f"rows {pair[0] + 1} and {pair[1] + 1} are proportional",
                  None if pair is None else [members[pair[0]] + 1, members[pair[1]] + 1])
    block = None
    if mu_ok:
        block = build_block_system(block_inputs)
        Nb = opts.block_check_order
        agree = all(
            expand_block(block, b, Nb)[St.distinguished]
            == substitute_monomial(expand(St, Nb)[St.distinguished], mu, Nb)
            for b, (St, mu) in enumerate(block_inputs))
        check("block expansion matches monomial substitution", agree, f"total degree {Nb}")
    for pos, St in enumerate(aligned):
        gamma = dec.monomial_point(pos)
        try:
            rep = regular_point_check(St, gamma, opts.k_max)
        except InconclusiveBeyondCutoff as exc:
            rep = exc.report
        reg_reports.append({"entry": members[pos] + 1, **rep.to_json()})
        check(f"regular point for entry {members[pos] + 1}", rep.regular, rep.verdict)
    adm = admissibility_check(bc.radix, dec.generators)
    check("admissibility of (T, beta)", adm.admissible, adm.reason)
    check("spectral radius of T equals the class radix", block is None or block.spectral_radius == bc.radix,
          f"rho = {bc.radix}")
    # evidence
    families = [(mu, [expand(St, opts.purity_truncation)[St.distinguished]])
                for (St, mu) in block_inputs]
    purity = purity_check(families, opts.purity_truncation, opts.purity_support, check_mu=mu_ok) \
        if mu_ok else None
    values = []
    for pos, St in enumerate(aligned):
        ev = eval_value(St, dec.monomial_point(pos), digits=opts.eval_digits, k_max=opts.k_max,
                        check_regular=False)
        values.append({"entry": members[pos] + 1, **ev.to_json(St.distinguished),
                       "value": ev.to_json()["values"][St.distinguished]})
    record = {
        "index": cls_index + 1,
        "members": [i + 1 for i in members],
        "base": bc.base,
        "ell": _ell(bc),
        "radix": str(bc.radix),
        "decomposition": dec.to_json(),
        "systems": systems,
        "block_system": None if block is None else {
            "t": block.t, "T": block.T, "mus": [list(m) for m in mus],
            "spectral_radius": str(block.spectral_radius), "dimension": block.dimension,
            "distinguished_rows": block.distinguished_rows()},
        "regularity": reg_reports,
        "admissibility": adm.to_json(),
        "mu_independence": {"pairwise_independent": pair is None,
                            "pair": None if pair is None else [pair[0] + 1, pair[1] + 1]},
    }
    return record, local_checks, purity, values


def _ell(bc) -> int:
    """``l`` with ``radix = base**l``: the lcm of the members' base powers."""
    return math.lcm(*bc.base_powers)


def certify(inp: CertInput) -> IndependenceCertificate:
    run = _Run(inp)
    opts = inp.options
    entries = inp.entries
    r = len(entries)
    if r == 0:
        raise CertifyError("no entries")
    points = [e.point for e in entries]
    entry_json = [{"entry": i + 1, "q": e.q, "point": e.point.describe(), "point_coordinates": e.point.to_json(),
                   "system": e.system.to_json()} for i, e in enumerate(entries)]
    attestations = [{"entry": i + 1, "present": e.attested, "provenance": e.provenance}
                    for i, e in enumerate(entries)]

    # (0) input invariants
    for i, e in enumerate(entries):
        ok = bool(e.point.free) and e.point.modulus_less_than_one()
        run.check(0, f"0 < abs(alpha_{i + 1}) < 1", ok, e.point.describe())
        try:
            expand(e.system, 8)
            run.check(0, f"system {i + 1} well-posed", True)
        except MahlerError as exc:
            run.check(0, f"system {i + 1} well-posed", False, str(exc))

    # (1) pairwise independence of the points
    pw = pairwise_independent(points) if run.failed is None else None
    pw_json = {"independent": None, "pair": None, "relation": None}
    if pw is not None:
        pw_json = {"independent": pw.independent,
                   "pair": None if pw.pair is None else [pw.pair[0] + 1, pw.pair[1] + 1],
                   "relation": None if pw.relation is None else {
                       **pw.relation.to_json(), "text": pw.relation.text()}}
        run.check(1, "pairwise multiplicative independence", pw.independent,
                  "" if pw.independent else
                  f"entries {pw.pair[0] + 1} and {pw.pair[1] + 1}: {pw.relation.text()}",
                  pw_json)
    globals_ = []
    if run.failed is None:
        for rel in mult_kernel(points):
            globals_.append({**rel.to_json(), "identity": relation_identity(rel, points),
                             "note": "global dependence noted but allowed: only pairwise independence is required"})

    partition_json = decomposition_json = cross_json = None
    classes = []
    evidence = {"linear_independence": [], "purity": [], "values": [], "relation_search": None}
    if run.failed is None:
        # (2) radix classes
        bcs = partition_bases([e.q for e in entries])
        partition_json = {"s": len(bcs), "classes": [
            {**bc.to_json(), "ell": _ell(bc)} for bc in bcs]}
        run.check(2, "radix partition", True, f"{len(bcs)} class(es)")
        decomposition_json = lvdp_decompose(points).to_json()
        # (3) per class
        threads = max(1, opts.threads)
        if threads > 1 and len(bcs) > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(lambda kb: _class_work(run, kb[0], kb[1], entries, points),
                                      enumerate(bcs)))
        else:
            results = [_class_work(run, k, bc, entries, points) for k, bc in enumerate(bcs)]
        for record, local_checks, purity, values in results:
            classes.append(record)
            for name, passed, detail, witness in local_checks:
                run.check(3, f"class {record['index']}: {name}", passed, detail, witness)
            if purity is not None:
                evidence["purity"].append({"class": record["index"], **purity.to_json()})
            evidence["values"].extend(values)
        # (4) cross-class spectral radii
        radii = [bc.radix for bc in bcs]
        bad = next(((i, j) for i in range(len(radii)) for j in range(i + 1, len(radii))
                    if not integers_independent(radii[i], radii[j])), None)
        cross_json = {"spectral_radii": [str(x) for x in radii], "pairwise_independent": bad is None,
                      "pair": None if bad is None else [bad[0] + 1, bad[1] + 1]}
        run.check(4, "spectral radii pairwise multiplicatively independent", bad is None)
        # (6) truncation evidence over Q(z)
        for i, e in enumerate(entries):
            f = expand(e.system, opts.truncation)[e.system.distinguished]
            one = [1] + [0] * opts.truncation
            rep = linear_independence_Qz([one, f], opts.degree_bound, opts.truncation)
            evidence["linear_independence"].append({"entry": i + 1, "series": ["1", f"f_{i + 1}"],
                                                    **rep.to_json()})
        lin_ok = all(x["independent_up_to"] for x in evidence["linear_independence"])
        for p in evidence["purity"]:
            if p["verdict"] == "relation found" and lin_ok:
                run.check(6, f"class {p['class']}: purity at truncation", False,
                          "relation found for pairwise independent exponent vectors")
        if opts.relation_search:
            vals = [v["value"] for v in evidence["values"]]
            if all("im" not in v for v in vals):
                try:
                    cands = value_relation_search([v["re"] for v in vals], opts.relation_degree,
                                                  opts.eval_digits)
                except AnalysisError as exc:
                    cands = {"error": str(exc)}
                evidence["relation_search"] = {"degree": opts.relation_degree,
                                               "candidates": cands, "heuristic": True}

    # (7) conclusion
    missing = [a["entry"] for a in attestations if not a["present"]]
    cards = [len(c["members"]) for c in classes]
    if run.failed is not None:
        status = "partial"
        conclusion = {"tr_deg": None, "r": r, "per_class_cards": cards, "sum": None,
                      "statement": f"no conclusion: step {run.failed['step']} ({run.failed['name']}) failed",
                      "conditional_on": []}
    elif missing:
        status = "conditional"
        conclusion = {"tr_deg": None, "r": r, "per_class_cards": cards, "sum": sum(cards),
                      "statement": f"conditional: tr.deg = {r} if value(s) "
                                   + ", ".join(str(i) for i in missing) + " not in the base field",
                      "conditional_on": missing}
    else:
        status = "complete"
        conclusion = {"tr_deg": sum(cards), "r": r, "per_class_cards": cards, "sum": sum(cards),
                      "statement": _sum_statement(cards, r),
                      "conditional_on": []}
    return IndependenceCertificate(
        format=FORMAT,
        version=__version__,
        input_digest=_digest(inp),
        status=status,
        failed_step=run.failed,
        entries=entry_json,
        pairwise_independence=pw_json,
        global_relations=globals_,
        class_partition=partition_json,
        decomposition=decomposition_json,
        classes=classes,
        cross_class=cross_json,
        checks=run.checks,
        independence_evidence=evidence,
        trusted_steps=[dict(t) for t in TRUSTED_STEPS] if run.failed is None else [],
        attestations=attestations,
        conclusion=conclusion,
        assumptions=list(ASSUMPTIONS),
        parameters={k: v for k, v in asdict(opts).items() if k != "threads"},
    )


# ---------------------------------------------------------------------------
# rendering and validation


def _sum_statement(cards, r) -> str:
    terms = " + ".join(f"Card(I_{k + 1})" for k in range(len(cards)))
    if len(cards) == 1:
        return f"tr.deg = {terms} = {r}"
    return f"tr.deg = {terms} = " + " + ".join(str(c) for c in cards) + f" = {r}"


def to_json_text(cert) -> str:
    d = cert.to_json() if isinstance(cert, IndependenceCertificate) else cert
    return json.dumps(d, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def render_certificate(cert, fmt: str = "json") -> str:
    d = cert.to_json() if isinstance(cert, IndependenceCertificate) else cert
    if fmt == "json":
        return to_json_text(d)
    if fmt != "markdown":
        raise ValueError(f"unknown format {fmt!r}")
    out = [f"# Independence certificate ({d['status']})", ""]
    out.append(f"**Conclusion:** {d['conclusion']['statement']}")
    out.append("")
    if d["failed_step"]:
        fs = d["failed_step"]
        out += [f"**Failed step {fs['step']}: {fs['name']}**", ""]
        if fs.get("detail"):
            out += [f"Witness: {fs['detail']}", ""]
    out += ["## Entries", "", "| # | q | point | attested |", "|---|---|---|---|"]
    att = {a["entry"]: a for a in d["attestations"]}
    for e in d["entries"]:
        out.append(f"| {e['entry']} | {e['q']} | {e['point']} | {'yes' if att[e['entry']]['present'] else 'no'} |")
    out.append("")
    if d["global_relations"]:
        out += ["## Global multiplicative relations", ""]
        for g in d["global_relations"]:
            out.append(f"- {g['identity']} (global dependence noted but allowed)")
        out.append("")
    if d["class_partition"]:
        out += ["## Radix classes", ""]
        for c in d["classes"]:
            dec = c["decomposition"]
            out.append(f"- class {c['index']}: entries {c['members']}, radix {c['radix']} "
                       f"(base {c['base']}, l = {c['ell']}), t = {dec['t']}, mu = {dec['exponents']}")
        out.append("")
    out += ["## Checks", "", "| step | check | result | detail |", "|---|---|---|---|"]
    for ch in d["checks"]:
        out.append(f"| {ch['step']} | {ch['name']} | {'pass' if ch['passed'] else 'FAIL'} | {ch['detail']} |")
    out.append("")
    if d["trusted_steps"]:
        out += ["## Trusted steps", ""]
        for t in d["trusted_steps"]:
            out.append(f"- `{t['id']}` ({t['source']}): {t['use']}")
        out.append("")
    out += ["## Assumptions", ""] + [f"- {a}" for a in d["assumptions"]] + [""]
    return "\n".join(out)


def validate_certificate(d: dict) -> list:
    """Independent re-check of a serialized certificate; returns a list of problems."""
    problems = []
    if isinstance(d, IndependenceCertificate):
        d = d.to_json()
    concl = d["conclusion"]
    pts = [parse_point_json(e["point_coordinates"]) for e in d["entries"]]
    pw = pairwise_independent(pts)
    if d["status"] == "complete":
        if concl["tr_deg"] != len(d["entries"]):
            problems.append("conclusion does not equal the number of entries")
        if not all(c["passed"] for c in d["checks"]):
            problems.append("complete certificate with a failed check")
        if not all(a["present"] for a in d["attestations"]):
            problems.append("complete certificate with a missing attestation")
        if not pw.independent:
            problems.append("points are not pairwise multiplicatively independent")
        if sum(concl["per_class_cards"]) != concl["tr_deg"]:
            problems.append("sum identity fails")
        bcs = partition_bases([e["q"] for e in d["entries"]])
        if [[i + 1 for i in bc.members] for bc in bcs] != [c["members"] for c in d["classes"]]:
            problems.append("class partition does not match the radices")
        radii = [int(c["radix"]) for c in d["classes"]]
        for i in range(len(radii)):
            for j in range(i + 1, len(radii)):
                if not integers_independent(radii[i], radii[j]):
                    problems.append("spectral radii are dependent")
        for c in d["classes"]:
            problems += _check_class(c, pts)
    elif d["status"] == "partial":
        if concl["tr_deg"] is not None or not d["failed_step"]:
            problems.append("partial certificate must name a failed step and carry no conclusion")
    elif d["status"] == "conditional":
        if concl["tr_deg"] is not None or not concl["conditional_on"]:
            problems.append("conditional certificate must list the missing attestations")
    else:
        problems.append(f"unknown status {d['status']!r}")
    return problems


def parse_point_json(d) -> MultiplicativeCoordinates:
    return MultiplicativeCoordinates(RootOfUnity.from_json(d["torsion"]),
                                     {int(p): int(e) for p, e in d["free"].items()})


def _check_class(c, pts) -> list:
    problems = []
    dec = c["decomposition"]
    gens = [{int(p): parse_rat(e) for p, e in g.items()} for g in dec["generators"]]
    for pos, i in enumerate(c["members"]):
        want = {p: Fraction(e) for p, e in pts[i - 1].free.items()}
        got = {}
        for mu, g in zip(dec["exponents"][pos], gens):
            if mu < 0:
                problems.append(f"negative exponent in class {c['index']}")
            for p, e in g.items():
                got[p] = got.get(p, Fraction(0)) + mu * e
        if {p: e for p, e in got.items() if e} != want:
            problems.append(f"decomposition does not reconstruct entry {i}")
    if rows_pairwise_independent(dec["exponents"]) is not None:
        problems.append(f"class {c['index']}: exponent rows are dependent")
    if any(r["verdict"] != "regular" for r in c["regularity"]):
        problems.append(f"class {c['index']}: a point is not certified regular")
    if not c["admissibility"]["admissible"]:
        problems.append(f"class {c['index']}: not admissible")
    return problems


def threads_from_env(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("MAHLERKIT_THREADS", default)))
    except ValueError:
        return default

