"""``mahler-kit`` command-line front end.

Every subcommand writes one JSON document (sorted keys, numbers as exact
strings or integers) to stdout or ``--out``.  Exit codes: 0 on success,
2 when a check fails and a partial artifact was written, 1 on usage or
parse errors.
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from . import __version__, cones
from .analysis import (AnalysisError, NotRegular, eval_value, linear_independence_Qz, point_json,
                       purity_check, regular_point_check, value_relation_search)
from .certify import (CertifyError, CertInput, CertOptions, certify, parse_point, render_certificate,
                      threads_from_env, to_json_text)
from .mahler import (DependentExponents, MahlerError, MahlerSystem, ParseError, build_block_system,
                     expand, iterate, parse_coefficient, twist)
from .multlat import DecompositionError, FactorizationError, lvdp_decompose
from .numbers import RootOfUnity, rat_str


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    """A check failed; ``payload`` is still written as the partial artifact."""

    def __init__(self, payload):
        super().__init__("check failed")
        self.payload = payload


@dataclass
class Config:
    truncation: int = 128
    degree_bound: int = 8
    digits: int = 40
    orbit_depth: int = 64
    seed: int = 0

    def __post_init__(self):
        for name in ("truncation", "degree_bound", "digits", "orbit_depth"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.seed < 0:
            raise UsageError("--seed must be nonnegative")


class Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so ``main`` can map errors to exit 1."""

    def error(self, message):
        if "invalid choice" in message and self._subparsers is not None:
            choices = [c for a in self._subparsers._group_actions for c in (a.choices or {})]
            bad = message.split("'")[1] if "'" in message else ""
            near = difflib.get_close_matches(bad, choices, n=1)
            if near:
                message += f" (did you mean {near[0]!r}?)"
        raise UsageError(f"{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# input helpers


def load_json_arg(text: str):
    """Inline JSON (starting with ``[`` or ``{``), ``-`` for stdin, or a file path."""
    s = text.strip()
    try:
        if s.startswith(("[", "{")):
            return json.loads(s)
        if s == "-":
            return json.load(sys.stdin)
        with open(s, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {text!r}: {exc}") from exc
    except OSError as exc:
        raise UsageError(f"cannot read {text!r}: {exc.strerror}") from exc


def load_system(text: str) -> MahlerSystem:
    d = load_json_arg(text)
    if not isinstance(d, dict) or "q" not in d or "matrix" not in d:
        raise UsageError(f"{text!r} is not a system object with 'q' and 'matrix'")
    return MahlerSystem.from_json(d)


def parse_vector(text: str) -> list[int]:
    s = text.strip()
    try:
        v = json.loads(s) if s.startswith("[") else [int(x) for x in s.split(",")]
        return [int(x) for x in v]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot read exponent vector {text!r}") from exc


def parse_root(text: str) -> RootOfUnity:
    try:
        k, n = text.split("/")
        return RootOfUnity.from_kn(int(k), int(n))
    except ValueError as exc:
        raise UsageError(f"--root expects k/n, got {text!r}") from exc


def resolve_point(S: MahlerSystem, text: str):
    """``(system, modulus, row, note)``: a signed or torsion point becomes a twist at ``|alpha|``."""
    s = text.strip()
    c = parse_point(json.loads(s) if s.startswith("{") else s)
    x = c.abs_value()
    if c.torsion.is_one():
        return S, x, S.distinguished, None
    T = twist(S, c.torsion)
    r = c.torsion.to_json()
    return T, x, T.distinguished, f"evaluated through the twist by exp(2 pi i {r['k']}/{r['n']})"


SCHEMAS = {"decompose": "decompose", "cone": "cone", "expand": "expand", "iterate": "system",
           "twist": "system", "build": "build", "regular": "regular", "eval": "eval",
           "independence": "independence", "purity": "purity", "relations": "relations",
           "certify": "certificate", "selfcheck": "selfcheck"}


def load_schema(command: str) -> dict:
    """Published JSON schema for the output of ``command``."""
    ref = resources.files("mahlerkit") / "schemas" / f"{SCHEMAS[command]}.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def frac_list(v):
    return [rat_str(Fraction(x)) for x in v]


# ---------------------------------------------------------------------------
# subcommands (each returns a JSON-ready object or raises CheckFailed)


def cmd_decompose(args, cfg):
    pts = load_json_arg(args.points)
    if isinstance(pts, dict):
        pts = pts.get("points", [])
    coords = [parse_point(p) for p in pts]
    dec = lvdp_decompose(coords)
    return {"points": [c.describe() for c in coords], "decomposition": dec.to_json()}


def _cone_gens(d):
    gens = d.get("generators", [])
    dim = d.get("ambient_dim") or (len(gens[0]) if gens else None)
    if dim is None:
        raise UsageError("cone input needs generators or ambient_dim")
    return gens, cones.RationalCone(gens, dim)


def cmd_cone(args, cfg):
    d = load_json_arg(args.input)
    gens, cone = _cone_gens(d)
    if args.action == "member":
        res = cones.cone_member(d["point"], cone)
        out = {"action": "member", "point": frac_list(d["point"]), "member": res.member,
               "verified": res.verify(d["point"], cone)}
        if res.member:
            out["coefficients"] = frac_list(res.coefficients)
        else:
            out["functional"] = frac_list(res.functional)
        return out
    if args.action == "basis":
        kept, certs = cones.cone_basis(gens, certificates=True)
        return {"action": "basis", "kept": [frac_list(g) for g in kept],
                "dropped": [{"index": i, "coefficients": frac_list(c)} for i, c in sorted(certs.items())]}
    lam, mu1, Gamma = d["lambda"], d["mu1"], d.get("Gamma", [[0] * len(d["lambda"])])
    out = {"action": "intersect", "lambda": frac_list(lam), "mu1": frac_list(mu1)}
    try:
        ks = cones.line_cone_intersection(lam, mu1, Gamma, cone)
    except cones.UnboundedIntersection as exc:
        out.update(status="failed", error=str(exc))
        raise CheckFailed(out) from exc
    ok = cones.bound_Bd_check(lam, mu1, Gamma, cone, ks)
    out.update(status="ok" if ok else "failed", ks=ks, bound_check=ok)
    if not ok:
        raise CheckFailed(out)
    return out


def _series_json(S: MahlerSystem, N: int):
    comps = expand(S, N)
    return [{"label": lab, "coefficients": [c.to_expr() for c in comp]} for lab, comp in zip(S.labels, comps)]


def cmd_expand(args, cfg):
    S = load_system(args.system)
    N = args.terms if args.terms is not None else cfg.truncation
    return {"q": S.q, "terms": N, "distinguished": S.distinguished, "components": _series_json(S, N)}


def cmd_iterate(args, cfg):
    if args.times < 1:
        raise UsageError("--times must be >= 1")
    return iterate(load_system(args.system), args.times).to_json()


def cmd_twist(args, cfg):
    return twist(load_system(args.system), parse_root(args.root)).to_json()


def cmd_build(args, cfg):
    if len(args.system) != len(args.mu):
        raise UsageError("give one --mu per --system")
    pairs = [(load_system(s), parse_vector(m)) for s, m in zip(args.system, args.mu)]
    try:
        M = build_block_system(pairs)
    except DependentExponents as exc:
        raise CheckFailed({"status": "failed", "error": str(exc),
                           "pair": [exc.pair[0] + 1, exc.pair[1] + 1]}) from exc
    out = M.to_json()
    out["status"] = "ok"
    return out


def cmd_regular(args, cfg):
    S, x, _, note = resolve_point(load_system(args.system), args.point)
    rep = regular_point_check(S, x, cfg.orbit_depth)
    out = rep.to_json()
    out["input_point"] = args.point
    if note:
        out["note"] = note
    if not rep.regular:
        raise CheckFailed(out)
    return out


def cmd_eval(args, cfg):
    S, x, row, note = resolve_point(load_system(args.system), args.point)
    try:
        res = eval_value(S, x, digits=cfg.digits, K=args.depth, N=args.terms or 32, k_max=cfg.orbit_depth)
    except NotRegular as exc:
        raise CheckFailed({"status": "failed", "error": "point is not regular",
                           "regularity": exc.report.to_json()}) from exc
    out = res.to_json(row)
    out.update(status="ok", point=args.point, evaluated_at=point_json(x))
    if note:
        out["note"] = note
    return out


def _read_series(entry):
    return [parse_coefficient(str(c)) for c in entry]


def cmd_independence(args, cfg):
    N, D = cfg.truncation, cfg.degree_bound
    if args.input:
        d = load_json_arg(args.input)
        raw = d["series"] if isinstance(d, dict) else d
        series = [_read_series(s) for s in raw]
    elif args.system:
        series = []
        for s in args.system:
            S = load_system(s)
            series.append(expand(S, N)[S.distinguished])
    else:
        raise UsageError("give --input or at least one --system")
    rep = linear_independence_Qz(series, D, N)
    out = rep.to_json()
    out["count"] = len(series)
    if not rep.independent:
        raise CheckFailed(out)
    return out


def cmd_purity(args, cfg):
    d = load_json_arg(args.input)
    N = int(d.get("truncation", 12))
    support = int(d.get("support", 3))
    families = []
    for fam in d["families"]:
        if "systems" in fam:
            ss = []
            for sd in fam["systems"]:
                S = MahlerSystem.from_json(sd)
                ss.append(expand(S, N)[S.distinguished])
        else:
            ss = [_read_series(s) for s in fam["series"]]
        families.append((tuple(int(m) for m in fam["mu"]), ss))
    rep = purity_check(families, N, support, check_mu=bool(d.get("check_mu", True)))
    out = rep.to_json()
    if rep.found:
        raise CheckFailed(out)
    return out


def cmd_relations(args, cfg):
    d = load_json_arg(args.values)
    vals = d["values"] if isinstance(d, dict) else d
    precision = args.digits if args.digits is not None else cfg.digits
    rels = value_relation_search([str(v) for v in vals], args.degree, precision)
    return {"values": [str(v) for v in vals], "degree": args.degree, "precision": precision,
            "relations": [dict(r, height=str(r["height"]),
                               coefficients={k: str(c) for k, c in r["coefficients"].items()})
                          for r in rels],
            "heuristic": True}


def cmd_certify(args, cfg):
    d = load_json_arg(args.input)
    opts = CertOptions(truncation=cfg.truncation, degree_bound=cfg.degree_bound, k_max=cfg.orbit_depth,
                       eval_digits=cfg.digits, threads=args.threads or threads_from_env())
    cert = certify(CertInput.from_json(d, opts))
    report = args.report
    if report is None:
        report = os.path.join(os.path.dirname(os.path.abspath(args.out)) if args.out else os.getcwd(), "cert.md")
    with open(report, "w", encoding="utf-8") as fh:
        fh.write(render_certificate(cert, "markdown"))
    text = to_json_text(cert)
    if cert.status == "partial":
        raise CheckFailed(json.loads(text))
    return json.loads(text)


def cmd_selfcheck(args, cfg):
    from .selfcheck import run_all

    outcomes = run_all(quick=not args.full, seed=cfg.seed)
    for o in outcomes:
        print(o.line(), file=sys.stderr)
    out = {"mode": "full" if args.full else "quick", "seed": cfg.seed,
           "passed": all(o.passed for o in outcomes), "criteria": [o.to_json() for o in outcomes]}
    if not out["passed"]:
        raise CheckFailed(out)
    return out


# ---------------------------------------------------------------------------
# parser


def _global_flags(p, suppress: bool):
    def default(v):
        return argparse.SUPPRESS if suppress else v

    g = p.add_argument_group("global options")
    g.add_argument("--truncation", type=int, default=default(128), metavar="N",
                   help="series truncation order (default 128)")
    g.add_argument("--degree-bound", type=int, default=default(8), metavar="D",
                   help="polynomial degree bound for relation searches (default 8)")
    g.add_argument("--digits", type=int, default=default(40),
                   help="decimal digits for numerical evaluation (default 40)")
    g.add_argument("--orbit-depth", type=int, default=default(64), metavar="K",
                   help="number of orbit points checked for regularity (default 64)")
    g.add_argument("--seed", type=int, default=default(0), help="seed for randomized checks (default 0)")
    g.add_argument("--out", default=default(None), metavar="PATH",
                   help="write the JSON result here instead of stdout")


def build_parser() -> Parser:
    parser = Parser(prog="mahler-kit", allow_abbrev=False,
                    description="Exact tools for Mahler systems and independence certificates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=Parser)
    sub.required = True

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, allow_abbrev=False)
        _global_flags(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("decompose", cmd_decompose, "multiplicative decomposition of points in (0, 1)")
    p.add_argument("--points", required=True, help="JSON list of points (inline or file path)")

    p = add("cone", cmd_cone, "cone membership, minimal basis, or line intersection")
    p.add_argument("action", choices=["member", "basis", "intersect"], help="which cone operation to run")
    p.add_argument("--input", required=True, help="cone JSON (inline or file path)")

    p = add("expand", cmd_expand, "power series expansion of every component")
    p.add_argument("--system", required=True, help="system JSON (inline or file path)")
    p.add_argument("--terms", type=int, help="last coefficient index (default: --truncation)")

    p = add("iterate", cmd_iterate, "system for z -> z^(q^l)")
    p.add_argument("--system", required=True, help="system JSON (inline or file path)")
    p.add_argument("--times", type=int, required=True, metavar="L", help="iteration count l >= 1")

    p = add("twist", cmd_twist, "system whose distinguished component is f(zeta z)")
    p.add_argument("--system", required=True, help="system JSON (inline or file path)")
    p.add_argument("--root", required=True, metavar="K/N", help="zeta = exp(2 pi i k/n)")

    p = add("build", cmd_build, "block system in several variables from systems and exponent vectors")
    p.add_argument("--system", action="append", required=True, help="system JSON; repeat once per block")
    p.add_argument("--mu", action="append", required=True, help="exponent vector such as 1,0; one per --system")

    p = add("regular", cmd_regular, "regularity of a point along its orbit")
    p.add_argument("--system", required=True, help="system JSON (inline or file path)")
    p.add_argument("--point", required=True, help="rational such as 1/2, or a torsion point JSON")

    p = add("eval", cmd_eval, "numerical value of the solution vector at a point")
    p.add_argument("--system", required=True, help="system JSON (inline or file path)")
    p.add_argument("--point", required=True, help="rational such as 1/2, or a torsion point JSON")
    p.add_argument("--depth", type=int, help="number of functional-equation steps (default automatic)")
    p.add_argument("--terms", type=int, help="series terms used at the last orbit point (default 32)")

    p = add("independence", cmd_independence, "linear independence over Q(z) up to truncation")
    p.add_argument("--input", help="JSON with a 'series' list of coefficient lists")
    p.add_argument("--system", action="append", help="system JSON whose distinguished series is used; repeatable")

    p = add("purity", cmd_purity, "search for relations across monomial substitutions")
    p.add_argument("--input", required=True, help="purity JSON with families, truncation and support")

    p = add("relations", cmd_relations, "heuristic integer polynomial relations among numerical values")
    p.add_argument("--values", required=True, help="JSON list of decimal strings")
    p.add_argument("--degree", type=int, default=2, help="total degree bound (default 2)")

    p = add("certify", cmd_certify, "run the full pipeline and write an independence certificate")
    p.add_argument("--input", required=True, help="certificate input JSON")
    p.add_argument("--report", help="markdown report path (default cert.md next to --out)")
    p.add_argument("--threads", type=int, help="worker threads (default MAHLERKIT_THREADS or 1)")

    p = add("selfcheck", cmd_selfcheck, "run the embedded oracle suite")
    p.add_argument("--full", action="store_true", help="use the full acceptance sizes")
    return parser


def _known_flags(parser: Parser, command: str | None) -> list:
    subs = parser._subparsers._group_actions[0].choices
    known = set()
    for p in [parser] + ([subs[command]] if command in subs else []):
        for a in p._actions:
            known.update(a.option_strings)
    return sorted(known)


def _suggest(parser: Parser, argv: list) -> str:
    """Close matches for every flag in ``argv`` that the chosen subcommand does not know."""
    subs = parser._subparsers._group_actions[0].choices
    command = next((a for a in argv if a in subs), None)
    known = _known_flags(parser, command)
    hints = []
    for x in argv:
        flag = x.split("=")[0]
        if flag.startswith("--") and flag not in known:
            near = difflib.get_close_matches(flag, known, n=1)
            hints.append(f"unrecognized argument {flag}" + (f" (did you mean {near[0]}?)" if near else ""))
    return "; ".join(hints)


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args, extras = parser.parse_known_args(argv)
        if extras:
            raise UsageError("mahler-kit: error: unrecognized arguments: " + " ".join(extras))
        cfg = Config(args.truncation, args.degree_bound, args.digits, args.orbit_depth, args.seed)
        try:
            result, code = args.func(args, cfg), 0
        except CheckFailed as exc:
            result, code = exc.payload, 2
    except SystemExit as exc:           # --help and --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        hints = _suggest(parser, argv)
        if hints:
            print(f"mahler-kit: {hints}", file=sys.stderr)
        return 1
    except (ParseError, MahlerError, AnalysisError, CertifyError, DecompositionError,
            FactorizationError, KeyError, ValueError, TypeError) as exc:
        name = type(exc).__name__
        print(f"mahler-kit: error: {name}: {exc}", file=sys.stderr)
        return 1
    text = dumps(result)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
