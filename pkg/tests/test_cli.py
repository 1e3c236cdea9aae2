import json

import jsonschema
import pytest

from mahlerkit.cli import SCHEMAS, build_parser, load_schema, main
from mahlerkit.samples import FREDHOLM, POLE, THUE_MORSE, cert_input

F = json.dumps(FREDHOLM)
TM = json.dumps(THUE_MORSE)


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def no_floats(obj):
    if isinstance(obj, float):
        return False
    if isinstance(obj, dict):
        return all(no_floats(v) for v in obj.values())
    if isinstance(obj, list):
        return all(no_floats(v) for v in obj)
    return True


def check(command, text):
    doc = json.loads(text)
    jsonschema.validate(doc, load_schema(command))
    assert no_floats(doc)
    return doc


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, obj in {
        "intro": cert_input(["1/2", "1/5", "1/10"]),
        "dependent": cert_input(["1/2", "1/4"]),
        "series": {"series": [["1"] * 30, ["0"] + ["1"] * 29]},
        "purity": {"truncation": 12, "support": 6,
                   "families": [{"mu": [1, 0], "series": [["1"] * 13]}, {"mu": [0, 1], "systems": [FREDHOLM]}]},
        "vals": ["1.41421356237309504880168872420969807856967187537694807317667973799", "2"],
        "cone_member": {"generators": [[1, 0], [1, 1]], "point": [3, 1]},
        "cone_basis": {"generators": [[1, 0], [1, 1], [2, 1]]},
        "cone_intersect": {"generators": [[0, 1]], "lambda": [0, 0], "mu1": [1, 0], "Gamma": [[3, 0], [5, 2]]},
    }.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(obj))
        paths[name] = str(p)
    return paths


def test_decompose(capsys):
    code, out, _ = call(capsys, "decompose", "--points", '[ "1/2", "1/4" ]')
    assert code == 0
    d = check("decompose", out)
    assert d["decomposition"]["exponents"] == [[1], [2]]


@pytest.mark.parametrize("action", ["member", "basis", "intersect"])
def test_cone(capsys, files, action):
    code, out, _ = call(capsys, "cone", action, "--input", files[f"cone_{action}"])
    assert code == 0
    d = check("cone", out)
    if action == "member":
        assert d["member"] and d["coefficients"] == ["2", "1"]
    if action == "intersect":
        assert d["ks"] == [3]


def test_expand_iterate_twist(capsys):
    code, out, _ = call(capsys, "expand", "--system", F, "--terms", "8")
    assert code == 0 and check("expand", out)["components"][0]["coefficients"] == list("011010001")
    code, out, _ = call(capsys, "iterate", "--system", F, "--times", "2")
    assert code == 0 and check("iterate", out)["q"] == 4
    code, out, _ = call(capsys, "twist", "--system", TM, "--root", "1/3")
    assert code == 0 and len(check("twist", out)["matrix"]) == 2


def test_build(capsys):
    code, out, _ = call(capsys, "build", "--system", F, "--mu", "1,0", "--system", TM, "--mu", "[0, 1]")
    assert code == 0 and check("build", out)["dimension"] == 3
    code, out, _ = call(capsys, "build", "--system", F, "--mu", "1,2", "--system", TM, "--mu", "2,4")
    assert code == 2 and check("build", out)["pair"] == [1, 2]


def test_regular(capsys):
    code, out, _ = call(capsys, "regular", "--system", F, "--point", "1/2")
    assert code == 0 and check("regular", out)["verdict"] == "regular"
    code, out, _ = call(capsys, "regular", "--system", json.dumps(POLE), "--point", "1/2")
    assert code == 2 and check("regular", out)["verdict"] == "notRegular(0)"


def test_eval(capsys):
    code, out, _ = call(capsys, "eval", "--system", F, "--point", "1/2", "--digits", "30")
    d = check("eval", out)
    assert code == 0 and d["values"][0]["re"].startswith("0.81642150902189314370807973753")
    code, out, _ = call(capsys, "eval", "--system", F, "--point=-1/2", "--digits", "30")
    d = check("eval", out)
    assert d["values"][d["distinguished"]]["re"].startswith("-0.18357849097810685629192026246")
    code, out, _ = call(capsys, "eval", "--system", json.dumps(POLE), "--point", "1/2")
    assert code == 2 and check("eval", out)["status"] == "failed"


def test_independence(capsys, files):
    code, out, _ = call(capsys, "independence", "--input", files["series"], "--truncation", "29",
                        "--degree-bound", "2")
    assert code == 2 and not check("independence", out)["independent_up_to"]
    code, out, _ = call(capsys, "independence", "--system", F, "--system", TM, "--truncation", "40",
                        "--degree-bound", "3")
    assert code == 0 and check("independence", out)["independent_up_to"]


def test_purity(capsys, files):
    code, out, _ = call(capsys, "purity", "--input", files["purity"])
    assert code == 0 and check("purity", out)["relation"] is None


def test_relations(capsys, files):
    code, out, _ = call(capsys, "relations", "--values", files["vals"], "--degree", "2", "--digits", "60")
    d = check("relations", out)
    assert code == 0 and {"x1^2": "-1", "x2": "1"} in [r["coefficients"] for r in d["relations"]]


def test_certify_writes_report(capsys, files, tmp_path):
    out_path = tmp_path / "cert.json"
    code, _, _ = call(capsys, "certify", "--input", files["intro"], "--out", str(out_path))
    assert code == 0
    d = check("certify", out_path.read_text())
    assert d["conclusion"]["tr_deg"] == 3
    assert "1/10 = (1/2)(1/5)" in (tmp_path / "cert.md").read_text()


def test_certify_dependent_exits_2(capsys, files, tmp_path):
    report = tmp_path / "r.md"
    code, out, _ = call(capsys, "certify", "--input", files["dependent"], "--report", str(report))
    assert code == 2
    d = check("certify", out)
    assert d["failed_step"]["name"] == "pairwise multiplicative independence"
    assert "2·e1 = e2" in d["failed_step"]["detail"]
    assert "pairwise multiplicative independence" in report.read_text()


def test_certify_threads_from_env(capsys, files, tmp_path, monkeypatch):
    monkeypatch.setenv("MAHLERKIT_THREADS", "4")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    call(capsys, "certify", "--input", files["intro"], "--out", str(a))
    monkeypatch.setenv("MAHLERKIT_THREADS", "1")
    call(capsys, "certify", "--input", files["intro"], "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_selfcheck(capsys):
    code, out, err = call(capsys, "selfcheck")
    d = check("selfcheck", out)
    assert code == 0 and d["passed"] and len(d["criteria"]) == 10
    assert err.count("[PASS]") == 10


def test_every_command_has_a_schema():
    sub = build_parser()._subparsers._group_actions[0]
    assert set(sub.choices) == set(SCHEMAS)


@pytest.mark.parametrize("argv,hint", [
    (["eval", "--system", F, "--point", "1/2", "--digts", "30"], "--digits"),
    (["certfy"], "certify"),
    (["expand", "--sytem", F], "--system"),
])
def test_usage_errors_suggest(capsys, argv, hint):
    code, _, err = call(capsys, *argv)
    assert code == 1 and "did you mean" in err and hint in err


def test_parse_errors_exit_1(capsys):
    bad = json.dumps({"q": 2, "matrix": [["1 + sqrt(2)"]], "seeds": {"0": ["1"]}})
    code, _, err = call(capsys, "expand", "--system", bad)
    assert code == 1 and "at position 4" in err
    code, _, err = call(capsys, "decompose", "--points", "/no/such/file.json")
    assert code == 1 and "cannot read" in err
    code, _, _ = call(capsys, "decompose", "--points", '["3/2"]')
    assert code == 1
    code, _, _ = call(capsys, "--truncation", "0", "expand", "--system", F)
    assert code == 1


def test_abbreviations_rejected(capsys):
    code, _, _ = call(capsys, "expand", "--sys", F)
    assert code == 1


def test_global_flags_before_or_after_command(capsys):
    a = call(capsys, "--truncation", "5", "expand", "--system", F)[1]
    b = call(capsys, "expand", "--system", F, "--truncation", "5")[1]
    assert a == b and json.loads(a)["terms"] == 5


def test_output_is_deterministic(capsys):
    outs = {call(capsys, "twist", "--system", F, "--root", "1/6")[1] for _ in range(3)}
    assert len(outs) == 1


def test_help_documents_every_flag(capsys):
    parser = build_parser()
    sub = parser._subparsers._group_actions[0]
    for name, p in sub.choices.items():
        text = p.format_help()
        for action in p._actions:
            for opt in action.option_strings:
                assert opt in text, (name, opt)
            if action.option_strings and action.help != "==SUPPRESS==":
                assert action.help, (name, action.option_strings)
        code = main([name, "--help"])
        assert code == 0
    capsys.readouterr()
