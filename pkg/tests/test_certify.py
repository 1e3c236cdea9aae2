import copy
import json

import pytest

from mahlerkit.certify import (TRUSTED_STEPS, CertifyError, CertInput, IndependenceCertificate, certify,
                               render_certificate, validate_certificate)
from mahlerkit.samples import THUE_MORSE, cert_input


def run(d, **opts):
    inp = CertInput.from_json(d)
    for k, v in opts.items():
        setattr(inp.options, k, v)
    return certify(inp)


@pytest.fixture(scope="module")
def intro():
    return run(cert_input(["1/2", "1/5", "1/10"]))


def test_intro_example(intro):
    d = intro.to_json()
    assert d["status"] == "complete"
    assert d["conclusion"]["tr_deg"] == 3
    assert d["conclusion"]["statement"] == "tr.deg = Card(I_1) = 3"
    assert len(d["classes"]) == 1
    dec = d["classes"][0]["decomposition"]
    assert dec["exponents"] == [[1, 0], [0, 1], [1, 1]]
    assert dec["generators"] == [{"2": "-1"}, {"5": "-1"}]
    assert [g["identity"] for g in d["global_relations"]] == ["1/10 = (1/2)(1/5)"]
    assert validate_certificate(d) == []


def test_json_roundtrip(intro):
    text = render_certificate(intro, "json")
    again = IndependenceCertificate.from_json(json.loads(text))
    assert render_certificate(again, "json") == text


def test_markdown_lists_global_relation(intro):
    md = render_certificate(intro, "markdown")
    assert "1/10 = (1/2)(1/5) (global dependence noted but allowed)" in md
    assert "## Trusted steps" in md and "## Assumptions" in md
    assert all(t["id"] in md for t in TRUSTED_STEPS)


def test_partial_names_failed_step():
    c = run(cert_input(["1/2", "1/4"]))
    d = c.to_json()
    assert d["status"] == "partial" and d["conclusion"]["tr_deg"] is None
    assert d["failed_step"]["step"] == 1
    assert d["failed_step"]["detail"] == "entries 1 and 2: 2·e1 = e2"
    md = render_certificate(c, "markdown")
    assert "Failed step 1: pairwise multiplicative independence" in md
    assert validate_certificate(d) == []


def test_two_classes():
    c = run(cert_input(["1/2", "1/3"], radices=[2, 3])).to_json()
    assert c["status"] == "complete" and c["conclusion"]["tr_deg"] == 2
    assert c["conclusion"]["per_class_cards"] == [1, 1]
    assert c["cross_class"]["spectral_radii"] == ["2", "3"] and c["cross_class"]["pairwise_independent"]


def test_alignment_inside_a_class():
    d = cert_input(["1/2", "1/3"], radices=[4, 8])
    c = run(d).to_json()
    assert c["status"] == "complete"
    cls = c["classes"][0]
    assert cls["ell"] == 6 and cls["radix"] == "64"
    assert [s["iterations"] for s in cls["systems"]] == [3, 2]


def test_torsion_point_twists():
    d = cert_input(["1/2", {"value": "1/3", "torsion": {"k": 1, "n": 2}}],
                   systems=[THUE_MORSE, THUE_MORSE])
    c = run(d).to_json()
    assert c["status"] == "complete"
    assert c["classes"][0]["systems"][1]["twist"] == {"k": 1, "n": 2}


def test_missing_attestation_is_conditional():
    d = cert_input(["1/2", "1/3"])
    d["entries"][1]["attestation"]["not_in_field"] = False
    c = run(d).to_json()
    assert c["status"] == "conditional" and c["conclusion"]["tr_deg"] is None
    assert c["conclusion"]["conditional_on"] == [2]
    assert validate_certificate(c) == []


def test_point_out_of_range_is_partial():
    c = run(cert_input(["1/2", "3/2"])).to_json()
    assert c["status"] == "partial" and c["failed_step"]["step"] == 0


def test_validator_catches_tampering(intro):
    d = copy.deepcopy(intro.to_json())
    d["conclusion"]["tr_deg"] = 4
    assert validate_certificate(d)
    d = copy.deepcopy(intro.to_json())
    d["classes"][0]["decomposition"]["exponents"][2] = [1, 2]
    assert validate_certificate(d)


def test_threads_do_not_change_output():
    d = cert_input(["1/2", "1/3", "1/5"], radices=[2, 3, 2])
    assert render_certificate(run(d, threads=1), "json") == render_certificate(run(d, threads=3), "json")


def test_bad_input():
    d = cert_input(["1/2"])
    d["options"] = {"no_such_option": 1}
    with pytest.raises(CertifyError):
        CertInput.from_json(d)


def test_trusted_steps_are_labels_not_quotes():
    for t in TRUSTED_STEPS:
        assert set(t) >= {"id", "source", "use"}
        assert '"' not in t["use"]
