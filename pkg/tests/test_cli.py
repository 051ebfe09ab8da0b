import json

import pytest
from hypothesis import given, settings, strategies as st

from painleve_ve.cli import main
from painleve_ve.report import ReportDocument, build_suite


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ve_match_and_mismatch(capsys):
    code, out, _ = run(capsys, "ve", "4.1")
    assert code == 0 and "MATCHES PAPER" in out
    code, out, _ = run(capsys, "ve", "4.8")
    assert code == 2 and "DIFFERS FROM PAPER" in out


def test_explicit_inputs_alias_case(capsys):
    code, out, _ = run(capsys, "ve", "--family", "P2", "--params", "0", "--solution", "0", "--format", "machine")
    data = json.loads(out)
    assert code == 0 and data["match"] == {"a0": True, "a1": True}


def test_explicit_inputs_without_case(capsys):
    code, out, _ = run(capsys, "ve", "--family", "P2", "--params", "1", "--solution=-1/t", "--format", "machine")
    assert code == 0 and "match" not in json.loads(out)


def test_usage_errors(capsys):
    code, _, err = run(capsys, "classify", "4.7")
    assert code == 1 and "missing --a, --delta" in err
    assert run(capsys, "ve", "--bogus")[0] == 1
    assert run(capsys, "ve", "9.9")[0] == 1
    assert run(capsys, "ve", "--family", "P4", "--params", "0", "--solution", "t")[0] == 1
    assert run(capsys, "ve", "--family", "P2", "--params", "0", "--solution", "t")[0] == 1
    assert run(capsys, "classify", "4.7", "--param", "a")[0] == 1


def test_classify_expected(capsys):
    code, out, _ = run(capsys, "classify", "4.7", "--a", "9/32", "--delta", "2", "--format", "machine")
    data = json.loads(out)
    assert code == 0 and data["group"] == "TorusGm" and data["passed"]
    code, out, _ = run(capsys, "classify", "4.4", "--a", "2")
    assert code == 2 and "BorelProper" in out


def test_analyze_and_prop31(capsys):
    code, out, _ = run(capsys, "analyze", "4.9", "--theta1", "1", "--format", "machine")
    pts = {p["point"]: p for p in json.loads(out)["points"]}
    assert code == 0 and pts["1/2"]["apparent"] and pts["0"]["has_logarithm"]
    assert run(capsys, "prop31", "4.3")[0] == 0


def test_scan_and_monodromy(capsys, tmp_path):
    target = tmp_path / "scan.json"
    assert run(capsys, "scan", "--nmax", "2", "--format", "machine", "--out", str(target))[0] == 0
    assert len(json.loads(target.read_text())["rows"]) == 3
    code, out, _ = run(capsys, "monodromy", "--a", "1/8")
    assert code == 0 and "a=1/8" in out
    code, out, _ = run(capsys, "monodromy", "4.7", "--a", "1/32", "--delta", "2", "--format", "machine")
    assert code == 0 and abs(json.loads(out)["trace"][0] + 2) < 1e-8


def test_suite_subset_round_trip():
    doc = build_suite(n_max=1, keys=["4.1", "4.2"], numeric=False)
    assert doc.passed
    again = ReportDocument.from_machine(doc.to_machine())
    assert again.to_machine() == doc.to_machine()
    assert "4.1" in doc.to_human()


@settings(max_examples=60, deadline=None)
@given(st.recursive(st.none() | st.booleans() | st.integers() | st.text(max_size=8),
                    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(st.text(max_size=5), inner, max_size=3),
                    max_leaves=10))
def test_machine_document_round_trip(info):
    doc = ReportDocument(cases=[], scan=[], trace_checks=[], first_integrals=[], info={"extra": info}, options={})
    assert ReportDocument.from_machine(doc.to_machine()).to_dict() == doc.to_dict()
