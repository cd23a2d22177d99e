from __future__ import annotations

import json
import os
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CORPUS, ROOT, SECURE_TOKEN
from ercaudit.corpus import fixture_paths
from ercaudit.frontend import SourceFile, Span
from ercaudit.pipeline import analyze_files, analyze_paths
from ercaudit.report import (
    Status,
    build_matrix,
    exit_code,
    load_json,
    render_json,
    render_registry,
    render_table,
)
from ercaudit.rules import Config, Finding, Severity, descriptor, registry

GOLDEN = Path(__file__).parent / "golden" / "corpus.json"


def finding(check_id: int, severity: Severity | None = None, path: str = "a.sol", start: int = 0) -> Finding:
    d = descriptor(check_id)
    return Finding(d, Span(path, start, start + 1, 1, start + 1), "msg", severity or d.severity)


def test_clean_matrix():
    m = build_matrix([])
    assert m.summary.total == 82
    assert m.summary.informational == 3 and m.summary.failed == 0
    assert m.summary.success_rate == 100.0
    assert m.row(60).status is Status.INFORMATIONAL


def test_failed_row_counts_findings():
    m = build_matrix([finding(8), finding(8, start=5)])
    assert m.row(8).status is Status.FAILED and m.row(8).count == 2
    assert m.row(8).label == "failed(2)"
    assert m.summary.passed == 78
    assert m.summary.success_rate == pytest.approx(100 * 78 / 79)


def test_informational_severity_row():
    m = build_matrix([finding(57, Severity.INFORMATIONAL)])
    assert m.row(57).status is Status.INFORMATIONAL
    assert m.summary.failed == 0 and m.summary.success_rate == 100.0


def test_unselected_rows_not_applicable():
    m = build_matrix([finding(8)], selection={8, 9})
    assert m.row(8).status is Status.FAILED and m.row(9).status is Status.PASSED
    assert m.summary.not_applicable == 80
    assert m.summary.success_rate == 50.0


def test_text_table_lists_findings():
    text = render_table([finding(8)], diagnostics=[])
    assert "failed(1)" in text and "a.sol:1:1: [8 SWC-107] high" in text


def test_registry_renderings():
    table = render_registry("table").splitlines()
    assert len(table) == 83
    rows = json.loads(render_registry("json"))
    assert [r["id"] for r in rows] == list(range(1, 83))
    assert rows[37]["swc"] == "tool-specific" and rows[0]["swc"] == 100


def test_exit_codes():
    assert exit_code([]) == 0
    assert exit_code([finding(8)]) == 1
    assert exit_code([finding(57, Severity.INFORMATIONAL)]) == 0
    assert exit_code([finding(57, Severity.LOW)], Severity.MEDIUM) == 0
    diag = SourceFile.from_text("x").span(0, 0)
    from ercaudit.frontend import Diagnostic

    assert exit_code([finding(8)], errors=[Diagnostic("SyntaxError", "bad", diag)]) == 2


_text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=30)


@st.composite
def findings(draw):
    check_id = draw(st.integers(1, 82))
    start = draw(st.integers(0, 10_000))
    end = start + draw(st.integers(0, 500))
    span = Span(draw(st.sampled_from(["a.sol", "dir/b.sol", "ü.sol"])), start, end,
                draw(st.integers(1, 500)), draw(st.integers(1, 200)))
    evidence = tuple(sorted(draw(st.dictionaries(st.from_regex(r"[a-z_]{1,8}", fullmatch=True), _text,
                                                 max_size=3)).items()))
    return Finding(descriptor(check_id), span, draw(_text.filter(bool)), draw(st.sampled_from(list(Severity))),
                   draw(st.none() | _text), draw(st.none() | _text), evidence)


@given(st.lists(findings(), max_size=15))
def test_json_round_trip(items):
    data = render_json(items, files=["a.sol"])
    data.decode("ascii")
    back, doc = load_json(data)
    assert back == sorted(items, key=lambda f: f.sort_key)
    assert render_json(back, files=["a.sol"]) == data
    assert doc["matrix"]["summary"]["total"] == 82


def test_non_ascii_source_is_escaped():
    data = b'// \xe2\x80\xae caf\xc3\xa9 \xff\ncontract T { string s = "\xe2\x80\xae"; }\n'
    report = analyze_files([SourceFile("weird.sol", data)], Config(enable=frozenset({31, 1})))
    out = render_json(report.findings, report.selection, report.files, report.diagnostics)
    assert all(b < 0x80 for b in out)
    doc = json.loads(out)
    assert [f["check"] for f in doc["findings"]].count(31) == 2


def _corpus_json() -> bytes:
    paths = [os.path.relpath(p, ROOT) for p in fixture_paths(CORPUS)] + [os.path.relpath(SECURE_TOKEN, ROOT)]
    report = analyze_paths(paths)
    return render_json(report.findings, report.selection, report.files, report.diagnostics)


def test_golden_corpus_report(monkeypatch):
    monkeypatch.chdir(ROOT)
    out = _corpus_json()
    if os.environ.get("ERCAUDIT_UPDATE_GOLDEN"):
        GOLDEN.parent.mkdir(exist_ok=True)
        GOLDEN.write_bytes(out)
    assert out == GOLDEN.read_bytes()
