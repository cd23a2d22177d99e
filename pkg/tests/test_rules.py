from __future__ import annotations

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import CORPUS, SECURE_TOKEN
from ercaudit.frontend import SourceFile
from ercaudit.rules import (
    NOT_ASSESSABLE,
    Config,
    ConfigError,
    Marker,
    Severity,
    Strategy,
    build_bundle,
    descriptor,
    execute,
    load_config,
    parse_ids,
    registry,
    run_checks,
)
from ercaudit.rules import engine

ALL_IDS = frozenset(range(1, 83))


def bundle(path):
    return build_bundle(SourceFile.read(path))


def test_registry_is_dense():
    rows = registry()
    assert len(rows) == 82
    assert [d.id for d in rows] == list(range(1, 83))


def test_registry_swc_columns():
    rows = registry()
    assert [d.swc for d in rows[:37]] == list(range(100, 137))
    assert all(d.swc is Marker.TOOL_SPECIFIC for d in rows[37:53])
    assert all(d.swc is Marker.BEST_PRACTICE for d in rows[53:])


def test_registry_examples():
    d = descriptor(8)
    assert d.swc_label == "SWC-107" and d.title == "Re-entrancy" and d.strategy is Strategy.DATAFLOW
    d = descriptor(64)
    assert d.swc is Marker.BEST_PRACTICE and d.strategy is Strategy.INFORMATIONAL_ONLY
    informational = [d.id for d in registry() if d.strategy is Strategy.INFORMATIONAL_ONLY]
    assert informational == [60, 64, 65]


def test_secure_fixture_has_no_medium_findings():
    run = execute(bundle(SECURE_TOKEN), ALL_IDS)
    assert run.errors == []
    assert [f for f in run.findings if f.severity.rank >= Severity.MEDIUM.rank] == []


def test_call_before_write_single_finding():
    findings = run_checks(bundle(CORPUS / "c08_call_before_write.sol"), {8})
    assert len(findings) == 1
    assert findings[0].check.id == 8


def test_mutex_modifier_suppresses_reentrancy():
    assert run_checks(bundle(CORPUS / "fp_mutex_modifier.sol"), {8}) == []


def test_tracked_transfer_suppresses_approve_race():
    assert run_checks(bundle(CORPUS / "fp_tracked_approve.sol"), {15}) == []
    assert [f.check.id for f in run_checks(bundle(CORPUS / "c15_approve_race.sol"), {15})] == [15]


def test_informational_rows_become_notes():
    run = execute(bundle(SECURE_TOKEN), {60, 64, 65})
    assert run.notes == [(60, NOT_ASSESSABLE), (64, NOT_ASSESSABLE), (65, NOT_ASSESSABLE)]
    assert run.findings == []


def test_unknown_id_rejected():
    with pytest.raises(ValueError):
        execute(bundle(SECURE_TOKEN), {83})


def test_failing_check_becomes_diagnostic(monkeypatch):
    def boom(ctx):
        raise RuntimeError("kaput")

    monkeypatch.setattr(engine, "_CHECKS", [((1,), boom)] + list(engine._CHECKS))
    run = execute(bundle(CORPUS / "c01_default_visibility.sol"), {1})
    assert [e.code for e in run.errors] == ["ToolError"]
    assert [f.check.id for f in run.findings] == [1]


def test_determinism():
    b = bundle(SECURE_TOKEN)
    first = run_checks(b, ALL_IDS)
    assert run_checks(b, ALL_IDS) == first
    assert run_checks(bundle(SECURE_TOKEN), ALL_IDS) == first


def test_findings_are_well_formed(corpus_paths):
    for path in corpus_paths:
        b = bundle(path)
        findings = run_checks(b, ALL_IDS)
        assert findings == sorted(findings, key=lambda f: f.sort_key)
        for f in findings:
            assert f.message
            assert f.span.path == b.file.path
            assert 0 <= f.span.start <= f.span.end <= len(b.file.data)


_BUNDLES = {}


def _cached(name):
    if name not in _BUNDLES:
        _BUNDLES[name] = bundle(CORPUS / name if name != "secure" else SECURE_TOKEN)
    return _BUNDLES[name]


_SAMPLES = ["secure", "token_compliant.sol", "c08_call_before_write.sol", "c02_unchecked_add.sol",
            "c15_approve_race.sol", "c29_loop_over_storage.sol", "c14_payout_loop.sol"]
_ids = st.frozensets(st.integers(1, 82), max_size=30)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(name=st.sampled_from(_SAMPLES), s1=_ids, s2=_ids)
def test_selection_is_monotonic(name, s1, s2):
    b = _cached(name)
    key = lambda fs: {(f.check.id, f.span.start, f.span.end, f.message) for f in fs}
    union = key(run_checks(b, s1 | s2))
    assert union == key(run_checks(b, s1)) | key(run_checks(b, s2))


def test_parse_ids():
    assert parse_ids("1-3, 8,10-10") == {1, 2, 3, 8, 10}
    with pytest.raises(ValueError):
        parse_ids("5-2")
    with pytest.raises(ValueError):
        parse_ids("0")


def test_config_selection():
    assert Config().selection() == {d.id for d in registry() if d.enabled_default}
    assert Config(enable=frozenset({1, 2, 3}), disable=frozenset({2})).selection() == {1, 3}


def test_load_config_text():
    cfg = load_config(text="pragma_min = 0.8.0\nenable = 1-5\nseverity.8 = low\nmin-severity = high\n")
    assert cfg.pragma_min == (0, 8, 0)
    assert cfg.enable == frozenset(range(1, 6))
    assert cfg.severity(8, Severity.HIGH) is Severity.LOW
    assert cfg.min_severity is Severity.HIGH


@pytest.mark.parametrize("text", ["bogus = 1", "severity.99 = low", "literal_digits = many", "enable = x"])
def test_load_config_rejects(text):
    with pytest.raises(ConfigError):
        load_config(text=text)


def test_severity_override_applies():
    cfg = load_config(text="severity.8 = informational")
    findings = run_checks(bundle(CORPUS / "c08_call_before_write.sol"), {8}, cfg)
    assert [f.severity for f in findings] == [Severity.INFORMATIONAL]


def test_pragma_min_threshold():
    b = bundle(SECURE_TOKEN)
    assert run_checks(b, {3}) == []
    assert [f.check.id for f in run_checks(b, {3}, Config(pragma_min=(0, 9, 0)))] == [3]
