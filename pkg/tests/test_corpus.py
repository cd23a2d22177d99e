from __future__ import annotations

import pytest

from conftest import CORPUS, SECURE_TOKEN
from ercaudit.corpus import Fixture, FixtureError, evaluate, fixture_paths
from ercaudit.rules import Strategy, registry

PATHS = fixture_paths(CORPUS) + [SECURE_TOKEN]


@pytest.mark.parametrize("path", PATHS, ids=lambda p: p.name)
def test_fixture_flags_exactly_expected(path):
    fx = Fixture.load(path)
    flagged, errors = evaluate(fx)
    assert errors == []
    assert flagged == set(fx.expect)


def test_corpus_size_and_balance():
    fixtures = [Fixture.load(p) for p in PATHS]
    assert 120 <= len(fixtures) <= 200
    positives = {i for fx in fixtures for i in fx.expect}
    negatives = {i for fx in fixtures for i in fx.scope - fx.expect}
    assessable = {d.id for d in registry() if d.strategy is not Strategy.INFORMATIONAL_ONLY}
    assert positives == assessable
    assert assessable <= negatives


def test_header_parsing(tmp_path):
    p = tmp_path / "a.sol"
    p.write_text("// checks: 1-3, 8\n// expect: 8\ncontract A {}\n")
    fx = Fixture.load(p)
    assert fx.scope == frozenset({1, 2, 3, 8}) and fx.expect == frozenset({8})
    p.write_text("// checks: all\n// expect: none\n")
    fx = Fixture.load(p)
    assert fx.expect == frozenset() and 60 not in fx.scope and len(fx.scope) == 79


@pytest.mark.parametrize("header", ["// checks: 1\n", "// checks: 1\n// expect: 2\n"])
def test_header_errors(tmp_path, header):
    p = tmp_path / "bad.sol"
    p.write_text(header + "contract A {}\n")
    with pytest.raises(FixtureError):
        Fixture.load(p)
