"""Labelled fixture corpus: header parsing and precision/recall scoring.

Each fixture starts with two comment lines::

    // checks: 8            (ids in scope, or "all")
    // expect: 8            (ids that must fire, or "none")

The fixture is analyzed with exactly the in-scope checks; every in-scope id is
then a true/false positive or negative for that fixture.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .frontend import SourceFile
from .pipeline import analyze_files
from .rules import Config, Strategy, parse_ids, registry

_HEADER = re.compile(r"^\s*//\s*(checks|expect)\s*:\s*(.*?)\s*$")


class FixtureError(ValueError):
    pass


@dataclass(frozen=True)
class Fixture:
    path: str
    scope: frozenset[int]
    expect: frozenset[int]

    @classmethod
    def load(cls, path: str | Path) -> Fixture:
        text = Path(path).read_text(encoding="utf-8")
        fields: dict[str, str] = {}
        for line in text.splitlines()[:5]:
            m = _HEADER.match(line)
            if m:
                fields[m.group(1)] = m.group(2)
        if "expect" not in fields:
            raise FixtureError(f"{path}: missing '// expect:' header")
        assessable = {d.id for d in registry() if d.strategy is not Strategy.INFORMATIONAL_ONLY}
        raw_scope = fields.get("checks", "all")
        scope = assessable if raw_scope == "all" else parse_ids(raw_scope)
        expect = set() if fields["expect"] == "none" else parse_ids(fields["expect"])
        if not expect <= scope:
            raise FixtureError(f"{path}: expected ids {sorted(expect - scope)} are outside the scope")
        return cls(str(path), frozenset(scope), frozenset(expect))


@dataclass
class Score:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def precision(self) -> float:
        return 1.0 if self.tp + self.fp == 0 else self.tp / (self.tp + self.fp)

    @property
    def recall(self) -> float:
        return 1.0 if self.tp + self.fn == 0 else self.tp / (self.tp + self.fn)


@dataclass
class Mismatch:
    path: str
    check: int
    expected: bool
    flagged: bool


@dataclass
class CorpusResult:
    fixtures: list[Fixture] = field(default_factory=list)
    per_check: dict[int, Score] = field(default_factory=dict)
    mismatches: list[Mismatch] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def total(self) -> Score:
        s = Score()
        for v in self.per_check.values():
            s.tp, s.fp, s.fn, s.tn = s.tp + v.tp, s.fp + v.fp, s.fn + v.fn, s.tn + v.tn
        return s

    def coverage(self) -> dict[int, tuple[int, int]]:
        """(positive fixtures, negative fixtures) per check id."""
        out: dict[int, tuple[int, int]] = {}
        for fx in self.fixtures:
            for cid in fx.scope:
                pos, neg = out.get(cid, (0, 0))
                out[cid] = (pos + 1, neg) if cid in fx.expect else (pos, neg + 1)
        return out


def fixture_paths(root: str | Path) -> list[Path]:
    return sorted(Path(root).rglob("*.sol"))


def evaluate(fixture: Fixture, config: Optional[Config] = None) -> tuple[set[int], list[str]]:
    """Ids flagged on ``fixture`` with only its in-scope checks enabled."""
    config = (config or Config()).merged(enable=fixture.scope, disable=frozenset())
    report = analyze_files([SourceFile.read(fixture.path)], config)
    return {f.check.id for f in report.findings}, [str(d) for d in report.diagnostics]


def score_corpus(paths: Iterable[str | Path], config: Optional[Config] = None) -> CorpusResult:
    result = CorpusResult()
    for p in paths:
        fx = Fixture.load(p)
        result.fixtures.append(fx)
        flagged, errors = evaluate(fx, config)
        result.errors.extend(errors)
        for cid in sorted(fx.scope):
            s = result.per_check.setdefault(cid, Score())
            want, got = cid in fx.expect, cid in flagged
            if want and got:
                s.tp += 1
            elif want:
                s.fn += 1
            elif got:
                s.fp += 1
            else:
                s.tn += 1
            if want != got:
                result.mismatches.append(Mismatch(fx.path, cid, want, got))
    return result
