"""Audit matrix, text and JSON rendering, and the exit-code policy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from . import __version__
from .frontend.source import Diagnostic, Span
from .rules.bundle import Finding
from .rules.engine import NOT_ASSESSABLE
from .rules.registry import CheckDescriptor, Severity, Strategy, descriptor, registry

TOOL = "ercaudit"


class Status(Enum):
    PASSED = "passed"
    FAILED = "failed"
    INFORMATIONAL = "informational"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class MatrixRow:
    check: CheckDescriptor
    status: Status
    count: int = 0
    note: str = ""

    @property
    def label(self) -> str:
        if self.status is Status.FAILED:
            return f"failed({self.count})"
        if self.status is Status.INFORMATIONAL:
            return f"informational({self.note or self.count})"
        return self.status.value


@dataclass(frozen=True)
class Summary:
    total: int
    passed: int
    failed: int
    informational: int
    not_applicable: int

    @property
    def success_rate(self) -> float:
        graded = self.passed + self.failed
        return 100.0 if graded == 0 else 100.0 * self.passed / graded


@dataclass(frozen=True)
class AuditMatrix:
    rows: tuple[MatrixRow, ...]
    summary: Summary

    def row(self, check_id: int) -> MatrixRow:
        return self.rows[check_id - 1]


@dataclass
class Report:
    """Merged result of analyzing a file set."""

    files: list[str]
    findings: list[Finding] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    selection: Optional[frozenset[int]] = None

    @property
    def matrix(self) -> AuditMatrix:
        return build_matrix(self.findings, self.selection)


def build_matrix(findings: Iterable[Finding], selection: Optional[Iterable[int]] = None) -> AuditMatrix:
    """One row per registered check; rows outside ``selection`` are not-applicable."""
    selected = None if selection is None else set(selection)
    by_id: dict[int, list[Finding]] = {}
    for f in findings:
        by_id.setdefault(f.check.id, []).append(f)
    rows = []
    for d in registry():
        hits = by_id.get(d.id, [])
        if selected is not None and d.id not in selected:
            rows.append(MatrixRow(d, Status.NOT_APPLICABLE))
        elif d.strategy is Strategy.INFORMATIONAL_ONLY:
            rows.append(MatrixRow(d, Status.INFORMATIONAL, len(hits), NOT_ASSESSABLE))
        elif not hits:
            rows.append(MatrixRow(d, Status.PASSED))
        elif all(f.severity is Severity.INFORMATIONAL for f in hits):
            rows.append(MatrixRow(d, Status.INFORMATIONAL, len(hits)))
        else:
            rows.append(MatrixRow(d, Status.FAILED, len(hits)))
    count = {s: sum(1 for r in rows if r.status is s) for s in Status}
    summary = Summary(len(rows), count[Status.PASSED], count[Status.FAILED],
                      count[Status.INFORMATIONAL], count[Status.NOT_APPLICABLE])
    return AuditMatrix(tuple(rows), summary)


# --- text ---------------------------------------------------------------------


def render_matrix(matrix: AuditMatrix) -> str:
    title_w = max(len(r.check.title) for r in matrix.rows)
    lines = [f"{'ID':>3}  {'SWC':<8} {'Title':<{title_w}}  {'Severity':<13} Status"]
    for r in matrix.rows:
        d = r.check
        lines.append(f"{d.id:>3}  {d.swc_label:<8} {d.title:<{title_w}}  {d.severity.value:<13} {r.label}")
    lines.insert(1, "-" * max(len(x) for x in lines))
    s = matrix.summary
    lines.append("")
    lines.append(
        f"total {s.total}  passed {s.passed}  failed {s.failed}  informational {s.informational}  "
        f"not-applicable {s.not_applicable}  success rate {s.success_rate:.1f}%"
    )
    return "\n".join(lines) + "\n"


def finding_line(f: Finding) -> str:
    where = f.span.path + f":{f.span.line}:{f.span.column}"
    scope = ".".join(x for x in (f.contract, f.function) if x)
    scope = f" ({scope})" if scope else ""
    return f"{where}: [{f.check.id} {f.check.swc_label}] {f.severity.value}: {f.message}{scope}"


def render_table(findings: Iterable[Finding], selection: Optional[Iterable[int]] = None,
                 diagnostics: Iterable[Diagnostic] = ()) -> str:
    findings = sorted(findings, key=lambda f: f.sort_key)
    out = [render_matrix(build_matrix(findings, selection))]
    if findings:
        out.append("findings:\n" + "".join(finding_line(f) + "\n" for f in findings))
    diags = list(diagnostics)
    if diags:
        out.append("errors:\n" + "".join(f"{d}\n" for d in diags))
    return "\n".join(out)


def render_registry(fmt: str = "table") -> str:
    rows = registry()
    if fmt == "json":
        data = [
            {"id": d.id, "swc": d.swc_json, "title": d.title, "severity": d.severity.value,
             "strategy": d.strategy.value, "enabled": d.enabled_default}
            for d in rows
        ]
        return json.dumps(data, indent=2, ensure_ascii=True) + "\n"
    title_w = max(len(d.title) for d in rows)
    lines = [f"{'ID':>3}  {'SWC':<8} {'Title':<{title_w}}  {'Severity':<13} Strategy"]
    for d in rows:
        lines.append(f"{d.id:>3}  {d.swc_label:<8} {d.title:<{title_w}}  {d.severity.value:<13} {d.strategy.value}")
    return "\n".join(lines) + "\n"


# --- JSON ---------------------------------------------------------------------


def finding_dict(f: Finding) -> dict:
    return {
        "check": f.check.id,
        "swc": f.check.swc_json,
        "title": f.check.title,
        "severity": f.severity.value,
        "file": f.span.path,
        "line": f.span.line,
        "column": f.span.column,
        "start": f.span.start,
        "end": f.span.end,
        "contract": f.contract,
        "function": f.function,
        "message": f.message,
        "evidence": {k: v for k, v in f.evidence},
    }


def finding_from_dict(d: dict) -> Finding:
    span = Span(d["file"], d["start"], d["end"], d["line"], d["column"])
    return Finding(descriptor(d["check"]), span, d["message"], Severity(d["severity"]),
                   d["contract"], d["function"], tuple(d["evidence"].items()))


def matrix_dict(matrix: AuditMatrix) -> dict:
    s = matrix.summary
    return {
        "rows": [
            {"id": r.check.id, "swc": r.check.swc_json, "title": r.check.title,
             "status": r.status.value, "count": r.count, "note": r.note}
            for r in matrix.rows
        ],
        "summary": {
            "total": s.total,
            "passed": s.passed,
            "failed": s.failed,
            "informational": s.informational,
            "not_applicable": s.not_applicable,
            "success_rate_percent": round(s.success_rate, 2),
        },
    }


def render_json(findings: Iterable[Finding], selection: Optional[Iterable[int]] = None,
                files: Iterable[str] = (), diagnostics: Iterable[Diagnostic] = ()) -> bytes:
    findings = sorted(findings, key=lambda f: f.sort_key)
    doc = {
        "tool": TOOL,
        "version": __version__,
        "files": sorted(set(files)),
        "findings": [finding_dict(f) for f in findings],
        "matrix": matrix_dict(build_matrix(findings, selection)),
        "diagnostics": [
            {"code": d.code, "file": d.span.path, "line": d.span.line, "column": d.span.column,
             "message": d.message}
            for d in diagnostics
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=True) + "\n").encode("ascii")


def load_json(data: bytes | str) -> tuple[list[Finding], dict]:
    """Parse a JSON report back into findings plus the raw document."""
    doc = json.loads(data)
    return [finding_from_dict(d) for d in doc["findings"]], doc


def exit_code(findings: Iterable[Finding], min_severity: Severity = Severity.LOW,
              errors: Iterable[Diagnostic] = ()) -> int:
    if any(True for _ in errors):
        return 2
    return 1 if any(f.severity.rank >= min_severity.rank for f in findings) else 0
