"""Everything the checks consume for one source file, plus the Finding record."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..analysis import ContractAnalysis, Project, analyze_contract
from ..erc20conf import ConformanceReport, check_interface, is_token_candidate
from ..frontend import RawScanReport, SourceFile, ast, parse_file, scan_raw
from ..frontend.source import Diagnostic, Span
from .registry import CheckDescriptor, Severity


@dataclass(frozen=True)
class Finding:
    check: CheckDescriptor
    span: Span
    message: str
    severity: Severity
    contract: Optional[str] = None
    function: Optional[str] = None
    evidence: tuple[tuple[str, str], ...] = ()

    @property
    def sort_key(self) -> tuple:
        return (self.span.path, self.span.start, self.check.id, self.span.end, self.message,
                self.contract or "", self.function or "")


@dataclass
class AnalysisBundle:
    file: SourceFile
    unit: ast.SourceUnit
    project: Project
    raw: RawScanReport
    contracts: list[ContractAnalysis] = field(default_factory=list)
    conformance: dict[str, ConformanceReport] = field(default_factory=dict)
    analyzed_paths: frozenset[str] = frozenset()
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def is_token(self, contract: ast.ContractDef) -> bool:
        return is_token_candidate(contract, self.project)

    @property
    def min_version(self) -> Optional[tuple[int, int, int]]:
        return self.unit.min_version


def norm_path(path: str) -> str:
    return os.path.normcase(os.path.abspath(path))


def build_bundles(files: Iterable[SourceFile]) -> list[AnalysisBundle]:
    """Parse and analyze a file set; names resolve across the whole set."""
    files = list(files)
    units = [parse_file(f) for f in files]
    project = Project(units)
    paths = frozenset(norm_path(f.path) for f in files)
    bundles = []
    for f, unit in zip(files, units):
        bundle = AnalysisBundle(f, unit, project, scan_raw(f), analyzed_paths=paths,
                                diagnostics=list(unit.diagnostics))
        for c in unit.contracts:
            bundle.contracts.append(analyze_contract(c, project))
            bundle.conformance[c.name] = check_interface(c, project)
        bundles.append(bundle)
    return bundles


def build_bundle(file: SourceFile) -> AnalysisBundle:
    return build_bundles([file])[0]


def bundle_from_text(text: str, path: str = "<string>") -> AnalysisBundle:
    return build_bundle(SourceFile(path, text.encode("utf-8")))
