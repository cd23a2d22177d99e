"""Read files, run the analysis and the selected checks, merge the results."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional

from .frontend import SourceFile
from .report import Report
from .rules import Config, build_bundles, execute


def analyze_files(files: Iterable[SourceFile], config: Optional[Config] = None) -> Report:
    """Analyze ``files`` as one project; output order does not depend on input order."""
    config = config or Config()
    files = sorted(files, key=lambda f: f.path)
    selection = frozenset(config.selection())
    report = Report([f.path for f in files], selection=selection)
    for bundle in build_bundles(files):
        run = execute(bundle, selection, config)
        report.findings.extend(run.findings)
        report.diagnostics.extend(bundle.diagnostics)
        report.diagnostics.extend(run.errors)
    report.findings.sort(key=lambda f: f.sort_key)
    report.diagnostics.sort(key=lambda d: (d.span.path, d.span.start, d.code, d.message))
    return report


def analyze_paths(paths: Iterable[str | Path], config: Optional[Config] = None) -> Report:
    """Raises OSError when a path cannot be read."""
    return analyze_files([SourceFile.read(p) for p in paths], config)


def analyze_text(text: str, path: str = "<string>", config: Optional[Config] = None) -> Report:
    return analyze_files([SourceFile.from_text(text, path)], config)
