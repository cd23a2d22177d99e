"""Check dispatch: run the selected checks over one bundle."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

from ..frontend import ast
from ..frontend.source import Diagnostic, Span
from .bundle import AnalysisBundle, Finding
from .config import Config
from .registry import Strategy, descriptor, registry

NOT_ASSESSABLE = "not statically assessable"


class Ctx:
    """Per-run state handed to every check function."""

    def __init__(self, bundle: AnalysisBundle, config: Config, selected: set[int]) -> None:
        self.bundle = bundle
        self.config = config
        self.selected = selected
        self.findings: list[Finding] = []
        self._seen: set[tuple] = set()

    @property
    def project(self):
        return self.bundle.project

    def wants(self, *ids: int) -> bool:
        return any(i in self.selected for i in ids)

    def emit(
        self,
        check_id: int,
        where: Union[ast.Node, Span],
        message: str,
        contract: Optional[str] = None,
        function: Optional[str] = None,
        **evidence: object,
    ) -> None:
        if check_id not in self.selected:
            return
        span = where.span if isinstance(where, ast.Node) else where
        if span.path != self.bundle.file.path or span.end > len(self.bundle.file.data):
            # inherited members may live in another file; anchor at the contract instead
            return
        d = descriptor(check_id)
        key = (check_id, span.start, span.end, message)
        if key in self._seen:
            return
        self._seen.add(key)
        ev = tuple(sorted((k, str(v)) for k, v in evidence.items()))
        self.findings.append(
            Finding(d, span, message, self.config.severity(check_id, d.severity), contract, function, ev)
        )


CheckFn = Callable[[Ctx], None]
_CHECKS: list[tuple[tuple[int, ...], CheckFn]] = []


def check(*ids: int) -> Callable[[CheckFn], CheckFn]:
    def deco(fn: CheckFn) -> CheckFn:
        _CHECKS.append((ids, fn))
        return fn

    return deco


@dataclass
class CheckRun:
    findings: list[Finding] = field(default_factory=list)
    notes: list[tuple[int, str]] = field(default_factory=list)
    errors: list[Diagnostic] = field(default_factory=list)


def execute(bundle: AnalysisBundle, selection: Optional[Iterable[int]] = None,
            config: Optional[Config] = None) -> CheckRun:
    from . import checks_conformance, checks_dataflow, checks_syntactic  # noqa: F401  (registration)

    config = config or Config()
    selected = set(selection) if selection is not None else config.selection()
    unknown = sorted(i for i in selected if not 1 <= i <= 82)
    if unknown:
        raise ValueError(f"unknown check ids {unknown}")
    ctx = Ctx(bundle, config, selected)
    run = CheckRun()
    for ids, fn in _CHECKS:
        if not ctx.wants(*ids):
            continue
        try:
            fn(ctx)
        except Exception as exc:  # a failing check must not take down the run
            run.errors.append(
                Diagnostic("ToolError", f"check(s) {ids} failed: {exc!r}", bundle.file.span(0, 0))
            )
    for d in registry():
        if d.strategy is Strategy.INFORMATIONAL_ONLY and d.id in selected:
            run.notes.append((d.id, NOT_ASSESSABLE))
    run.findings = sorted(ctx.findings, key=lambda f: f.sort_key)
    return run


def run_checks(bundle: AnalysisBundle, selection: Optional[Iterable[int]] = None,
               config: Optional[Config] = None) -> list[Finding]:
    return execute(bundle, selection, config).findings
