"""Byte-level hazard scan that runs before tokenization."""

from __future__ import annotations

from dataclasses import dataclass, field

from .source import SourceFile, Span

RTL_OVERRIDE = "‮".encode("utf-8")  # E2 80 AE


@dataclass(frozen=True)
class RawScanReport:
    rtl_override_positions: list[Span] = field(default_factory=list)
    # one span per maximal run of non-ASCII bytes
    non_ascii_positions: list[Span] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.rtl_override_positions


def scan_raw(file: SourceFile) -> RawScanReport:
    data = file.data
    rtl: list[Span] = []
    start = data.find(RTL_OVERRIDE)
    while start >= 0:
        rtl.append(file.span(start, start + len(RTL_OVERRIDE)))
        start = data.find(RTL_OVERRIDE, start + len(RTL_OVERRIDE))
    runs: list[Span] = []
    i, n = 0, len(data)
    while i < n:
        if data[i] >= 0x80:
            j = i
            while j < n and data[j] >= 0x80:
                j += 1
            runs.append(file.span(i, j))
            i = j
        else:
            i += 1
    return RawScanReport(rtl, runs)
