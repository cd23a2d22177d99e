"""Source files, byte spans and diagnostics."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class SourceFile:
    """Raw bytes of one input file plus the offsets of its line starts."""

    path: str
    data: bytes
    line_index: tuple[int, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if not self.line_index:
            starts = [0]
            starts.extend(i + 1 for i, b in enumerate(self.data) if b == 0x0A)
            object.__setattr__(self, "line_index", tuple(starts))

    @classmethod
    def from_text(cls, text: str, path: str = "<string>") -> SourceFile:
        return cls(path, text.encode("utf-8"))

    @classmethod
    def read(cls, path: str | Path) -> SourceFile:
        p = Path(path)
        return cls(str(path), p.read_bytes())

    def __len__(self) -> int:
        return len(self.data)

    def position(self, offset: int) -> tuple[int, int]:
        """1-based (line, column) of a byte offset."""
        line = bisect.bisect_right(self.line_index, offset)
        return line, offset - self.line_index[line - 1] + 1

    def span(self, start: int, end: int) -> Span:
        line, column = self.position(start)
        return Span(self.path, start, end, line, column, file=self)

    def text(self, start: int, end: int) -> str:
        return self.data[start:end].decode("utf-8", "replace")


@dataclass(frozen=True)
class Span:
    path: str
    start: int
    end: int
    line: int
    column: int
    file: SourceFile | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"inverted span {self.start}..{self.end}")

    def cover(self, other: Span) -> Span:
        """Smallest span containing both ``self`` and ``other``."""
        first = self if self.start <= other.start else other
        return Span(
            self.path, first.start, max(self.end, other.end), first.line, first.column, file=self.file
        )

    def contains(self, other: Span) -> bool:
        return self.path == other.path and self.start <= other.start and other.end <= self.end

    @property
    def text(self) -> str:
        if self.file is None:
            return ""
        return self.file.text(self.start, self.end)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    span: Span
    expected: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.span.path}:{self.span.line}:{self.span.column}: {self.code}: {self.message}"
