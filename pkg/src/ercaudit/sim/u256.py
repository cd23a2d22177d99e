"""256-bit unsigned arithmetic in wrapping or checked mode."""

from __future__ import annotations

from enum import Enum

from .errors import Overflow

MOD = 1 << 256
MAX = MOD - 1


class Mode(Enum):
    WRAPPING = "wrapping"
    CHECKED = "checked"


def valid(x: int) -> bool:
    return 0 <= x <= MAX


def _finish(op: str, a: int, b: int, raw: int, mode: Mode) -> int:
    if mode is Mode.WRAPPING:
        return raw % MOD
    if not valid(raw):
        raise Overflow(op, a, b)
    return raw


def add(a: int, b: int, mode: Mode = Mode.CHECKED) -> int:
    return _finish("+", a, b, a + b, mode)


def sub(a: int, b: int, mode: Mode = Mode.CHECKED) -> int:
    return _finish("-", a, b, a - b, mode)


def mul(a: int, b: int, mode: Mode = Mode.CHECKED) -> int:
    return _finish("*", a, b, a * b, mode)
