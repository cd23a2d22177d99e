"""Simulator exceptions."""

from __future__ import annotations


class SimError(Exception):
    pass


class Revert(SimError):
    """A transaction or nested frame aborted; its state changes are discarded."""

    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


class Overflow(Revert):
    def __init__(self, op: str, a: int, b: int) -> None:
        super().__init__(f"overflow in {a} {op} {b}")
        self.op = op


class DepthExceeded(SimError):
    def __init__(self, depth: int) -> None:
        super().__init__(f"call depth {depth} exceeds the limit")
        self.depth = depth


class UnknownScenario(SimError, KeyError):
    def __str__(self) -> str:
        return f"unknown scenario {self.args[0]!r}"


class TooManyTransactions(SimError):
    pass
