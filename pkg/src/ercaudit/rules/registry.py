"""The 82-entry check catalogue."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union


class Severity(Enum):
    INFORMATIONAL = "informational"
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return _RANK[self]

    @classmethod
    def parse(cls, text: str) -> Severity:
        return cls(text.strip().lower())


_RANK = {Severity.INFORMATIONAL: 0, Severity.LOW: 1, Severity.MEDIUM: 2, Severity.HIGH: 3}


class Strategy(Enum):
    LEXICAL = "lexical"
    SYNTACTIC = "syntactic"
    DATAFLOW = "dataflow"
    CONFORMANCE = "conformance"
    INFORMATIONAL_ONLY = "informational-only"


class Marker(Enum):
    TOOL_SPECIFIC = "tool-specific"
    BEST_PRACTICE = "best-practice"


SwcRef = Union[int, Marker]


@dataclass(frozen=True)
class CheckDescriptor:
    id: int
    swc: SwcRef
    title: str
    severity: Severity
    strategy: Strategy
    enabled_default: bool = True

    @property
    def swc_label(self) -> str:
        if isinstance(self.swc, Marker):
            return "TS" if self.swc is Marker.TOOL_SPECIFIC else "BP"
        return f"SWC-{self.swc}"

    @property
    def swc_json(self) -> Union[int, str]:
        return self.swc.value if isinstance(self.swc, Marker) else self.swc


_TITLES = {
    1: "Function default visibility",
    2: "Integer Overflow and Underflow",
    3: "Outdated Compiler Version",
    4: "Floating Pragma",
    5: "Unchecked Call Return Value",
    6: "Unprotected Ether Withdrawal",
    7: "Unprotected SELFDESTRUCT Instruction",
    8: "Re-entrancy",
    9: "State variable default visibility",
    10: "Uninitialized Storage Pointer",
    11: "Assert Violation",
    12: "Use of Deprecated Solidity Functions",
    13: "Delegatecall to untrusted callee",
    14: "DoS with Failed Call",
    15: "Transaction Order Dependence",
    16: "Authorization through tx.origin",
    17: "Block values as a proxy for time",
    18: "Signature Malleability",
    19: "Incorrect Constructor Name",
    20: "Shadowing State Variables",
    21: "Weak Sources of Randomness from Chain Attributes",
    22: "Missing Protection against Signature Replay Attacks",
    23: "Lack of Proper Signature Verification",
    24: "Requirement Violation",
    25: "Write to Arbitrary Storage Location",
    26: "Incorrect Inheritance Order",
    27: "Insufficient Gas Griefing",
    28: "Arbitrary Jump with Function Type Variable",
    29: "DoS With Block Gas Limit",
    30: "Typographical Error",
    31: "Right-To-Left-Override control character (U+202E)",
    32: "Presence of unused variables",
    33: "Unexpected Ether balance",
    34: "Hash Collisions With Variable Length Arguments",
    35: "Message call with hardcoded gas amount",
    36: "Code With No Effects",
    37: "Unencrypted Private Data On-Chain",
    38: "Allowance decreases upon transfer",
    39: "Allowance function returns an accurate value",
    40: "It is possible to cancel an existing allowance",
    41: "A transfer with an insufficient amount is reverted",
    42: "Upon sending funds, the sender's balance is updated",
    43: "The Transfer event correctly logged",
    44: "Transfer an amount that is greater than the allowance",
    45: "Risk of short address attack is minimized",
    46: "Function names are unique",
    47: "Using miner controlled variables",
    48: "Use of return in constructor",
    49: "Throwing exceptions in transfer() and transferFrom()",
    50: "State variables that could be declared constant",
    51: "Tautology or contradiction",
    52: "Divide before multiply",
    53: "Unchecked Send",
    54: "Too many digits",
    55: "The decreaseAllowance definition follows the standard",
    56: "The increaseAllowance definition follows the standard",
    57: "Minimize attack surface",
    58: "Transfer to the burn address is reverted",
    59: "Source code is decentralized",
    60: "Funds can be held only by user-controlled wallets",
    61: "Code logic is simple to understand",
    62: "All functions are documented",
    63: "The Approval event is correctly logged",
    64: "Acceptable gas cost of the approve() function",
    65: "Acceptable gas cost of the transfer() function",
    66: "Emitting event when state changes",
    67: "Use of unindexed arguments",
    68: "ERC-20 compliance",
    69: "Conformance to naming conventions",
    70: "Token decimal",
    71: "Locked money (Freezing ETH)",
    72: "Malicious libraries",
    73: "Payable fallback function",
    74: "Prefer external to public visibility level",
    75: "Token name",
    76: "Error information in revert condition",
    77: "Complex Fallback",
    78: "Function Order",
    79: "Visibility Modifier Order",
    80: "Non-initialized return value",
    81: "Token symbol",
    82: "Allowance spending is possible",
}

_LEXICAL = {30, 31, 54}
_SYNTACTIC = {1, 3, 4, 9, 12, 16, 17, 19, 21, 28, 32, 34, 35, 47, 48, 50, 51, 52, 59, 62, 67, 69, 72, 74, 76, 78, 79, 80}
_CONFORMANCE = {38, 39, 40, 41, 42, 43, 44, 45, 46, 49, 55, 56, 57, 58, 61, 63, 66, 68, 70, 75, 81, 82}
_INFO_ONLY = {60, 64, 65}

_HIGH = {2, 6, 7, 8, 13}
_LOW_SWC = {1, 3, 4, 9}
_INFORMATIONAL = {37, 57, 60, 61, 64, 65}


def _strategy(i: int) -> Strategy:
    if i in _INFO_ONLY:
        return Strategy.INFORMATIONAL_ONLY
    if i in _LEXICAL:
        return Strategy.LEXICAL
    if i in _SYNTACTIC:
        return Strategy.SYNTACTIC
    if i in _CONFORMANCE:
        return Strategy.CONFORMANCE
    return Strategy.DATAFLOW


def _severity(i: int) -> Severity:
    if i in _INFORMATIONAL:
        return Severity.INFORMATIONAL
    if i in _HIGH:
        return Severity.HIGH
    if i in _LOW_SWC:
        return Severity.LOW
    if i <= 53:
        return Severity.MEDIUM
    return Severity.LOW


def _swc(i: int) -> SwcRef:
    if i <= 37:
        return 99 + i
    if i <= 53:
        return Marker.TOOL_SPECIFIC
    return Marker.BEST_PRACTICE


_REGISTRY = tuple(
    CheckDescriptor(i, _swc(i), _TITLES[i], _severity(i), _strategy(i)) for i in range(1, 83)
)
_BY_ID = {d.id: d for d in _REGISTRY}


def registry() -> list[CheckDescriptor]:
    return list(_REGISTRY)


def descriptor(check_id: int) -> CheckDescriptor:
    return _BY_ID[check_id]


def lookup(check_id: int) -> Optional[CheckDescriptor]:
    return _BY_ID.get(check_id)
