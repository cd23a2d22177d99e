"""Structural ERC-20 interface conformance by normalized signature text."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .analysis.context import Project
from .frontend import ast
from .frontend.types import type_text


@dataclass(frozen=True)
class MethodSpec:
    name: str
    params: tuple[str, ...]
    returns: tuple[str, ...]

    @property
    def signature(self) -> str:
        return f"{self.name}({','.join(self.params)})"


@dataclass(frozen=True)
class EventSpec:
    name: str
    params: tuple[str, ...]

    @property
    def signature(self) -> str:
        return f"{self.name}({','.join(self.params)})"


METHODS = (
    MethodSpec("totalSupply", (), ("uint256",)),
    MethodSpec("balanceOf", ("address",), ("uint256",)),
    MethodSpec("transfer", ("address", "uint256"), ("bool",)),
    MethodSpec("transferFrom", ("address", "address", "uint256"), ("bool",)),
    MethodSpec("approve", ("address", "uint256"), ("bool",)),
    MethodSpec("allowance", ("address", "address"), ("uint256",)),
)
EVENTS = (
    EventSpec("Transfer", ("address", "address", "uint256")),
    EventSpec("Approval", ("address", "address", "uint256")),
)
ERC20_NAMES = frozenset(m.name for m in METHODS)
ERC20_EVENT_NAMES = frozenset(e.name for e in EVENTS)


@dataclass
class ItemReport:
    name: str
    expected: str
    present: bool = False
    signature_match: bool = False
    return_type_match: bool = False
    visibility: str = "other"  # external | public | other
    found: Optional[str] = None
    owner: Optional[str] = None  # contract that declares the member
    node: Optional[ast.Node] = None

    @property
    def ok(self) -> bool:
        return self.present and self.signature_match


@dataclass
class ConformanceReport:
    contract: str
    methods: dict[str, ItemReport] = field(default_factory=dict)
    events: dict[str, ItemReport] = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(r.ok for r in self.methods.values()) and all(r.ok for r in self.events.values())

    @property
    def missing(self) -> list[str]:
        return [n for n, r in {**self.methods, **self.events}.items() if not r.present]

    def items(self) -> list[ItemReport]:
        return list(self.methods.values()) + list(self.events.values())


def _getter_shape(var: ast.StateVarDecl) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Parameter and return types of the getter a public state variable generates."""
    params: list[str] = []
    t: ast.TypeName = var.type
    while True:
        if isinstance(t, ast.MappingType):
            params.append(type_text(t.key))
            t = t.value
        elif isinstance(t, ast.ArrayType):
            params.append("uint256")
            t = t.base
        else:
            break
    return tuple(params), (type_text(t),)


def _method_report(spec: MethodSpec, contract: ast.ContractDef, project: Project) -> ItemReport:
    rep = ItemReport(spec.name, spec.signature)
    candidates: list[tuple[ast.ContractDef, ast.FunctionDef]] = [
        (c, fn) for c, fn in project.functions(contract) if fn.name == spec.name and fn.kind == "function"
    ]
    for owner, fn in candidates:
        params = tuple(type_text(p.type) for p in fn.params)
        rets = tuple(type_text(p.type) for p in fn.returns)
        match = params == spec.params
        if not rep.present or (match and not rep.signature_match):
            rep.present = True
            rep.signature_match = match
            rep.return_type_match = rets == spec.returns
            rep.visibility = fn.visibility if fn.visibility in ("external", "public") else "other"
            rep.found = f"{fn.signature} returns ({','.join(rets)})"
            rep.owner = owner.name
            rep.node = fn
    if not rep.present:
        for c in project.linearize(contract):
            var = c.state_var(spec.name)
            if var is not None and var.visibility == "public":
                params, rets = _getter_shape(var)
                rep.present = True
                rep.signature_match = params == spec.params
                rep.return_type_match = rets == spec.returns
                rep.visibility = "public"
                rep.found = f"{spec.name}({','.join(params)}) returns ({','.join(rets)})"
                rep.owner = c.name
                rep.node = var
                break
    return rep


def _event_report(spec: EventSpec, contract: ast.ContractDef, project: Project) -> ItemReport:
    rep = ItemReport(spec.name, spec.signature, visibility="other")
    for c in project.linearize(contract):
        for ev in c.events:
            if ev.name != spec.name:
                continue
            params = tuple(type_text(p.type) for p in ev.params)
            match = params == spec.params
            if not rep.present or (match and not rep.signature_match):
                rep.present = True
                rep.signature_match = match
                rep.return_type_match = True
                rep.found = f"{ev.name}({','.join(params)})"
                rep.owner = c.name
                rep.node = ev
    return rep


def check_interface(contract: ast.ContractDef, project: Optional[Project] = None) -> ConformanceReport:
    project = project or Project([])
    report = ConformanceReport(contract.name)
    for spec in METHODS:
        report.methods[spec.name] = _method_report(spec, contract, project)
    for ev in EVENTS:
        report.events[ev.name] = _event_report(ev, contract, project)
    return report


def is_token_candidate(contract: ast.ContractDef, project: Project) -> bool:
    """Concrete contract that declares or inherits any ERC-20 member name."""
    if contract.kind != "contract":
        return False
    for c in project.linearize(contract):
        if any(fn.name in ERC20_NAMES for fn in c.functions):
            return True
        if any(v.name in ERC20_NAMES and v.visibility == "public" for v in c.state_vars):
            return True
        if any(e.name in ERC20_EVENT_NAMES for e in c.events):
            return True
    return False
