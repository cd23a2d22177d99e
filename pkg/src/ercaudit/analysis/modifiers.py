"""Syntactic modifier inlining."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from ..frontend import ast
from .context import Project

FROM_FUNCTION = "function"


@dataclass
class EffectiveBody:
    """Function body with every known modifier wrapped around it.

    ``origin_map`` maps ``id(node)`` for every node in ``statements`` to
    either ``"function"`` or the name of the modifier it came from.
    """

    function: ast.FunctionDef
    contract: ast.ContractDef
    statements: list[ast.Statement]
    origin_map: dict[int, str] = field(default_factory=dict)
    opaque_modifiers: list[str] = field(default_factory=list)
    applied_modifiers: list[str] = field(default_factory=list)

    def origin(self, node: ast.Node) -> str:
        return self.origin_map.get(id(node), FROM_FUNCTION)

    def walk(self):
        for stmt in self.statements:
            yield from stmt.walk()


def _substitute(stmt: ast.Statement, inner: list[ast.Statement]) -> list[ast.Statement]:
    """Copy ``stmt`` with each placeholder replaced by ``inner``."""
    if isinstance(stmt, ast.Placeholder):
        return list(inner)
    if not any(isinstance(n, ast.Placeholder) for n in stmt.walk()):
        return [stmt]
    if isinstance(stmt, ast.Block):
        body: list[ast.Statement] = []
        for s in stmt.statements:
            body.extend(_substitute(s, inner))
        return [dataclasses.replace(stmt, statements=body)]
    changes = {}
    for name in ("then", "orelse", "body"):
        child = getattr(stmt, name, None)
        if isinstance(child, ast.Statement):
            out = _substitute(child, inner)
            changes[name] = out[0] if len(out) == 1 else ast.Block(span=child.span, statements=out)
    return [dataclasses.replace(stmt, **changes)] if changes else [stmt]


def expand_statements(
    fn: ast.FunctionDef,
    contract: ast.ContractDef,
    project: Optional[Project] = None,
    statements: Optional[list[ast.Statement]] = None,
) -> EffectiveBody:
    project = project or Project([])
    body = list(statements if statements is not None else (fn.body.statements if fn.body else []))
    origin: dict[int, str] = {}
    for stmt in body:
        for node in stmt.walk():
            origin[id(node)] = FROM_FUNCTION
    opaque: list[str] = []
    applied: list[str] = []
    # innermost first: the last modifier in the list wraps the body directly
    for inv in reversed(fn.modifiers):
        mod = _find_modifier(project, contract, inv.name)
        if mod is None:
            if project.contract(inv.name) is not None or _is_base(contract, inv.name):
                continue  # base-constructor arguments, not a modifier
            marker = ast.OpaqueModifier(span=inv.span, name=inv.name, args=list(inv.args or []))
            origin[id(marker)] = inv.name
            body = [marker] + body
            opaque.insert(0, inv.name)
            continue
        applied.insert(0, inv.name)
        if mod.body is None:
            continue
        wrapped: list[ast.Statement] = []
        for s in mod.body.statements:
            wrapped.extend(_substitute(s, body))
        for stmt in wrapped:
            for node in stmt.walk():
                origin.setdefault(id(node), inv.name)
        body = wrapped
    return EffectiveBody(fn, contract, body, origin, opaque, applied)


def _is_base(contract: ast.ContractDef, name: str) -> bool:
    return name in contract.base_names


def _find_modifier(project: Project, contract: ast.ContractDef, name: str) -> Optional[ast.ModifierDef]:
    found = project.modifier(contract, name)
    if found is not None:
        return found
    for m in contract.modifiers:
        if m.name == name:
            return m
    return None


def expand_modifiers(fn: ast.FunctionDef, contract: ast.ContractDef, project: Optional[Project] = None) -> EffectiveBody:
    """Inline ``fn``'s modifiers left-to-right: the first listed is outermost."""
    return expand_statements(fn, contract, project)
