"""Name resolution across the analyzed file set.

Bases, libraries and modifiers resolve only against contracts parsed in
the same run; anything else is treated as opaque.
"""

from __future__ import annotations

from typing import Iterable, Optional

from ..frontend import ast
from ..frontend.source import Span
from ..frontend.types import normalize, type_text

BUILTIN_FUNCTIONS = frozenset(
    {"require", "assert", "revert", "keccak256", "sha3", "sha256", "ripemd160", "ecrecover",
     "addmod", "mulmod", "blockhash", "gasleft", "type", "payable"}
)
GLOBAL_OBJECTS = frozenset({"msg", "block", "tx", "abi", "now", "this", "super", "bytes", "string"})

_ADDRESS = "address"
_GLOBAL_TYPES = {
    ("msg", "sender"): _ADDRESS,
    ("msg", "value"): "uint256",
    ("msg", "data"): "bytes",
    ("msg", "gas"): "uint256",
    ("msg", "sig"): "bytes4",
    ("tx", "origin"): _ADDRESS,
    ("tx", "gasprice"): "uint256",
    ("block", "coinbase"): _ADDRESS,
    ("block", "timestamp"): "uint256",
    ("block", "number"): "uint256",
    ("block", "difficulty"): "uint256",
    ("block", "gaslimit"): "uint256",
}


# synthesized types carry a dummy zero-width span
_NOSPAN = Span("<synthetic>", 0, 0, 1, 1)


def _el(name: str) -> ast.ElementaryType:
    return ast.ElementaryType(span=_NOSPAN, name=name)


class Project:
    """Index over every contract in the analyzed SourceUnits."""

    def __init__(self, units: Iterable[ast.SourceUnit]) -> None:
        self.units = list(units)
        self.contracts: dict[str, ast.ContractDef] = {}
        for unit in self.units:
            for c in unit.contracts:
                self.contracts.setdefault(c.name, c)
        self._lin: dict[int, list[ast.ContractDef]] = {}

    def contract(self, name: str) -> Optional[ast.ContractDef]:
        return self.contracts.get(name.split(".")[-1])

    def is_library(self, name: str) -> bool:
        c = self.contract(name)
        return c is not None and c.kind == "library"

    def linearize(self, contract: ast.ContractDef) -> list[ast.ContractDef]:
        """Most-derived first; later-listed bases take precedence over earlier ones."""
        key = id(contract)
        if key in self._lin:
            return self._lin[key]
        self._lin[key] = [contract]  # cycle guard
        out = [contract]
        for spec in reversed(contract.bases):
            base = self.contract(spec.name)
            if base is None or base is contract:
                continue
            for c in self.linearize(base):
                if c not in out:
                    out.append(c)
        self._lin[key] = out
        return out

    def unresolved_bases(self, contract: ast.ContractDef) -> list[str]:
        out = []
        for c in self.linearize(contract):
            out.extend(b.name for b in c.bases if self.contract(b.name) is None)
        return out

    def state_vars(self, contract: ast.ContractDef) -> dict[str, ast.StateVarDecl]:
        out: dict[str, ast.StateVarDecl] = {}
        for c in self.linearize(contract):
            for v in c.state_vars:
                out.setdefault(v.name, v)
        return out

    def owner_of_var(self, contract: ast.ContractDef, name: str) -> Optional[ast.ContractDef]:
        for c in self.linearize(contract):
            if c.state_var(name) is not None:
                return c
        return None

    def functions(self, contract: ast.ContractDef) -> list[tuple[ast.ContractDef, ast.FunctionDef]]:
        """Visible functions; an override in a derived contract hides the base one."""
        seen: set[str] = set()
        out = []
        for c in self.linearize(contract):
            for fn in c.functions:
                key = fn.signature if fn.kind == "function" else fn.kind
                if key in seen:
                    continue
                seen.add(key)
                out.append((c, fn))
        return out

    def functions_named(self, contract: ast.ContractDef, name: str) -> list[ast.FunctionDef]:
        return [fn for _, fn in self.functions(contract) if fn.name == name and fn.kind == "function"]

    def modifier(self, contract: ast.ContractDef, name: str) -> Optional[ast.ModifierDef]:
        for c in self.linearize(contract):
            for m in c.modifiers:
                if m.name == name:
                    return m
        return None

    def events(self, contract: ast.ContractDef) -> dict[str, ast.EventDef]:
        out: dict[str, ast.EventDef] = {}
        for c in self.linearize(contract):
            for e in c.events:
                out.setdefault(e.name, e)
        return out

    def structs(self, contract: ast.ContractDef) -> dict[str, ast.StructDef]:
        out: dict[str, ast.StructDef] = {}
        for c in self.linearize(contract):
            for s in c.structs:
                out.setdefault(s.name, s)
        for c in self.contracts.values():
            for s in c.structs:
                out.setdefault(f"{c.name}.{s.name}", s)
        return out

    def using_for(self, contract: ast.ContractDef) -> list[ast.UsingFor]:
        out = []
        for c in self.linearize(contract):
            out.extend(c.using_for)
        return out

    def unit_of(self, contract: ast.ContractDef) -> Optional[ast.SourceUnit]:
        for unit in self.units:
            if any(c is contract for c in unit.contracts):
                return unit
        return None


class TypeEnv:
    """Best-effort static types for expressions inside one function."""

    def __init__(self, project: Project, contract: ast.ContractDef, fn: Optional[ast.FunctionDef] = None,
                 extra: Iterable[ast.Parameter] = ()) -> None:
        self.project = project
        self.contract = contract
        self.state = project.state_vars(contract)
        self.locals: dict[str, Optional[ast.TypeName]] = {}
        self.params: set[str] = set()
        if fn is not None:
            for p in list(fn.params) + list(fn.returns):
                if p.name:
                    self.locals[p.name] = p.type
                    self.params.add(p.name)
            if fn.body is not None:
                self.add_locals(fn.body)
        for p in extra:
            if p.name:
                self.locals[p.name] = p.type
                self.params.add(p.name)

    def add_locals(self, root: ast.Node) -> None:
        for node in root.walk():
            if isinstance(node, ast.VarDecl):
                self.locals.setdefault(node.name, node.type)

    def is_state(self, name: str) -> bool:
        return name in self.state and name not in self.locals

    def is_local(self, name: str) -> bool:
        return name in self.locals

    def is_variable(self, name: str) -> bool:
        return name in self.locals or name in self.state

    def type_of(self, expr: Optional[ast.Expression]) -> Optional[ast.TypeName]:
        if expr is None:
            return None
        if isinstance(expr, ast.Identifier):
            if expr.name in self.locals:
                return self.locals[expr.name]
            if expr.name in self.state:
                return self.state[expr.name].type
            if expr.name == "now":
                return _el("uint256")
            if expr.name == "this":
                return ast.UserType(span=_NOSPAN, name=self.contract.name)
            return None
        if isinstance(expr, ast.Literal):
            if expr.kind == "number":
                return _el("uint256")
            if expr.kind == "address":
                return _el("address")
            if expr.kind == "bool":
                return _el("bool")
            if expr.kind == "string":
                return _el("string")
            return _el("bytes")
        if isinstance(expr, ast.MemberAccess):
            if isinstance(expr.expr, ast.Identifier) and not self.is_variable(expr.expr.name):
                g = _GLOBAL_TYPES.get((expr.expr.name, expr.member))
                if g:
                    return _el(g)
            if expr.member == "balance":
                return _el("uint256")
            if expr.member == "length":
                return _el("uint256")
            base = self.type_of(expr.expr)
            if isinstance(base, ast.UserType):
                struct = self.project.structs(self.contract).get(base.name)
                if struct:
                    for m in struct.members:
                        if m.name == expr.member:
                            return m.type
            return None
        if isinstance(expr, ast.IndexAccess):
            base = self.type_of(expr.base)
            if isinstance(base, ast.MappingType):
                return base.value
            if isinstance(base, ast.ArrayType):
                return base.base
            if isinstance(base, ast.ElementaryType) and base.name == "bytes":
                return _el("bytes1")
            return None
        if isinstance(expr, ast.Call):
            callee = expr.callee
            if isinstance(callee, ast.TypeExpr):
                return callee.type
            if isinstance(callee, ast.Identifier):
                c = self.project.contract(callee.name)
                if c is not None and not self.is_variable(callee.name):
                    return ast.UserType(span=_NOSPAN, name=c.name)
                if callee.name in ("keccak256", "sha3", "sha256"):
                    return _el("bytes32")
                if callee.name == "ecrecover":
                    return _el("address")
                fns = self.project.functions_named(self.contract, callee.name)
                if fns and fns[0].returns:
                    return fns[0].returns[0].type
                return None
            if isinstance(callee, ast.MemberAccess) and callee.member in ("add", "sub", "mul", "div", "mod"):
                return self.type_of(callee.expr)
            return None
        if isinstance(expr, ast.BinaryOp):
            if expr.op in ("==", "!=", "<", ">", "<=", ">=", "&&", "||"):
                return _el("bool")
            return self.type_of(expr.left) or self.type_of(expr.right)
        if isinstance(expr, ast.UnaryOp):
            return _el("bool") if expr.op == "!" else self.type_of(expr.operand)
        if isinstance(expr, ast.Assignment):
            return self.type_of(expr.target)
        if isinstance(expr, ast.Conditional):
            return self.type_of(expr.then) or self.type_of(expr.orelse)
        return None


def root_identifier(expr: Optional[ast.Expression]) -> Optional[ast.Identifier]:
    """Base variable of an lvalue chain such as ``a[b].c``."""
    while isinstance(expr, (ast.IndexAccess, ast.MemberAccess)):
        expr = expr.base if isinstance(expr, ast.IndexAccess) else expr.expr
    return expr if isinstance(expr, ast.Identifier) else None


def is_msg_sender(expr: Optional[ast.Expression]) -> bool:
    return (
        isinstance(expr, ast.MemberAccess)
        and expr.member == "sender"
        and isinstance(expr.expr, ast.Identifier)
        and expr.expr.name == "msg"
    )


def is_self_balance(expr: Optional[ast.Expression]) -> bool:
    """``address(this).balance`` or legacy ``this.balance``."""
    if not (isinstance(expr, ast.MemberAccess) and expr.member == "balance"):
        return False
    inner = expr.expr
    if isinstance(inner, ast.Identifier) and inner.name == "this":
        return True
    return (
        isinstance(inner, ast.Call)
        and isinstance(inner.callee, ast.TypeExpr)
        and len(inner.args) == 1
        and isinstance(inner.args[0], ast.Identifier)
        and inner.args[0].name == "this"
    )


def type_name(t: Optional[ast.TypeName]) -> str:
    return normalize(type_text(t)) if t is not None else "?"
