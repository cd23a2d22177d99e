"""Classification of every call expression in an effective body."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..frontend import ast
from ..frontend.types import is_address, type_text
from .context import BUILTIN_FUNCTIONS, GLOBAL_OBJECTS, Project, TypeEnv
from .modifiers import EffectiveBody


class CallKind(Enum):
    LOW_LEVEL_CALL = "low-level-call"
    CALL_WITH_VALUE = "call-with-value"
    SEND = "send"
    ETHER_TRANSFER = "ether-transfer"
    DELEGATECALL = "delegatecall"
    SELFDESTRUCT = "selfdestruct"
    EXTERNAL_MEMBER_CALL = "external-member-call"
    INTERNAL_CALL = "internal-call"
    LIBRARY_CALL = "library-call"
    EVENT_EMIT = "event-emit"
    # casts, require, hashing, abi.*, array push/pop, contract creation
    BUILTIN = "builtin"


EXTERNAL_KINDS = frozenset(
    {CallKind.LOW_LEVEL_CALL, CallKind.CALL_WITH_VALUE, CallKind.SEND, CallKind.ETHER_TRANSFER,
     CallKind.EXTERNAL_MEMBER_CALL, CallKind.DELEGATECALL}
)
ETHER_SENDING = frozenset({CallKind.CALL_WITH_VALUE, CallKind.SEND, CallKind.ETHER_TRANSFER})

_BUILTIN_MEMBERS = frozenset({"push", "pop", "concat", "selector", "decode", "encode", "encodePacked",
                              "encodeWithSelector", "encodeWithSignature", "encodeCall"})


@dataclass(eq=False)
class CallSite:
    node: ast.Call
    kind: CallKind
    target: str
    value_forwarded: bool = False
    gas_literal: Optional[int] = None
    return_used: bool = False
    receiver: Optional[ast.Expression] = None
    member: Optional[str] = None
    in_loop: bool = False
    origin: str = "function"
    statement: Optional[ast.Statement] = None

    @property
    def span(self) -> ast.Span:
        return self.node.span

    @property
    def is_external(self) -> bool:
        return self.kind in EXTERNAL_KINDS

    @property
    def sends_ether(self) -> bool:
        return self.kind in ETHER_SENDING


def parent_map(roots: list[ast.Statement]) -> dict[int, ast.Node]:
    parents: dict[int, ast.Node] = {}
    stack: list[ast.Node] = list(roots)
    while stack:
        node = stack.pop()
        for child in node.children():
            parents[id(child)] = node
            stack.append(child)
    return parents


def _unwrap_options(callee: ast.Expression) -> tuple[ast.Expression, Optional[ast.CallOptions]]:
    if isinstance(callee, ast.CallOptions):
        return callee.expr, callee
    return callee, None


def _int_literal(expr: Optional[ast.Expression]) -> Optional[int]:
    if isinstance(expr, ast.Literal) and isinstance(expr.value, int) and not isinstance(expr.value, bool):
        return expr.value
    return None


class CallClassifier:
    def __init__(self, project: Project, contract: ast.ContractDef, env: TypeEnv) -> None:
        self.project = project
        self.contract = contract
        self.env = env
        self.events = set(project.events(contract))
        self.functions = {fn.name for _, fn in project.functions(contract)}
        self.structs = set(project.structs(contract))
        self.enums = {e.name for c in project.linearize(contract) for e in c.enums}
        self.using = project.using_for(contract)

    def kind(self, call: ast.Call, emitted: bool = False) -> tuple[CallKind, Optional[ast.CallOptions]]:
        if emitted:
            return CallKind.EVENT_EMIT, None
        base, opts = _unwrap_options(call.callee)
        if isinstance(base, ast.Identifier):
            name = base.name
            if self.env.is_variable(name):
                return CallKind.INTERNAL_CALL, opts  # function-typed variable
            if name in ("selfdestruct", "suicide"):
                return CallKind.SELFDESTRUCT, opts
            if name in self.functions:
                return CallKind.INTERNAL_CALL, opts
            if name in self.events:
                return CallKind.EVENT_EMIT, opts
            if name in BUILTIN_FUNCTIONS or name in self.structs or name in self.enums:
                return CallKind.BUILTIN, opts
            if self.project.contract(name) is not None:
                return CallKind.BUILTIN, opts  # conversion to a contract type
            if name[:1].isupper():
                return CallKind.BUILTIN, opts  # unresolved type conversion or struct
            return CallKind.INTERNAL_CALL, opts
        if isinstance(base, (ast.TypeExpr, ast.NewExpr)):
            return CallKind.BUILTIN, opts
        if isinstance(base, ast.MemberAccess):
            return self._member_kind(call, base, opts), opts
        return CallKind.INTERNAL_CALL, opts

    def _member_kind(self, call: ast.Call, callee: ast.MemberAccess, opts: Optional[ast.CallOptions]) -> CallKind:
        m = callee.member
        recv = callee.expr
        if m == "call":
            if opts is not None and opts.option("value") is not None:
                return CallKind.CALL_WITH_VALUE
            return CallKind.LOW_LEVEL_CALL
        if m in ("delegatecall", "callcode"):
            return CallKind.DELEGATECALL
        if m == "staticcall":
            return CallKind.LOW_LEVEL_CALL
        if isinstance(recv, ast.Identifier) and not self.env.is_variable(recv.name):
            name = recv.name
            if name in ("abi", "msg", "block", "tx", "string", "bytes"):
                return CallKind.BUILTIN
            if name == "super":
                return CallKind.INTERNAL_CALL
            if name == "this":
                return CallKind.EXTERNAL_MEMBER_CALL
            c = self.project.contract(name)
            if c is not None:
                if c.kind == "library":
                    return CallKind.LIBRARY_CALL
                if c in self.project.linearize(self.contract):
                    return CallKind.INTERNAL_CALL
                return CallKind.BUILTIN
            if name not in GLOBAL_OBJECTS and name[:1].isupper():
                # unresolved type name used as a receiver: a library reference
                return CallKind.LIBRARY_CALL
        if m == "send":
            return CallKind.SEND
        if m == "transfer" and len(call.args) == 1:
            t = self.env.type_of(recv)
            if t is None or is_address(t):
                return CallKind.ETHER_TRANSFER
            return CallKind.EXTERNAL_MEMBER_CALL
        if self._using_for_applies(recv, m):
            return CallKind.LIBRARY_CALL
        if m in _BUILTIN_MEMBERS:
            return CallKind.BUILTIN
        return CallKind.EXTERNAL_MEMBER_CALL

    def _using_for_applies(self, recv: ast.Expression, member: str) -> bool:
        if not self.using:
            return False
        rtype = self.env.type_of(recv)
        for uf in self.using:
            lib = self.project.contract(uf.library)
            if lib is not None and not any(fn.name == member for fn in lib.functions):
                continue
            if uf.target is None:
                return True
            if rtype is None:
                # untyped receiver: accept when the library is resolved and has the member
                if lib is not None:
                    return True
                continue
            if type_text(uf.target) == type_text(rtype):
                return True
        return False


def _return_used(call: ast.Call, parents: dict[int, ast.Node], body: EffectiveBody) -> bool:
    parent = parents.get(id(call))
    child: ast.Node = call
    # a parenthesized/tuple wrapper around a call is transparent
    while isinstance(parent, ast.TupleExpr) and len(parent.items) == 1:
        child, parent = parent, parents.get(id(parent))
    if parent is None or isinstance(parent, (ast.ExpressionStmt, ast.Emit)):
        return False
    names: list[str] = []
    if isinstance(parent, ast.VarDeclStmt) and parent.value is child:
        names = [d.name for d in parent.decls if d is not None]
        if not names:
            return False
    elif isinstance(parent, ast.Assignment) and parent.value is child and isinstance(
        parents.get(id(parent)), ast.ExpressionStmt
    ):
        targets = parent.target.items if isinstance(parent.target, ast.TupleExpr) else [parent.target]
        for t in targets:
            if isinstance(t, ast.Identifier):
                names.append(t.name)
            elif t is not None:
                return True  # stored into state or a structure
        if not names:
            return False
    else:
        return True
    declared = {id(d) for d in (parent.decls if isinstance(parent, ast.VarDeclStmt) else []) if d is not None}
    lhs = {id(n) for n in parent.target.walk()} if isinstance(parent, ast.Assignment) else set()
    for node in body.walk():
        if isinstance(node, ast.Identifier) and node.name in names and id(node) not in lhs and id(node) not in declared:
            if node.span.start > call.span.end or node.span.start < parent.span.start:
                return True
    return False


def classify_calls(body: EffectiveBody, contract: ast.ContractDef, project: Optional[Project] = None,
                   env: Optional[TypeEnv] = None) -> list[CallSite]:
    project = project or Project([])
    env = env or TypeEnv(project, contract, body.function)
    clf = CallClassifier(project, contract, env)
    parents = parent_map(body.statements)
    emitted = set()
    for node in body.walk():
        if isinstance(node, ast.Emit):
            emitted.add(id(node.call))
    sites: list[CallSite] = []
    for stmt_root in body.statements:
        for node in stmt_root.walk():
            if not isinstance(node, ast.Call):
                continue
            kind, opts = clf.kind(node, id(node) in emitted)
            base, _ = _unwrap_options(node.callee)
            receiver = base.expr if isinstance(base, ast.MemberAccess) else None
            member = base.member if isinstance(base, ast.MemberAccess) else None
            value_fwd = kind in ETHER_SENDING or (opts is not None and opts.option("value") is not None)
            gas = _int_literal(opts.option("gas")) if opts is not None else None
            if kind is CallKind.ETHER_TRANSFER or kind is CallKind.SEND:
                target_expr: Optional[ast.Node] = receiver
            else:
                target_expr = receiver if receiver is not None else base
            stmt, in_loop = _enclosing(node, parents)
            sites.append(
                CallSite(
                    node=node,
                    kind=kind,
                    target=target_expr.span.text if target_expr is not None else "",
                    value_forwarded=value_fwd,
                    gas_literal=gas,
                    return_used=_return_used(node, parents, body),
                    receiver=receiver,
                    member=member,
                    in_loop=in_loop,
                    origin=body.origin(stmt) if stmt is not None else "function",
                    statement=stmt,
                )
            )
    return sites


def _enclosing(node: ast.Node, parents: dict[int, ast.Node]) -> tuple[Optional[ast.Statement], bool]:
    stmt: Optional[ast.Statement] = None
    in_loop = False
    cur: Optional[ast.Node] = node
    prev: Optional[ast.Node] = None
    while cur is not None:
        if stmt is None and isinstance(cur, ast.Statement):
            stmt = cur
        if isinstance(cur, (ast.For, ast.While)) and prev is not None and prev is not getattr(cur, "init", None):
            in_loop = True
        prev, cur = cur, parents.get(id(cur))
    return stmt, in_loop
