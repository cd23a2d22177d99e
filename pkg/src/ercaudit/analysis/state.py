"""Ordered state reads/writes per CFG block and writes reachable after external calls."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend import ast
from .calls import CallKind, CallSite
from .cfg import Cfg, item_expressions
from .context import Project, TypeEnv, is_self_balance, root_identifier
from .modifiers import EffectiveBody

SELF_BALANCE = "self-balance"

_MUTATING_MEMBERS = frozenset({"push", "pop"})


@dataclass(eq=False)
class Access:
    kind: str  # read | write | call
    var: Optional[str]
    node: ast.Node
    origin: str = "function"
    site: Optional[CallSite] = None
    via: Optional[str] = None  # internal callee that performed the write


@dataclass
class StateAccessSummary:
    per_block: dict[int, list[Access]] = field(default_factory=dict)
    # external call site -> writes that may execute after it
    post_call: list[tuple[CallSite, list[Access]]] = field(default_factory=list)

    def writes_after(self, site: CallSite) -> list[Access]:
        for s, writes in self.post_call:
            if s is site:
                return writes
        return []

    def post_call_vars(self) -> dict[int, set[str]]:
        return {id(s): {a.var for a in w if a.var} for s, w in self.post_call}

    def accesses(self) -> list[Access]:
        return [a for b in sorted(self.per_block) for a in self.per_block[b]]


class _Collector:
    """Evaluation-order walk emitting read/write/call events for one item."""

    def __init__(self, env: TypeEnv, sites: dict[int, CallSite], summaries: dict[str, set[str]],
                 aliases: dict[str, str], origin: str) -> None:
        self.env = env
        self.sites = sites
        self.summaries = summaries
        self.aliases = aliases
        self.origin = origin
        self.out: list[Access] = []

    def state_name(self, ident: Optional[ast.Identifier]) -> Optional[str]:
        if ident is None:
            return None
        if ident.name in self.aliases:
            return self.aliases[ident.name]
        return ident.name if self.env.is_state(ident.name) else None

    def emit(self, kind: str, var: Optional[str], node: ast.Node, **kw) -> None:
        self.out.append(Access(kind, var, node, self.origin, **kw))

    def write_target(self, target: Optional[ast.Expression]) -> None:
        if target is None:
            return
        if isinstance(target, ast.TupleExpr):
            for item in target.items:
                self.write_target(item)
            return
        # index expressions inside the lvalue are reads
        cur = target
        while isinstance(cur, (ast.IndexAccess, ast.MemberAccess)):
            if isinstance(cur, ast.IndexAccess):
                self.expr(cur.index)
                cur = cur.base
            else:
                cur = cur.expr
        name = self.state_name(root_identifier(target))
        if name:
            self.emit("write", name, target)

    def stmt(self, s: ast.Node) -> None:
        if isinstance(s, ast.VarDeclStmt):
            self.expr(s.value)
        elif isinstance(s, ast.ExpressionStmt):
            self.expr(s.expr)
        elif isinstance(s, ast.RequireStmt):
            self.expr(s.call)
        elif isinstance(s, ast.Return):
            self.expr(s.value)
        elif isinstance(s, ast.Revert):
            if s.call is not None:
                self.expr(s.call)
        elif isinstance(s, ast.Emit):
            self.expr(s.call)
        elif isinstance(s, ast.Expression):
            self.expr(s)

    def expr(self, e: Optional[ast.Node]) -> None:
        if e is None:
            return
        if isinstance(e, ast.Assignment):
            self.expr(e.value)
            if e.op != "=":
                self.reads_of(e.target)
            self.write_target(e.target)
            return
        if isinstance(e, ast.UnaryOp) and e.op in ("++", "--", "delete"):
            if e.op != "delete":
                self.reads_of(e.operand)
            self.write_target(e.operand)
            return
        if isinstance(e, ast.Call):
            callee = e.callee
            for opt in getattr(callee, "values", []) or []:
                self.expr(opt)
            inner = callee.expr if isinstance(callee, ast.CallOptions) else callee
            if isinstance(inner, ast.MemberAccess):
                self.expr(inner.expr)
            for a in e.args:
                self.expr(a)
            site = self.sites.get(id(e))
            if site is not None:
                if site.kind is CallKind.INTERNAL_CALL and isinstance(inner, ast.Identifier):
                    for var in sorted(self.summaries.get(inner.name, ())):
                        self.emit("write", var, e, via=inner.name)
                if isinstance(inner, ast.MemberAccess) and inner.member in _MUTATING_MEMBERS:
                    name = self.state_name(root_identifier(inner.expr))
                    if name:
                        self.emit("write", name, e)
                if site.kind is CallKind.LIBRARY_CALL and isinstance(inner, ast.MemberAccess):
                    # `x.add(y)` returns a value; the receiver is only read
                    pass
                self.emit("call", None, e, site=site)
            return
        if is_self_balance(e):
            self.emit("read", SELF_BALANCE, e)
            return
        if isinstance(e, ast.Identifier):
            name = self.state_name(e)
            if name:
                self.emit("read", name, e)
            return
        for child in e.children():
            self.expr(child)

    def reads_of(self, target: ast.Expression) -> None:
        name = self.state_name(root_identifier(target))
        if name:
            self.emit("read", name, target)


def _storage_aliases(body: EffectiveBody, env: TypeEnv) -> dict[str, str]:
    aliases: dict[str, str] = {}
    for node in body.walk():
        if isinstance(node, ast.VarDeclStmt) and len(node.decls) == 1 and node.decls[0] is not None:
            d = node.decls[0]
            if d.location == "storage" and node.value is not None:
                root = root_identifier(node.value)
                if root is not None and env.is_state(root.name):
                    aliases[d.name] = root.name
    return aliases


def write_summaries(project: Project, contract: ast.ContractDef) -> dict[str, set[str]]:
    """State variables each internal function may write, callees included."""
    direct: dict[str, set[str]] = {}
    callees: dict[str, set[str]] = {}
    for _, fn in project.functions(contract):
        if fn.body is None or fn.kind != "function":
            continue
        env = TypeEnv(project, contract, fn)
        writes: set[str] = direct.setdefault(fn.name, set())
        calls: set[str] = callees.setdefault(fn.name, set())
        aliases = _storage_aliases(EffectiveBody(fn, contract, fn.body.statements), env)
        col = _Collector(env, {}, {}, aliases, "function")
        for stmt in fn.body.statements:
            for node in stmt.walk():
                if isinstance(node, ast.Statement) and not isinstance(node, (ast.Block, ast.If, ast.For, ast.While)):
                    col.stmt(node) if not isinstance(node, ast.VarDeclStmt) else col.expr(node.value)
                if isinstance(node, ast.For) and node.post is not None:
                    col.expr(node.post)
                if isinstance(node, ast.Call) and isinstance(node.callee, ast.Identifier):
                    calls.add(node.callee.name)
                if isinstance(node, ast.Call) and isinstance(node.callee, ast.MemberAccess):
                    m = node.callee
                    if m.member in _MUTATING_MEMBERS:
                        name = col.state_name(root_identifier(m.expr))
                        if name:
                            writes.add(name)
        writes.update(a.var for a in col.out if a.kind == "write" and a.var)
    # transitive closure
    result: dict[str, set[str]] = {}
    for name in direct:
        seen = {name}
        stack = [name]
        acc: set[str] = set()
        while stack:
            n = stack.pop()
            acc |= direct.get(n, set())
            for c in callees.get(n, ()):
                if c in direct and c not in seen:
                    seen.add(c)
                    stack.append(c)
        result[name] = acc
    return result


def state_access(cfg: Cfg, body: EffectiveBody, sites: list[CallSite], project: Optional[Project] = None,
                 env: Optional[TypeEnv] = None, summaries: Optional[dict[str, set[str]]] = None) -> StateAccessSummary:
    project = project or Project([])
    contract = body.contract
    env = env or TypeEnv(project, contract, body.function)
    if summaries is None:
        summaries = write_summaries(project, contract)
    by_node = {id(s.node): s for s in sites}
    aliases = _storage_aliases(body, env)
    summary = StateAccessSummary()
    for block in cfg.blocks:
        events: list[Access] = []
        for item in block.items:
            col = _Collector(env, by_node, summaries, aliases, body.origin(item))
            for part in item_expressions(item):
                col.stmt(part)
            events.extend(col.out)
        summary.per_block[block.id] = events
    for block in cfg.blocks:
        events = summary.per_block[block.id]
        later_blocks: set[int] = set()
        for s in cfg.successors(block.id):
            later_blocks |= cfg.reachable(s)
        for k, ev in enumerate(events):
            if ev.kind != "call" or ev.site is None or not ev.site.is_external:
                continue
            writes = [a for a in events[k + 1:] if a.kind == "write"]
            for b in sorted(later_blocks):
                if b == block.id:
                    writes.extend(a for a in events[: k + 1] if a.kind == "write")
                    continue
                writes.extend(a for a in summary.per_block[b] if a.kind == "write")
            summary.post_call.append((ev.site, writes))
    return summary
