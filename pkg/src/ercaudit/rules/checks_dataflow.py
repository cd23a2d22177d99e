"""Checks that consume call sites, state-access summaries and guard facts."""

from __future__ import annotations

import re
from typing import Iterator, Optional

from ..analysis import CallKind, ContractAnalysis, FunctionAnalysis, TypeEnv, analyze_contract
from ..analysis.calls import parent_map
from ..analysis.context import is_msg_sender, is_self_balance, root_identifier
from ..frontend import ast
from ..frontend.types import is_integer, type_text
from .engine import Ctx, check
from .util import (
    COMPARISONS,
    canon,
    flatten,
    flatten_function,
    index_chain,
    is_entry,
    is_mutating,
    mapping_depth,
    state_writes,
    strip_casts,
)

_SECRET = re.compile(r"secret|password|key|private.*data", re.IGNORECASE)
_SAFE_FN = {"+": "add", "-": "sub", "*": "mul"}


def _roots(ctx: Ctx, ca: ContractAnalysis) -> Iterator[tuple[Optional[ast.FunctionDef], TypeEnv, ast.Block]]:
    """Each function and modifier body of the contract with its type environment."""
    for fa in ca.functions:
        if fa.function.body is not None:
            yield fa.function, fa.env, fa.function.body
    for mod in ca.contract.modifiers:
        if mod.body is not None:
            env = TypeEnv(ctx.project, ca.contract, extra=mod.params)
            env.add_locals(mod.body)
            yield None, env, mod.body


def _fname(fn: Optional[ast.FunctionDef]) -> Optional[str]:
    return None if fn is None else (fn.name or fn.kind)


def _const_valued(expr: Optional[ast.Expression], env: TypeEnv) -> bool:
    """Literals, constant state variables and casts or arithmetic over them."""
    if expr is None:
        return False
    if isinstance(expr, ast.Literal):
        return True
    if isinstance(expr, ast.Identifier):
        var = env.state.get(expr.name)
        return not env.is_local(expr.name) and var is not None and var.mutability == "constant"
    if isinstance(expr, ast.Call) and isinstance(expr.callee, ast.TypeExpr):
        return all(_const_valued(a, env) for a in expr.args)
    if isinstance(expr, ast.BinaryOp):
        return _const_valued(expr.left, env) and _const_valued(expr.right, env)
    if isinstance(expr, ast.UnaryOp):
        return expr.op in ("-", "!", "~", "+") and _const_valued(expr.operand, env)
    if isinstance(expr, ast.TupleExpr) and len(expr.items) == 1:
        return _const_valued(expr.items[0], env)
    return False


def _guard_conditions(body: ast.Node, with_if: bool = True) -> list[ast.Expression]:
    out = []
    for node in body.walk():
        if isinstance(node, ast.RequireStmt) or (with_if and isinstance(node, ast.If)):
            out.append(node.cond)
    return out


def _canons(expr: ast.Node, exclude: Optional[ast.Span] = None) -> set[str]:
    return {
        canon(n)
        for n in expr.walk()
        if isinstance(n, ast.Expression) and (exclude is None or not exclude.contains(n.span))
    }


def _safe_math_applies(ctx: Ctx, contract: ast.ContractDef, op: str, t: Optional[ast.TypeName]) -> bool:
    for u in ctx.project.using_for(contract):
        if u.target is not None and t is not None and type_text(u.target) != type_text(t):
            continue
        lib = ctx.project.contract(u.library)
        if lib is None or lib.function(_SAFE_FN[op]) is not None:
            return True
    return False


@check(2)
def integer_overflow(ctx: Ctx) -> None:
    low = ctx.bundle.min_version
    if low is not None and low >= (0, 8, 0):
        return
    for ca in ctx.bundle.contracts:
        c = ca.contract
        for fn, env, body in _roots(ctx, ca):
            parents = parent_map([body])
            requires = [n for n in body.walk() if isinstance(n, ast.RequireStmt)]
            guards = _guard_conditions(body)
            for node in body.walk():
                if isinstance(node, ast.BinaryOp) and node.op in _SAFE_FN:
                    op, left, right = node.op, node.left, node.right
                elif isinstance(node, ast.Assignment) and node.op in ("+=", "-=", "*="):
                    op, left, right = node.op[0], node.target, node.value
                else:
                    continue
                lt, rt = env.type_of(left), env.type_of(right)
                if (lt is not None and not is_integer(lt)) or (rt is not None and not is_integer(rt)):
                    continue
                if _const_valued(left, env) and _const_valued(right, env):
                    continue
                if c.kind != "library" and _safe_math_applies(ctx, c, op, lt or rt):
                    continue
                lc, rc = canon(left), canon(right)
                if any(r.cond.span.contains(node.span) and {lc, rc} & _canons(r.cond, node.span) for r in requires):
                    continue
                if op in ("+", "*"):
                    result = _result_name(node, parents)
                    if result and any(result in _canons(r.cond) for r in requires):
                        continue
                if op == "-" and any(_compares(g, lc, rc) for g in guards):
                    continue
                ctx.emit(2, node, f"unchecked arithmetic '{canon(node)}' may overflow or underflow",
                         c.name, _fname(fn), op=op)


def _result_name(node: ast.Expression, parents: dict[int, ast.Node]) -> Optional[str]:
    if isinstance(node, ast.Assignment):
        return canon(node.target)
    parent = parents.get(id(node))
    if isinstance(parent, ast.VarDeclStmt) and parent.value is node and len(parent.decls) == 1 and parent.decls[0]:
        return parent.decls[0].name
    if isinstance(parent, ast.Assignment) and parent.value is node and parent.op == "=":
        return canon(parent.target)
    return None


def _compares(cond: ast.Expression, a: str, b: str) -> bool:
    for n in cond.walk():
        if isinstance(n, ast.BinaryOp) and n.op in COMPARISONS:
            if {canon(strip_casts(n.left)), canon(strip_casts(n.right))} == {a, b}:
                return True
    return False


@check(5, 53)
def unchecked_calls(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            for site in fa.calls:
                if site.return_used:
                    continue
                if site.kind in (CallKind.LOW_LEVEL_CALL, CallKind.CALL_WITH_VALUE):
                    ctx.emit(5, site.node, "return value of low-level call is not checked",
                             ca.contract.name, _fname(fa.function), kind=site.kind.value)
                elif site.kind is CallKind.SEND:
                    ctx.emit(53, site.node, "return value of send() is not checked",
                             ca.contract.name, _fname(fa.function))


def _writes_sender_slot(fa: FunctionAnalysis) -> bool:
    """Whether the function writes a state mapping entry keyed by msg.sender."""
    for node in fa.body.walk():
        targets: list[ast.Expression] = []
        if isinstance(node, ast.Assignment):
            targets = [t for t in (node.target.items if isinstance(node.target, ast.TupleExpr) else [node.target]) if t]
        elif isinstance(node, ast.UnaryOp) and node.op in ("++", "--", "delete"):
            targets = [node.operand]
        for t in targets:
            name, idx = index_chain(t)
            if name and fa.env.is_state(name) and any(is_msg_sender(i) for i in idx):
                return True
    return False


@check(6, 7)
def unprotected_value_paths(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            fn = fa.function
            if not is_entry(fn) or fa.guards.authorized:
                continue
            for site in fa.calls:
                if site.kind is CallKind.SELFDESTRUCT:
                    ctx.emit(7, site.node, "selfdestruct reachable without authorization", ca.contract.name, _fname(fn))
                elif site.sends_ether:
                    if is_msg_sender(strip_casts(site.receiver)) and _writes_sender_slot(fa):
                        continue  # caller withdraws its own recorded funds
                    ctx.emit(6, site.node, "ether sent from a function without authorization",
                             ca.contract.name, _fname(fn), kind=site.kind.value)


@check(8)
def reentrancy(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        if ca.contract.kind == "library":
            continue
        mutex = ca.guards.mutex_vars
        for fa in ca.functions:
            if fa.guards.mutex_protected:
                continue
            for site in fa.calls:
                if not site.is_external:
                    continue
                late = sorted({
                    a.var for a in fa.access.writes_after(site)
                    if a.var and a.var not in mutex and a.origin == "function"
                })
                if late:
                    ctx.emit(8, site.node, f"state written after external call: {', '.join(late)}",
                             ca.contract.name, _fname(fa.function), writes=",".join(late), kind=site.kind.value)


@check(10)
def uninitialized_storage(ctx: Ctx) -> None:
    low = ctx.bundle.min_version
    if low is not None and low >= (0, 5, 0):
        return
    for ca in ctx.bundle.contracts:
        structs = ctx.project.structs(ca.contract)
        for fn, _, body in _roots(ctx, ca):
            for node in body.walk():
                if not isinstance(node, ast.VarDeclStmt) or node.value is not None:
                    continue
                for d in node.decls:
                    if d is None or d.location == "memory":
                        continue
                    complex_type = isinstance(d.type, (ast.ArrayType, ast.MappingType)) or (
                        isinstance(d.type, ast.UserType) and d.type.name in structs
                    )
                    if d.location == "storage" or complex_type:
                        ctx.emit(10, d, f"uninitialized storage pointer '{d.name}'", ca.contract.name, _fname(fn))


@check(11)
def assert_on_inputs(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn in ca.contract.functions:
            if fn.body is None:
                continue
            params = {p.name for p in fn.params if p.name}
            for node in fn.body.walk():
                if isinstance(node, ast.RequireStmt) and node.kind == "assert":
                    used = sorted({n.name for n in node.cond.walk() if isinstance(n, ast.Identifier)} & params)
                    if used:
                        ctx.emit(11, node, f"assert() validates input '{used[0]}'; use require()",
                                 ca.contract.name, _fname(fn))


@check(13)
def untrusted_delegatecall(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            for site in fa.calls:
                if site.kind is not CallKind.DELEGATECALL:
                    continue
                recv = strip_casts(site.receiver)
                if isinstance(recv, ast.Identifier):
                    var = fa.env.state.get(recv.name)
                    if not fa.env.is_local(recv.name) and var is not None and var.mutability == "constant":
                        continue
                    if ctx.project.is_library(recv.name):
                        continue
                ctx.emit(13, site.node, "delegatecall to a callee that is not a constant or library",
                         ca.contract.name, _fname(fa.function))


@check(14)
def dos_failed_call(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            sends = [s for s in fa.calls if s.sends_ether]
            looped = [s for s in sends if s.in_loop]
            if looped:
                ctx.emit(14, looped[0].node, "ether sent inside a loop", ca.contract.name, _fname(fa.function))
            elif len(sends) >= 2:
                ctx.emit(14, sends[1].node, f"{len(sends)} ether transfers in one function",
                         ca.contract.name, _fname(fa.function))


def _zero_first(approve: ast.FunctionDef, allowance_vars: set[str]) -> bool:
    value = approve.params[-1].name if approve.params else None
    for cond in _guard_conditions(approve.body):
        for n in cond.walk():
            if not (isinstance(n, ast.BinaryOp) and n.op == "=="):
                continue
            for a, b in ((n.left, n.right), (n.right, n.left)):
                if isinstance(b, ast.Literal) and b.value == 0:
                    names = {x.name for x in a.walk() if isinstance(x, ast.Identifier)}
                    if value in names or names & allowance_vars:
                        return True
    return False


@check(15)
def approve_race(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        if not ctx.bundle.is_token(c):
            continue
        fa = next((f for f in ca.functions if f.function.name == "approve" and f.function.body), None)
        if fa is None:
            continue
        state = ctx.project.state_vars(c)
        flat = flatten(fa, ctx.project)
        nested = {var for _, var, _, _ in state_writes(flat, ctx.project, c) if mapping_depth(state[var].type) >= 2}
        if not nested or _zero_first(fa.function, nested):
            continue
        approve_reads = {n.name for n in fa.body.walk() if isinstance(n, ast.Identifier)}
        tracked = False
        for tf in ctx.project.functions_named(c, "transferFrom"):
            if tf.body is None:
                continue
            for _, var, _, _ in state_writes(flatten_function(tf, c, ctx.project), ctx.project, c):
                if var not in nested and mapping_depth(state[var].type) >= 2 and var in approve_reads:
                    tracked = True
        if not tracked:
            ctx.emit(15, fa.function, "approve() overwrites an allowance without front-running mitigation",
                     c.name, "approve")


def _ecrecover_calls(body: ast.Node) -> list[ast.Call]:
    return [
        n for n in body.walk()
        if isinstance(n, ast.Call) and isinstance(n.callee, ast.Identifier) and n.callee.name == "ecrecover"
        and len(n.args) == 4
    ]


@check(18, 22, 23)
def signatures(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            fn = fa.function
            if fn.body is None:
                continue
            calls = _ecrecover_calls(fn.body)
            if not calls:
                continue
            comparisons = [
                n for n in fn.body.walk() if isinstance(n, ast.BinaryOp) and n.op in COMPARISONS
            ]
            recorded: set[str] = set()
            for node in fn.body.walk():
                if isinstance(node, ast.Assignment):
                    name, idx = index_chain(node.target)
                    if name and fa.env.is_state(name):
                        recorded.update(canon(i) for i in idx)
            params = {p.name for p in fn.params if p.name}
            for call in calls:
                s = canon(strip_casts(call.args[3]))
                if not any(s in (canon(strip_casts(n.left)), canon(strip_casts(n.right))) for n in comparisons):
                    ctx.emit(18, call, "ecrecover() without an upper bound on the s value",
                             ca.contract.name, _fname(fn))
                h = call.args[0]
                if canon(h) not in recorded:
                    ctx.emit(22, call, "signed message hash is not recorded, allowing replay",
                             ca.contract.name, _fname(fn))
                if isinstance(h, ast.Identifier) and h.name in params:
                    ctx.emit(23, call, f"signature checked over caller-supplied hash '{h.name}'",
                             ca.contract.name, _fname(fn))


@check(20)
def shadowing(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        lineage = ctx.project.linearize(c)
        for v in c.state_vars:
            for base in lineage[1:]:
                if base.state_var(v.name) is not None:
                    ctx.emit(20, v, f"state variable '{v.name}' redeclares one inherited from {base.name}", c.name)
                    break
        visible = {
            name for name, var in ctx.project.state_vars(c).items()
            if var.visibility != "private" or ctx.project.owner_of_var(c, name) is c
        }
        scopes: list[tuple[Optional[str], list[ast.Node]]] = []
        for fn in c.functions:
            decls: list[ast.Node] = [p for p in fn.params + fn.returns if p.name]
            if fn.body is not None:
                decls += [n for n in fn.body.walk() if isinstance(n, ast.VarDecl)]
            scopes.append((_fname(fn), decls))
        for mod in c.modifiers:
            decls = [p for p in mod.params if p.name]
            if mod.body is not None:
                decls += [n for n in mod.body.walk() if isinstance(n, ast.VarDecl)]
            scopes.append((None, decls))
        for fname, decls in scopes:
            for d in decls:
                if d.name in visible:
                    ctx.emit(20, d, f"'{d.name}' shadows a state variable", c.name, fname)


@check(24)
def constant_requirement(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn, env, body in _roots(ctx, ca):
            for node in body.walk():
                if isinstance(node, ast.RequireStmt) and node.kind == "require" and _const_valued(node.cond, env):
                    ctx.emit(24, node, "require() condition depends only on constants",
                             ca.contract.name, _fname(fn))


@check(25)
def arbitrary_storage_write(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            fn = fa.function
            if fn.body is None:
                continue
            params = {p.name for p in fn.params if p.name}
            guards = [n for n in fn.body.walk() if isinstance(n, (ast.RequireStmt, ast.If))]
            for node in fn.body.walk():
                if not (isinstance(node, ast.Assignment) and isinstance(node.target, ast.IndexAccess)):
                    continue
                base = node.target.base
                if not isinstance(base, ast.Identifier) or not fa.env.is_state(base.name):
                    continue
                t = fa.env.state[base.name].type
                if not (isinstance(t, ast.ArrayType) and t.length is None):
                    continue
                index = node.target.index
                used = {n.name for n in index.walk() if isinstance(n, ast.Identifier)} if index else set()
                if not used & params:
                    continue
                ic = canon(index)
                guarded = any(
                    g.span.start < node.span.start
                    and ic in _canons(g.cond)
                    and any(isinstance(n, ast.MemberAccess) and n.member == "length" for n in g.cond.walk())
                    for g in guards
                )
                if not guarded:
                    ctx.emit(25, node, f"write to '{base.name}' at a caller-chosen index without a length check",
                             ca.contract.name, _fname(fn))


@check(26)
def inheritance_order(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        if len(c.bases) < 2:
            continue
        own = {fn.signature for fn in c.functions}
        seen: dict[str, tuple[int, str]] = {}
        reported: set[str] = set()
        for spec in c.bases:
            base = ctx.project.contract(spec.name)
            if base is None:
                continue
            for owner, fn in ctx.project.functions(base):
                if fn.kind != "function" or fn.body is None:
                    continue
                sig = fn.signature
                prev = seen.get(sig)
                if prev is None:
                    seen[sig] = (id(fn), spec.name)
                elif prev[0] != id(fn) and sig not in own and sig not in reported:
                    reported.add(sig)
                    ctx.emit(26, c, f"'{sig}' is inherited from both {prev[1]} and {spec.name}", c.name)


def _gas_option(call: ast.Call) -> bool:
    callee = call.callee
    while isinstance(callee, ast.CallOptions):
        if callee.option("gas") is not None:
            return True
        callee = callee.expr
    return False


@check(27)
def gas_griefing(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            fn = fa.function
            bytes_params = {
                p.name for p in fn.params
                if p.name and isinstance(p.type, ast.ElementaryType) and p.type.name == "bytes"
            }
            gas_checked = any(
                isinstance(n, ast.Call) and isinstance(n.callee, ast.Identifier) and n.callee.name == "gasleft"
                for cond in _guard_conditions(fa.function.body or ast.Block(span=fn.span, statements=[]), False)
                for n in cond.walk()
            )
            for site in fa.calls:
                if site.kind not in (CallKind.LOW_LEVEL_CALL, CallKind.CALL_WITH_VALUE):
                    continue
                forwarded = any(
                    (isinstance(n, ast.Identifier) and n.name in bytes_params)
                    or (isinstance(n, ast.MemberAccess) and n.member == "data"
                        and isinstance(n.expr, ast.Identifier) and n.expr.name == "msg")
                    for a in site.node.args for n in a.walk()
                )
                if forwarded and not _gas_option(site.node) and not gas_checked:
                    ctx.emit(27, site.node, "call relays caller-supplied data without gas checks",
                             ca.contract.name, _fname(fn))


@check(29)
def unbounded_loops(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            fn = fa.function
            if fn.body is None or not is_mutating(fn):
                continue
            if not any(a.kind == "write" for a in fa.access.accesses()):
                continue
            params = {p.name for p in fn.params if p.name}
            for node in fn.body.walk():
                if not isinstance(node, (ast.For, ast.While)) or node.cond is None:
                    continue
                hit = False
                for n in node.cond.walk():
                    if isinstance(n, ast.MemberAccess) and n.member == "length":
                        r = root_identifier(n.expr)
                        hit = hit or (r is not None and (fa.env.is_state(r.name) or r.name in params))
                    elif isinstance(n, ast.Identifier) and n.name in params:
                        hit = True
                if hit:
                    ctx.emit(29, node, "loop bound grows with storage or caller input", ca.contract.name, _fname(fn))


@check(33)
def strict_balance_equality(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn, _, body in _roots(ctx, ca):
            for node in body.walk():
                if isinstance(node, ast.BinaryOp) and node.op in ("==", "!=") and (
                    is_self_balance(node.left) or is_self_balance(node.right)
                ):
                    ctx.emit(33, node, "strict equality on the contract's ether balance",
                             ca.contract.name, _fname(fn))


def _has_effect(expr: ast.Expression) -> bool:
    for n in expr.walk():
        if isinstance(n, (ast.Assignment, ast.Call, ast.NewExpr)):
            return True
        if isinstance(n, ast.UnaryOp) and n.op in ("++", "--", "delete"):
            return True
    return False


@check(36)
def no_effect_code(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn, _, body in _roots(ctx, ca):
            for node in body.walk():
                if isinstance(node, ast.ExpressionStmt) and not _has_effect(node.expr):
                    ctx.emit(36, node, f"statement '{canon(node.expr)}' has no effect", ca.contract.name, _fname(fn))


@check(37)
def private_data(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for v in ca.contract.state_vars:
            if v.visibility == "private" and _SECRET.search(v.name):
                ctx.emit(37, v, f"private variable '{v.name}' is still readable on-chain", ca.contract.name)


def _lineage_analyses(ctx: Ctx, c: ast.ContractDef) -> list[ContractAnalysis]:
    local = {id(ca.contract): ca for ca in ctx.bundle.contracts}
    return [local.get(id(b)) or analyze_contract(b, ctx.project) for b in ctx.project.linearize(c)]


def _reads_msg_value(fn: ast.FunctionDef) -> bool:
    return fn.body is not None and any(
        isinstance(n, ast.MemberAccess) and n.member == "value"
        and isinstance(n.expr, ast.Identifier) and n.expr.name == "msg"
        for n in fn.body.walk()
    )


@check(71, 73)
def ether_handling(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        if c.kind != "contract":
            continue
        lineage = _lineage_analyses(ctx, c)
        fns = [fa.function for la in lineage for fa in la.functions]
        payable = [fn for fn in fns if not fn.is_constructor and fn.mutability == "payable"]
        sends = any(
            site.sends_ether or site.kind is CallKind.SELFDESTRUCT
            for la in lineage for fa in la.functions for site in fa.calls
        )
        if payable and not sends:
            ctx.emit(71, c, f"{c.name} accepts ether but has no way to send it out", c.name)
        value_handling = payable or any(_reads_msg_value(fn) for fn in fns)
        has_default = any(fn.kind in ("fallback", "receive") for fn in fns)
        if value_handling and not has_default:
            ctx.emit(73, c, f"{c.name} handles ether but declares no fallback or receive function", c.name)


def _statement_count(stmt: ast.Statement) -> int:
    return sum(1 for n in stmt.walk() if isinstance(n, ast.Statement) and not isinstance(n, ast.Block))


@check(77)
def complex_fallback(ctx: Ctx) -> None:
    limit = ctx.config.fallback_statements
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            fn = fa.function
            if fn.kind not in ("fallback", "receive") or fn.body is None:
                continue
            count = _statement_count(fn.body)
            external = [s for s in fa.calls if s.is_external]
            if count > limit:
                ctx.emit(77, fn, f"{fn.kind} function has {count} statements", ca.contract.name, fn.kind)
            elif external:
                ctx.emit(77, fn, f"{fn.kind} function makes an external call", ca.contract.name, fn.kind)
