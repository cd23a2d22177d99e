"""ERC-20 behaviour and interface checks over the token's own method bodies."""

from __future__ import annotations

from typing import Optional

from ..frontend import ast
from ..frontend.types import type_text
from .engine import Ctx, check
from .util import (
    FlatStmt,
    canon,
    emitted_events,
    flatten_function,
    guard_facts,
    index_chain,
    is_entry,
    is_mutating,
    is_zero_address,
    mapping_depth,
    own_expressions,
    state_writes,
)


class TokenView:
    """The six ERC-20 methods of one token contract as resolved through inheritance."""

    def __init__(self, ctx: Ctx, contract: ast.ContractDef) -> None:
        self.ctx = ctx
        self.contract = contract
        self.state = ctx.project.state_vars(contract)
        self._flat: dict[str, list[FlatStmt]] = {}

    def method(self, name: str) -> Optional[ast.FunctionDef]:
        for owner, fn in self.ctx.project.functions(self.contract):
            if fn.name == name and fn.kind == "function" and fn.body is not None:
                return fn
        return None

    def flat(self, name: str) -> list[FlatStmt]:
        if name not in self._flat:
            fn = self.method(name)
            self._flat[name] = [] if fn is None else flatten_function(fn, self.contract, self.ctx.project)
        return self._flat[name]

    def depth(self, var: str) -> int:
        v = self.state.get(var)
        return mapping_depth(v.type) if v is not None else 0

    def balance_writes(self, name: str) -> set[str]:
        """Canonical keys at which the method writes a one-level mapping."""
        flat = self.flat(name)
        keys = set()
        for k, var, lvalue, _ in state_writes(flat, self.ctx.project, self.contract):
            if self.depth(var) == 1:
                _, idx = index_chain(lvalue)
                if idx:
                    keys.add(canon(idx[0], flat[k].subst))
        return keys

    def moves_tokens(self, name: str) -> bool:
        fn = self.method(name)
        if fn is None:
            return False
        params = [p.name for p in fn.params]
        if name == "transfer" and len(params) >= 2:
            sender, recipient = "msg.sender", params[0]
        elif name == "transferFrom" and len(params) >= 3:
            sender, recipient = params[0], params[1]
        else:
            return False
        keys = self.balance_writes(name)
        return sender in keys and recipient in keys


def _tokens(ctx: Ctx):
    for ca in ctx.bundle.contracts:
        if ctx.bundle.is_token(ca.contract):
            yield TokenView(ctx, ca.contract)


def _param(fn: ast.FunctionDef, i: int) -> Optional[str]:
    return fn.params[i].name if len(fn.params) > i else None


def _decreasing(flat: list[FlatStmt], tv: TokenView) -> bool:
    for fs in flat:
        for expr in own_expressions(fs.stmt):
            for node in expr.walk():
                if not isinstance(node, ast.Assignment):
                    continue
                name, _ = index_chain(node.target)
                if name is None or not fs.env.is_state(name) or tv.depth(name) < 2:
                    continue
                text = canon(node.value, fs.subst)
                if node.op == "-=" or "-" in text or ".sub(" in text:
                    return True
    return False


@check(38)
def allowance_decrease(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        fn = tv.method("transferFrom")
        if fn is not None and not _decreasing(tv.flat("transferFrom"), tv):
            ctx.emit(38, fn, "transferFrom() does not decrease the spender's allowance", tv.contract.name, fn.name)


def _direct_read(expr: Optional[ast.Expression], tv: TokenView, env) -> bool:
    name, idx = index_chain(expr) if expr is not None else (None, [])
    return name is not None and env.is_state(name) and tv.depth(name) == 2 and len(idx) == 2


@check(39)
def allowance_accuracy(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        fn = tv.method("allowance")
        if fn is None:
            continue
        env = tv.flat("allowance")[0].env if tv.flat("allowance") else None
        named = {p.name for p in fn.returns if p.name}
        results: list[Optional[ast.Expression]] = []
        for node in fn.body.walk():
            if isinstance(node, ast.Return):
                results.append(node.value)
            elif isinstance(node, ast.Assignment) and isinstance(node.target, ast.Identifier) and node.target.name in named:
                results.append(node.value)
        if env is None or not results or not all(_direct_read(r, tv, env) for r in results):
            ctx.emit(39, fn, "allowance() does not return the stored allowance directly", tv.contract.name, fn.name)


@check(40)
def allowance_cancel(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        fn = tv.method("approve")
        value = _param(fn, 1) if fn is not None else None
        if value is None:
            continue
        for f in guard_facts(tv.flat("approve")):
            if (f.op == ">" and f.left == value and f.right == "0") or (
                f.op == "!=" and {f.left, f.right} == {value, "0"}
            ):
                ctx.emit(40, f.node, "approve() rejects a zero allowance, so approvals cannot be cancelled",
                         tv.contract.name, fn.name)


@check(41)
def transfer_balance_check(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        fn = tv.method("transfer")
        amount = _param(fn, 1) if fn is not None else None
        if amount is None:
            continue
        flat = tv.flat("transfer")
        writes = [k for k, *_ in state_writes(flat, ctx.project, tv.contract)]
        first = min(writes) if writes else len(flat)
        ok = any(
            f.index < first and f.op in (">=", ">") and f.right == amount
            and any(f.left.startswith(v + "[") for v in tv.state if tv.depth(v) == 1)
            for f in guard_facts(flat)
        )
        if not ok:
            ctx.emit(41, fn, "transfer() does not check the sender's balance before updating state",
                     tv.contract.name, fn.name)


@check(42)
def sender_balance_update(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        for name in ("transfer", "transferFrom"):
            fn = tv.method(name)
            if fn is not None and not tv.moves_tokens(name):
                ctx.emit(42, fn, f"{name}() does not update both sender and recipient balances",
                         tv.contract.name, name)


@check(43, 63)
def standard_events(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        for name, event, cid in (("transfer", "Transfer", 43), ("transferFrom", "Transfer", 43), ("approve", "Approval", 63)):
            fn = tv.method(name)
            if fn is not None and event not in emitted_events(tv.flat(name), ctx.project, tv.contract):
                ctx.emit(cid, fn, f"{name}() does not emit {event}", tv.contract.name, name)


@check(44)
def transfer_from_allowance_check(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        fn = tv.method("transferFrom")
        amount = _param(fn, 2) if fn is not None else None
        if amount is None:
            continue
        nested = {v for v in tv.state if tv.depth(v) >= 2}
        ok = any(
            f.op in (">=", ">") and f.right == amount and f.left_node is not None
            and any(isinstance(n, ast.Identifier) and n.name in nested for n in f.left_node.walk())
            for f in guard_facts(tv.flat("transferFrom"))
        )
        if not ok:
            ctx.emit(44, fn, "transferFrom() does not check the allowance against the amount", tv.contract.name, fn.name)


@check(46)
def unique_names(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        sigs: dict[str, set[str]] = {}
        for _, fn in ctx.project.functions(c):
            if fn.kind == "function":
                sigs.setdefault(fn.name, set()).add(fn.signature)
        for name in sorted(n for n, s in sigs.items() if len(s) > 1):
            where = next((fn for fn in c.functions if fn.name == name), c)
            ctx.emit(46, where, f"function name '{name}' is overloaded", c.name)


@check(49)
def return_false(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        for name in ("transfer", "transferFrom"):
            fn = tv.method(name)
            if fn is None:
                continue
            for node in fn.body.walk():
                if isinstance(node, ast.Return) and isinstance(node.value, ast.Literal) and node.value.text == "false":
                    ctx.emit(49, node, f"{name}() returns false instead of reverting", tv.contract.name, name)


@check(55, 56)
def allowance_helpers(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        for name, cid in (("decreaseAllowance", 55), ("increaseAllowance", 56)):
            for _, fn in ctx.project.functions(tv.contract):
                if fn.name != name or fn.kind != "function":
                    continue
                params = tuple(type_text(p.type) for p in fn.params)
                rets = tuple(type_text(p.type) for p in fn.returns)
                if params != ("address", "uint256") or rets != ("bool",):
                    ctx.emit(cid, fn, f"{name}({','.join(params)}) should be {name}(address,uint256) returns (bool)",
                             tv.contract.name, name)


@check(57)
def attack_surface(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        for fn in tv.contract.functions:
            if fn.kind == "function" and fn.visibility in ("public", "external", "default") \
                    and fn.name not in ctx.config.allowlist:
                ctx.emit(57, fn, f"'{fn.name}' extends the externally callable surface", tv.contract.name, fn.name)


@check(58)
def zero_address_recipient(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        for name, pos in (("transfer", 0), ("transferFrom", 1)):
            fn = tv.method(name)
            to = _param(fn, pos) if fn is not None else None
            if to is None:
                continue
            ok = any(
                f.op == "!=" and (
                    (f.left == to and is_zero_address(f.right_node)) or (f.right == to and is_zero_address(f.left_node))
                )
                for f in guard_facts(tv.flat(name))
            )
            if not ok:
                ctx.emit(58, fn, f"{name}() allows sending to the zero address", tv.contract.name, name)


def _nesting(stmt: Optional[ast.Statement], depth: int = 0) -> int:
    if stmt is None:
        return depth
    if isinstance(stmt, ast.Block):
        return max([depth] + [_nesting(s, depth) for s in stmt.statements])
    if isinstance(stmt, ast.If):
        inner = depth + 1
        # else-if chains read as one level
        orelse = _nesting(stmt.orelse, depth) if isinstance(stmt.orelse, ast.If) else _nesting(stmt.orelse, inner)
        return max(_nesting(stmt.then, inner), orelse)
    if isinstance(stmt, (ast.For, ast.While)):
        return _nesting(stmt.body, depth + 1)
    return depth


@check(61)
def nesting_depth(ctx: Ctx) -> None:
    limit = ctx.config.nesting_depth
    for ca in ctx.bundle.contracts:
        for fn in ca.contract.functions:
            depth = _nesting(fn.body)
            if depth > limit:
                ctx.emit(61, fn, f"control flow nested {depth} levels deep", ca.contract.name, fn.name or fn.kind)


@check(66)
def change_events(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        for fn in c.functions:
            if fn.body is None or not is_entry(fn) or not is_mutating(fn):
                continue
            flat = flatten_function(fn, c, ctx.project)
            writes = [k for k, *_ in state_writes(flat, ctx.project, c) if flat[k].origin == "function"]
            if writes and not emitted_events(flat, ctx.project, c):
                ctx.emit(66, fn, f"'{fn.name or fn.kind}' changes state without emitting an event",
                         c.name, fn.name or fn.kind)


@check(68)
def compliance(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        rep = ctx.bundle.conformance.get(tv.contract.name)
        if rep is None:
            continue
        bad = [r.name for r in rep.items() if not r.ok]
        bad += [r.name for r in rep.methods.values() if r.ok and not r.return_type_match]
        if bad:
            ctx.emit(68, tv.contract, f"not ERC-20 compliant: {', '.join(bad)}", tv.contract.name,
                     missing=",".join(rep.missing))


@check(70, 75, 81)
def metadata(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        fns = {fn.name for _, fn in ctx.project.functions(tv.contract)}
        for name, cid in (("decimals", 70), ("name", 75), ("symbol", 81)):
            if name not in tv.state and name not in fns:
                ctx.emit(cid, tv.contract, f"token does not declare '{name}'", tv.contract.name)


@check(82)
def allowance_spending(ctx: Ctx) -> None:
    for tv in _tokens(ctx):
        fn = tv.method("transferFrom")
        if fn is None:
            declared = next((f for _, f in ctx.project.functions(tv.contract) if f.name == "transferFrom"), None)
            ctx.emit(82, declared or tv.contract, "transferFrom() is not implemented", tv.contract.name)
        elif not is_entry(fn) or not tv.moves_tokens("transferFrom"):
            ctx.emit(82, fn, "transferFrom() cannot move approved tokens", tv.contract.name, fn.name)
