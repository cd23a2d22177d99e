"""Lexical and syntactic checks."""

from __future__ import annotations

import os
import re
from typing import Optional

from ..analysis import CallKind
from ..analysis.context import root_identifier
from ..frontend import ast
from ..frontend.types import is_dynamic, is_unsigned
from .bundle import norm_path
from .engine import Ctx, check
from .util import COMPARISONS, body_nodes, is_chain_attribute

_CAPWORDS = re.compile(r"^[A-Z][A-Za-z0-9]*$")
_MIXED_CASE = re.compile(r"^_*[a-z][A-Za-z0-9]*$")
_HASHES = frozenset({"keccak256", "sha256", "sha3"})


def _fname(fn: Optional[ast.FunctionDef]) -> Optional[str]:
    if fn is None:
        return None
    return fn.name or fn.kind


@check(1)
def function_default_visibility(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn in ca.contract.functions:
            if fn.visibility == "default" and fn.kind in ("function", "fallback"):
                ctx.emit(1, fn, f"function '{fn.name or 'fallback'}' has no explicit visibility",
                         ca.contract.name, _fname(fn))


@check(3, 4, 45)
def pragma_checks(ctx: Ctx) -> None:
    unit = ctx.bundle.unit
    pragma = unit.solidity_pragma
    if pragma is None:
        if unit.contracts:
            ctx.emit(4, ctx.bundle.file.span(0, 0), "no solidity version pragma")
        return
    c = pragma.constraint
    if c.kind != "exact":
        ctx.emit(4, pragma, f"version pragma '{pragma.text}' is not locked to one compiler", constraint=c.kind)
    low = c.min_version
    if low < ctx.config.pragma_min:
        want = ".".join(map(str, ctx.config.pragma_min))
        ctx.emit(3, pragma, f"compiler version {'.'.join(map(str, low))} is older than {want}")
    if low < (0, 5, 0) and any(ctx.bundle.is_token(ca.contract) for ca in ctx.bundle.contracts):
        ctx.emit(45, pragma, "token compiled before 0.5.0, which lacks calldata length validation")


@check(9)
def state_var_default_visibility(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for v in ca.contract.state_vars:
            if v.visibility == "default":
                ctx.emit(9, v, f"state variable '{v.name}' has no explicit visibility", ca.contract.name)


_DEPRECATED_IDENTS = {"sha3": "keccak256", "suicide": "selfdestruct"}
_DEPRECATED_MEMBERS = {("msg", "gas"): "gasleft()", ("block", "blockhash"): "blockhash()"}


@check(12)
def deprecated_functions(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        name = ca.contract.name
        for fn, env, node in body_nodes(ctx.project, ca):
            if isinstance(node, ast.Identifier) and node.name in _DEPRECATED_IDENTS and not env.is_variable(node.name):
                ctx.emit(12, node, f"'{node.name}' is deprecated; use {_DEPRECATED_IDENTS[node.name]}", name, _fname(fn))
            elif isinstance(node, ast.MemberAccess):
                if node.member == "callcode":
                    ctx.emit(12, node, "'callcode' is deprecated; use delegatecall", name, _fname(fn))
                elif isinstance(node.expr, ast.Identifier) and (node.expr.name, node.member) in _DEPRECATED_MEMBERS:
                    alt = _DEPRECATED_MEMBERS[(node.expr.name, node.member)]
                    ctx.emit(12, node, f"'{node.expr.name}.{node.member}' is deprecated; use {alt}", name, _fname(fn))
            elif isinstance(node, ast.Revert) and node.throw:
                ctx.emit(12, node, "'throw' is deprecated; use revert()", name, _fname(fn))
            elif isinstance(node, ast.VarDecl) and node.type is None:
                ctx.emit(12, node, f"'var {node.name}' is deprecated; declare an explicit type", name, _fname(fn))


def _is_tx_origin(node: ast.Node) -> bool:
    return (
        isinstance(node, ast.MemberAccess)
        and node.member == "origin"
        and isinstance(node.expr, ast.Identifier)
        and node.expr.name == "tx"
    )


def _conditions(node: ast.Node) -> list[ast.Expression]:
    if isinstance(node, ast.RequireStmt):
        return [node.cond]
    if isinstance(node, (ast.If, ast.While, ast.Conditional)):
        return [node.cond]
    if isinstance(node, ast.For) and node.cond is not None:
        return [node.cond]
    return []


@check(16)
def tx_origin_auth(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn, _, node in body_nodes(ctx.project, ca):
            if not isinstance(node, (ast.RequireStmt, ast.If)):
                continue
            for sub in node.cond.walk():
                if isinstance(sub, ast.BinaryOp) and sub.op in ("==", "!="):
                    if _is_tx_origin(sub.left) or _is_tx_origin(sub.right):
                        ctx.emit(16, sub, "authorization compares tx.origin", ca.contract.name, _fname(fn))


@check(17, 47)
def block_values(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        sensitive: set[int] = set()
        nodes: list[tuple[Optional[ast.FunctionDef], ast.Node]] = []
        for fn, _, node in body_nodes(ctx.project, ca):
            nodes.append((fn, node))
            for cond in _conditions(node):
                sensitive.update(id(n) for n in cond.walk())
            if isinstance(node, ast.BinaryOp):
                for side in (node.left, node.right):
                    sensitive.update(id(n) for n in side.walk())
            if isinstance(node, ast.Assignment) and node.op != "=":
                sensitive.update(id(n) for n in node.value.walk())
        for v in c.state_vars:
            if v.initializer is not None:
                nodes.extend((None, n) for n in v.initializer.walk())
        for fn, node in nodes:
            if not is_chain_attribute(node):
                continue
            text = node.span.text
            ctx.emit(47, node, f"miner-controlled value '{text}' used", c.name, _fname(fn))
            if id(node) in sensitive:
                ctx.emit(17, node, f"'{text}' used in a condition or computation", c.name, _fname(fn))


@check(19)
def constructor_name(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        for fn in c.functions:
            if fn.kind == "function" and fn.name.lower() == c.name.lower():
                ctx.emit(19, fn, f"function '{fn.name}' looks like a constructor but is an ordinary function",
                         c.name, fn.name)


def _randomness_shape(expr: ast.Node, tainted: set[str]) -> bool:
    for node in expr.walk():
        if isinstance(node, ast.Identifier) and node.name in tainted:
            return True
        if isinstance(node, ast.Call) and isinstance(node.callee, ast.Identifier) and node.callee.name in (
            "keccak256", "sha3", "sha256", "blockhash"
        ):
            if node.callee.name == "blockhash" or any(
                is_chain_attribute(n) or _is_blockhash(n) for a in node.args for n in a.walk()
            ):
                return True
        if isinstance(node, ast.BinaryOp) and node.op == "%":
            if any(is_chain_attribute(n) or _is_blockhash(n) for n in node.left.walk()):
                return True
    return False


def _is_blockhash(node: ast.Node) -> bool:
    return isinstance(node, ast.Call) and (
        (isinstance(node.callee, ast.Identifier) and node.callee.name == "blockhash")
        or (isinstance(node.callee, ast.MemberAccess) and node.callee.member == "blockhash")
    )


@check(21)
def weak_randomness(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            if fa.function.body is None or not any(s.sends_ether for s in fa.calls):
                continue
            tainted: set[str] = set()
            for node in fa.function.body.walk():
                if isinstance(node, ast.VarDeclStmt) and node.value is not None and _randomness_shape(node.value, tainted):
                    tainted.update(d.name for d in node.decls if d is not None)
                elif isinstance(node, ast.Assignment) and isinstance(node.target, ast.Identifier) and _randomness_shape(
                    node.value, tainted
                ):
                    tainted.add(node.target.name)
            for node in fa.function.body.walk():
                for cond in _conditions(node):
                    if _randomness_shape(cond, tainted):
                        ctx.emit(21, cond, "branch outcome derived from chain attributes",
                                 ca.contract.name, _fname(fa.function))


@check(28)
def assembly_blocks(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn, _, node in body_nodes(ctx.project, ca):
            if isinstance(node, ast.Assembly):
                ctx.emit(28, node, "inline assembly block", ca.contract.name, _fname(fn))


@check(30)
def typo_operators(ctx: Ctx) -> None:
    data = ctx.bundle.file.data
    for ca in ctx.bundle.contracts:
        for fn, _, node in body_nodes(ctx.project, ca):
            if (
                isinstance(node, ast.Assignment)
                and node.op == "="
                and isinstance(node.value, ast.UnaryOp)
                and node.value.prefix
                and node.value.op in ("+", "-")
            ):
                start = node.value.span.start
                if start > 0 and data[start - 1:start] == b"=":
                    ctx.emit(30, node, f"'={node.value.op}' is probably a typo for '{node.value.op}='",
                             ca.contract.name, _fname(fn))


@check(31)
def rtl_override(ctx: Ctx) -> None:
    for span in ctx.bundle.raw.rtl_override_positions:
        ctx.emit(31, span, "right-to-left override character (U+202E) in source")


def _pure_write_targets(root: ast.Node, bare_only: bool = False) -> set[int]:
    """Identifier nodes that are only assigned to, never read.

    With ``bare_only`` a write through ``x.f`` or ``x[i]`` counts as a use of ``x``,
    which is what a local storage pointer needs.
    """
    out: set[int] = set()
    for node in root.walk():
        if isinstance(node, ast.Assignment) and node.op == "=":
            targets = node.target.items if isinstance(node.target, ast.TupleExpr) else [node.target]
            for t in targets:
                if bare_only and not isinstance(t, ast.Identifier):
                    continue
                r = root_identifier(t) if t is not None else None
                if r is not None:
                    out.add(id(r))
    return out


def _reads(roots: list[ast.Node], bare_only: bool = False) -> dict[str, int]:
    counts: dict[str, int] = {}
    for root in roots:
        writes = _pure_write_targets(root, bare_only)
        for node in root.walk():
            if isinstance(node, ast.Identifier) and id(node) not in writes:
                counts[node.name] = counts.get(node.name, 0) + 1
    return counts


def _related_contracts(ctx: Ctx, c: ast.ContractDef) -> list[ast.ContractDef]:
    """``c`` and every analyzed contract that inherits from it."""
    return [d for d in ctx.project.contracts.values() if c in ctx.project.linearize(d)] or [c]


def _contract_roots(contracts: list[ast.ContractDef]) -> list[ast.Node]:
    roots: list[ast.Node] = []
    for d in contracts:
        roots.extend(fn.body for fn in d.functions if fn.body is not None)
        roots.extend(m.body for m in d.modifiers if m.body is not None)
        roots.extend(v.initializer for v in d.state_vars if v.initializer is not None)
        for fn in d.functions:
            for inv in fn.modifiers:
                roots.extend(inv.args or [])
        for b in d.bases:
            roots.extend(b.args)
    return roots


@check(32)
def unused_variables(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        for fn in c.functions:
            if fn.body is None:
                continue
            reads = _reads([fn.body], bare_only=True)
            for node in fn.body.walk():
                if isinstance(node, ast.VarDecl) and reads.get(node.name, 0) == 0:
                    ctx.emit(32, node, f"local variable '{node.name}' is never read", c.name, _fname(fn))
        if c.kind == "interface":
            continue
        reads = _reads(_contract_roots(_related_contracts(ctx, c)))
        for v in c.state_vars:
            if v.visibility != "public" and reads.get(v.name, 0) == 0:
                ctx.emit(32, v, f"state variable '{v.name}' is never read", c.name)


@check(34)
def packed_hash_collision(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn, env, node in body_nodes(ctx.project, ca):
            if not (isinstance(node, ast.Call) and isinstance(node.callee, ast.Identifier) and node.callee.name in _HASHES):
                continue
            for arg in node.args:
                if (
                    isinstance(arg, ast.Call)
                    and isinstance(arg.callee, ast.MemberAccess)
                    and arg.callee.member == "encodePacked"
                    and isinstance(arg.callee.expr, ast.Identifier)
                    and arg.callee.expr.name == "abi"
                ):
                    dynamic = [a for a in arg.args if is_dynamic(env.type_of(a))]
                    if len(dynamic) >= 2:
                        ctx.emit(34, arg, f"abi.encodePacked hashes {len(dynamic)} variable-length values",
                                 ca.contract.name, _fname(fn))


@check(35)
def hardcoded_gas(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fa in ca.functions:
            for site in fa.calls:
                if site.kind in (CallKind.ETHER_TRANSFER, CallKind.SEND):
                    ctx.emit(35, site.node, f"'{site.member}' forwards a fixed 2300 gas stipend",
                             ca.contract.name, _fname(fa.function), kind=site.kind.value)
                elif site.kind in (CallKind.LOW_LEVEL_CALL, CallKind.CALL_WITH_VALUE) and site.gas_literal is not None:
                    ctx.emit(35, site.node, f"call forwards a hard-coded gas amount ({site.gas_literal})",
                             ca.contract.name, _fname(fa.function))


@check(48)
def return_in_constructor(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn in ca.contract.functions:
            if fn.is_constructor and fn.body is not None:
                for node in fn.body.walk():
                    if isinstance(node, ast.Return):
                        ctx.emit(48, node, "return statement inside constructor", ca.contract.name, "constructor")


def _written_names(contracts: list[ast.ContractDef]) -> set[str]:
    out: set[str] = set()
    for root in _contract_roots(contracts):
        for node in root.walk():
            target = None
            if isinstance(node, ast.Assignment):
                for t in node.target.items if isinstance(node.target, ast.TupleExpr) else [node.target]:
                    r = root_identifier(t) if t is not None else None
                    if r is not None:
                        out.add(r.name)
            elif isinstance(node, ast.UnaryOp) and node.op in ("++", "--", "delete"):
                target = node.operand
            elif isinstance(node, ast.Call) and isinstance(node.callee, ast.MemberAccess) and node.callee.member in (
                "push", "pop"
            ):
                target = node.callee.expr
            if target is not None:
                r = root_identifier(target)
                if r is not None:
                    out.add(r.name)
    return out


@check(50)
def could_be_constant(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        written = _written_names(_related_contracts(ctx, c))
        for v in c.state_vars:
            if (
                v.mutability == "none"
                and v.initializer is not None
                and isinstance(v.type, ast.ElementaryType)
                and v.name not in written
            ):
                ctx.emit(50, v, f"state variable '{v.name}' is never modified and could be constant", c.name)


def _int_value(expr: ast.Expression) -> Optional[int]:
    if isinstance(expr, ast.Literal) and expr.kind == "number" and isinstance(expr.value, int):
        return expr.value
    return None


@check(51)
def tautology(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn, env, node in body_nodes(ctx.project, ca):
            if not (isinstance(node, ast.BinaryOp) and node.op in COMPARISONS):
                continue
            op, left, right = node.op, node.left, node.right
            if _int_value(left) is not None and _int_value(right) is None:
                op = {"<": ">", ">": "<", "<=": ">=", ">=": "<="}.get(op, op)
                left, right = right, left
            value = _int_value(right)
            t = env.type_of(left)
            if value is None or not is_unsigned(t):
                continue
            bits = int(t.name[4:] or 256)
            top = (1 << bits) - 1
            verdict = None
            if value == 0 and op in (">=", "<"):
                verdict = "always true" if op == ">=" else "always false"
            elif value >= top and op in ("<=", ">"):
                verdict = "always true" if op == "<=" else "always false"
            if verdict:
                ctx.emit(51, node, f"comparison on {t.name} is {verdict}", ca.contract.name, _fname(fn))


def _is_division(expr: ast.Expression) -> bool:
    if isinstance(expr, ast.BinaryOp) and expr.op == "/":
        return True
    return isinstance(expr, ast.Call) and isinstance(expr.callee, ast.MemberAccess) and expr.callee.member == "div"


@check(52)
def divide_before_multiply(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn, _, node in body_nodes(ctx.project, ca):
            hit = False
            if isinstance(node, ast.BinaryOp) and node.op == "*":
                hit = _is_division(node.left) or _is_division(node.right)
            elif isinstance(node, ast.Call) and isinstance(node.callee, ast.MemberAccess) and node.callee.member == "mul":
                hit = _is_division(node.callee.expr) or any(_is_division(a) for a in node.args)
            if hit:
                ctx.emit(52, node, "multiplication applied to the result of a division", ca.contract.name, _fname(fn))


@check(54)
def too_many_digits(ctx: Ctx) -> None:
    limit = ctx.config.literal_digits
    for ca in ctx.bundle.contracts:
        for node in ca.contract.walk():
            if (
                isinstance(node, ast.Literal)
                and node.kind == "number"
                and node.radix == 10
                and node.unit is None
                and not any(ch in node.text for ch in "eE._")
                and len(node.digits) >= limit
            ):
                ctx.emit(54, node, f"literal {node.text} has {len(node.digits)} digits", ca.contract.name)


@check(59)
def hardcoded_addresses(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for node in ca.contract.walk():
            if isinstance(node, ast.Literal) and node.kind == "address" and node.value != 0:
                ctx.emit(59, node, f"hard-coded address {node.text}", ca.contract.name)


@check(62)
def natspec(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn in ca.contract.functions:
            if fn.kind == "function" and fn.visibility in ("public", "external", "default") and not fn.doc:
                ctx.emit(62, fn, f"function '{fn.name}' has no NatSpec comment", ca.contract.name, fn.name)


@check(67)
def unindexed_events(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for ev in ca.contract.events:
            addr = [p for p in ev.params if isinstance(p.type, ast.ElementaryType) and p.type.name == "address"]
            if addr and not any(p.indexed for p in addr):
                ctx.emit(67, ev, f"event '{ev.name}' has address parameters but none indexed", ca.contract.name)


@check(69)
def naming(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        if not _CAPWORDS.match(c.name):
            ctx.emit(69, c, f"{c.kind} name '{c.name}' is not CapWords", c.name)
        for fn in c.functions:
            if fn.kind == "function" and not _MIXED_CASE.match(fn.name):
                ctx.emit(69, fn, f"function name '{fn.name}' is not mixedCase", c.name, fn.name)


@check(72)
def external_imports(ctx: Ctx) -> None:
    base = os.path.dirname(ctx.bundle.file.path)
    for imp in ctx.bundle.unit.imports:
        path = imp.path
        resolved = norm_path(os.path.join(base, path)) if path.startswith(".") else norm_path(path)
        if resolved not in ctx.bundle.analyzed_paths:
            ctx.emit(72, imp, f"imported '{path}' is outside the analyzed sources")


@check(74)
def prefer_external(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        c = ca.contract
        if c.kind != "contract":
            continue
        called: set[str] = set()
        for root in _contract_roots(_related_contracts(ctx, c)):
            for node in root.walk():
                if isinstance(node, ast.Call):
                    callee = node.callee.expr if isinstance(node.callee, ast.CallOptions) else node.callee
                    if isinstance(callee, ast.Identifier):
                        called.add(callee.name)
                    elif isinstance(callee, ast.MemberAccess) and isinstance(callee.expr, ast.Identifier) and (
                        callee.expr.name == "super" or ctx.project.contract(callee.expr.name) is not None
                    ):
                        called.add(callee.member)
        for fn in c.functions:
            if fn.kind == "function" and fn.visibility == "public" and fn.name not in called:
                ctx.emit(74, fn, f"public function '{fn.name}' is never called internally; declare it external",
                         c.name, fn.name)


@check(76)
def error_messages(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn, _, node in body_nodes(ctx.project, ca):
            if isinstance(node, ast.RequireStmt) and node.kind == "require" and node.message is None:
                ctx.emit(76, node, "require() without an error message", ca.contract.name, _fname(fn))
            elif isinstance(node, ast.Revert) and node.message is None:
                custom = node.call is not None and not (
                    isinstance(node.call.callee, ast.Identifier) and node.call.callee.name == "revert"
                )
                if not custom:
                    ctx.emit(76, node, "revert without an error message", ca.contract.name, _fname(fn))


_ORDER = {"fallback": 0, "receive": 0, "external": 1, "public": 2, "default": 2, "internal": 3, "private": 4}
_ORDER_NAMES = ["fallback", "external", "public", "internal", "private"]


@check(78)
def function_order(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        worst = -1
        for fn in ca.contract.functions:
            if fn.is_constructor:
                continue
            rank = _ORDER[fn.kind] if fn.kind in ("fallback", "receive") else _ORDER[fn.visibility]
            if rank < worst:
                ctx.emit(78, fn, f"'{fn.name or fn.kind}' ({_ORDER_NAMES[rank]}) follows a {_ORDER_NAMES[worst]} function",
                         ca.contract.name, _fname(fn))
            worst = max(worst, rank)


@check(79)
def modifier_order(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn in ca.contract.functions:
            kinds = [k for k, _ in fn.header_order]
            if "visibility" in kinds:
                first = kinds.index("visibility")
                if any(k in ("mutability", "modifier") for k in kinds[:first]):
                    ctx.emit(79, fn, f"visibility of '{fn.name or fn.kind}' is not the first attribute",
                             ca.contract.name, _fname(fn))


@check(80)
def uninitialized_return(ctx: Ctx) -> None:
    for ca in ctx.bundle.contracts:
        for fn in ca.contract.functions:
            named = [p.name for p in fn.returns if p.name]
            if fn.body is None or not named:
                continue
            if any(isinstance(n, ast.Return) for n in fn.body.walk()):
                continue
            assigned: set[str] = set()
            for node in fn.body.walk():
                if isinstance(node, ast.Assignment):
                    for t in node.target.items if isinstance(node.target, ast.TupleExpr) else [node.target]:
                        r = root_identifier(t) if t is not None else None
                        if r is not None:
                            assigned.add(r.name)
            for name in named:
                if name not in assigned:
                    ctx.emit(80, fn, f"named return '{name}' of '{fn.name}' is never assigned",
                             ca.contract.name, fn.name)
