"""Helpers shared by check implementations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from ..analysis import ContractAnalysis, EffectiveBody, FunctionAnalysis, Project, TypeEnv, expand_modifiers
from ..analysis.context import root_identifier
from ..frontend import ast
from ..frontend.types import type_text

CHAIN_ATTRIBUTES = frozenset({"timestamp", "number", "difficulty"})
COMPARISONS = frozenset({"==", "!=", "<", ">", "<=", ">="})
_SWAP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}
_NEGATE = {"==": "!=", "!=": "==", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}


def canon(expr: Optional[ast.Node], subst: Optional[dict[str, str]] = None) -> str:
    """Whitespace-free rendering with parameter substitution."""
    if expr is None:
        return ""
    s = subst or {}

    def sub(e: Optional[ast.Node]) -> str:
        t = canon(e, s)
        return f"({t})" if isinstance(e, (ast.BinaryOp, ast.Conditional, ast.Assignment)) else t

    if isinstance(expr, ast.Identifier):
        return s.get(expr.name, expr.name)
    if isinstance(expr, ast.MemberAccess):
        return f"{sub(expr.expr)}.{expr.member}"
    if isinstance(expr, ast.IndexAccess):
        return f"{sub(expr.base)}[{canon(expr.index, s)}]"
    if isinstance(expr, ast.Call):
        return f"{sub(expr.callee)}({','.join(canon(a, s) for a in expr.args)})"
    if isinstance(expr, ast.CallOptions):
        opts = ",".join(f"{n}:{canon(v, s)}" for n, v in zip(expr.names, expr.values))
        return f"{sub(expr.expr)}{{{opts}}}"
    if isinstance(expr, ast.BinaryOp):
        return f"{sub(expr.left)}{expr.op}{sub(expr.right)}"
    if isinstance(expr, ast.UnaryOp):
        return f"{expr.op}{sub(expr.operand)}" if expr.prefix else f"{sub(expr.operand)}{expr.op}"
    if isinstance(expr, ast.Assignment):
        return f"{canon(expr.target, s)}{expr.op}{canon(expr.value, s)}"
    if isinstance(expr, ast.Conditional):
        return f"{sub(expr.cond)}?{sub(expr.then)}:{sub(expr.orelse)}"
    if isinstance(expr, ast.Literal):
        if expr.kind in ("number", "address") and isinstance(expr.value, int):
            return str(expr.value)
        return expr.text
    if isinstance(expr, ast.TupleExpr):
        inner = ",".join(canon(i, s) for i in expr.items)
        return f"[{inner}]" if expr.bracket else f"({inner})"
    if isinstance(expr, ast.TypeExpr):
        return type_text(expr.type)
    if isinstance(expr, ast.NewExpr):
        return f"new {type_text(expr.type)}"
    if isinstance(expr, ast.TypeName):
        return type_text(expr)
    return expr.span.text.replace(" ", "")


def is_zero_address(expr: Optional[ast.Expression]) -> bool:
    if isinstance(expr, ast.Literal):
        return expr.kind in ("number", "address") and expr.value == 0
    if isinstance(expr, ast.Call) and isinstance(expr.callee, ast.TypeExpr) and len(expr.args) == 1:
        return is_zero_address(expr.args[0])
    return False


def strip_casts(expr: Optional[ast.Expression]) -> Optional[ast.Expression]:
    while isinstance(expr, ast.Call) and isinstance(expr.callee, ast.TypeExpr) and len(expr.args) == 1:
        expr = expr.args[0]
    return expr


def is_chain_attribute(expr: ast.Node) -> bool:
    if isinstance(expr, ast.Identifier) and expr.name == "now":
        return True
    return (
        isinstance(expr, ast.MemberAccess)
        and isinstance(expr.expr, ast.Identifier)
        and expr.expr.name == "block"
        and expr.member in CHAIN_ATTRIBUTES
    )


def own_expressions(stmt: ast.Statement) -> list[ast.Expression]:
    """Expressions a statement evaluates itself, excluding nested statements."""
    if isinstance(stmt, ast.ExpressionStmt):
        return [stmt.expr]
    if isinstance(stmt, ast.VarDeclStmt):
        return [stmt.value] if stmt.value is not None else []
    if isinstance(stmt, ast.RequireStmt):
        return [stmt.call]
    if isinstance(stmt, ast.Return):
        return [stmt.value] if stmt.value is not None else []
    if isinstance(stmt, ast.Emit):
        return [stmt.call]
    if isinstance(stmt, ast.Revert):
        return [stmt.call] if stmt.call is not None else []
    if isinstance(stmt, (ast.If, ast.While)):
        return [stmt.cond]
    if isinstance(stmt, ast.For):
        return [e for e in (stmt.cond, stmt.post) if e is not None]
    return []


def nested_statements(stmt: ast.Statement) -> list[ast.Statement]:
    if isinstance(stmt, ast.Block):
        return list(stmt.statements)
    if isinstance(stmt, ast.If):
        return [s for s in (stmt.then, stmt.orelse) if s is not None]
    if isinstance(stmt, ast.For):
        return [s for s in (stmt.init, stmt.body) if s is not None]
    if isinstance(stmt, ast.While):
        return [stmt.body]
    return []


@dataclass
class FlatStmt:
    stmt: ast.Statement
    subst: dict[str, str]
    env: TypeEnv
    function: ast.FunctionDef
    origin: str
    depth: int  # inlining depth, 0 for the analyzed function itself


def flatten(fa: FunctionAnalysis, project: Project, max_depth: int = 3) -> list[FlatStmt]:
    """Statements in source order; internal callees are inlined before the calling statement."""
    return flatten_body(fa.body, fa.env, project, max_depth)


def flatten_function(fn: ast.FunctionDef, contract: ast.ContractDef, project: Project) -> list[FlatStmt]:
    return flatten_body(expand_modifiers(fn, contract, project), TypeEnv(project, contract, fn), project)


def flatten_body(body: EffectiveBody, env: TypeEnv, project: Project, max_depth: int = 3) -> list[FlatStmt]:
    out: list[FlatStmt] = []
    contract = body.contract

    def visit(stmt: ast.Statement, subst: dict[str, str], env: TypeEnv, fn: ast.FunctionDef,
              origin: str, depth: int, active: tuple[int, ...]) -> None:
        for expr in own_expressions(stmt):
            for node in expr.walk():
                if isinstance(node, ast.Call) and isinstance(node.callee, ast.Identifier) and depth < max_depth:
                    for callee in project.functions_named(contract, node.callee.name):
                        if callee.body is None or id(callee) in active or len(callee.params) != len(node.args):
                            continue
                        inner = {p.name: canon(a, subst) for p, a in zip(callee.params, node.args) if p.name}
                        cenv = TypeEnv(project, contract, callee)
                        for s in callee.body.statements:
                            visit(s, inner, cenv, callee, origin, depth + 1, active + (id(callee),))
                        break
        out.append(FlatStmt(stmt, subst, env, fn, origin, depth))
        for child in nested_statements(stmt):
            visit(child, subst, env, fn, origin, depth, active)

    for stmt in body.statements:
        visit(stmt, {}, env, body.function, body.origin(stmt), 0, (id(body.function),))
    return out


@dataclass
class Fact:
    """A comparison known to hold after a guard: ``left op right`` in canonical text."""

    op: str
    left: str
    right: str
    index: int
    node: ast.Expression
    left_node: Optional[ast.Expression] = None
    right_node: Optional[ast.Expression] = None


def _split(expr: ast.Expression, op: str) -> list[ast.Expression]:
    if isinstance(expr, ast.BinaryOp) and expr.op == op:
        return _split(expr.left, op) + _split(expr.right, op)
    return [expr]


def _always_reverts(stmt: Optional[ast.Statement]) -> bool:
    if isinstance(stmt, ast.Revert):
        return True
    if isinstance(stmt, ast.Block):
        return any(isinstance(s, ast.Revert) for s in stmt.statements)
    return False


def guard_facts(flat: list[FlatStmt]) -> list[Fact]:
    facts: list[Fact] = []
    for k, fs in enumerate(flat):
        s = fs.stmt
        atoms: list[tuple[ast.Expression, bool]] = []
        if isinstance(s, ast.RequireStmt):
            atoms = [(a, False) for a in _split(s.cond, "&&")]
        elif isinstance(s, ast.If) and s.orelse is None and _always_reverts(s.then):
            atoms = [(a, True) for a in _split(s.cond, "||")]
        for atom, negate in atoms:
            if isinstance(atom, ast.BinaryOp) and atom.op in COMPARISONS:
                op, left, right = atom.op, atom.left, atom.right
                if negate:
                    op = _NEGATE[op]
                if op in ("<", "<="):
                    op, left, right = _SWAP[op], right, left
                facts.append(Fact(op, canon(left, fs.subst), canon(right, fs.subst), k, atom, left, right))
            else:
                truthy = atom
                if negate:
                    if isinstance(atom, ast.UnaryOp) and atom.op == "!":
                        truthy = atom.operand
                    else:
                        facts.append(Fact("falsy", canon(atom, fs.subst), "", k, atom, atom))
                        continue
                facts.append(Fact("truthy", canon(truthy, fs.subst), "", k, truthy, truthy))
    return facts


def state_writes(flat: list[FlatStmt], project: Project, contract: ast.ContractDef) -> Iterator[tuple[int, str, ast.Expression, str]]:
    """(flat index, state var, lvalue, lvalue text) for every direct state assignment."""
    for k, fs in enumerate(flat):
        for expr in own_expressions(fs.stmt):
            for node in expr.walk():
                targets: list[ast.Expression] = []
                if isinstance(node, ast.Assignment):
                    targets = list(node.target.items) if isinstance(node.target, ast.TupleExpr) else [node.target]
                elif isinstance(node, ast.UnaryOp) and node.op in ("++", "--", "delete"):
                    targets = [node.operand]
                for t in targets:
                    root = root_identifier(t)
                    if root is not None and fs.env.is_state(root.name):
                        yield k, root.name, t, canon(t, fs.subst)


def mapping_depth(t: Optional[ast.TypeName]) -> int:
    d = 0
    while isinstance(t, ast.MappingType):
        d += 1
        t = t.value
    return d


def index_chain(expr: ast.Expression) -> tuple[Optional[str], list[ast.Expression]]:
    """For ``m[a][b]`` return ("m", [a, b])."""
    idx: list[ast.Expression] = []
    while isinstance(expr, ast.IndexAccess):
        if expr.index is not None:
            idx.insert(0, expr.index)
        expr = expr.base
    return (expr.name if isinstance(expr, ast.Identifier) else None), idx


def emitted_events(flat: list[FlatStmt], project: Project, contract: ast.ContractDef) -> set[str]:
    events = set(project.events(contract))
    out = set()
    for fs in flat:
        s = fs.stmt
        if isinstance(s, ast.Emit) and isinstance(s.call.callee, ast.Identifier):
            out.add(s.call.callee.name)
        for expr in own_expressions(s) if not isinstance(s, ast.Emit) else []:
            for node in expr.walk():
                if isinstance(node, ast.Call) and isinstance(node.callee, ast.Identifier) and node.callee.name in events:
                    out.add(node.callee.name)
    return out


def is_entry(fn: ast.FunctionDef) -> bool:
    return fn.kind != "constructor" and fn.visibility in ("public", "external", "default")


def is_mutating(fn: ast.FunctionDef) -> bool:
    return fn.mutability not in ("view", "pure")


def walk_bodies(contract: ast.ContractDef) -> Iterator[tuple[Optional[ast.FunctionDef], ast.Node]]:
    """Every node inside function and modifier bodies of ``contract``."""
    for fn in contract.functions:
        if fn.body is not None:
            for node in fn.body.walk():
                yield fn, node
    for mod in contract.modifiers:
        if mod.body is not None:
            for node in mod.body.walk():
                yield None, node


def body_nodes(project: Project, ca: ContractAnalysis) -> Iterator[tuple[Optional[ast.FunctionDef], TypeEnv, ast.Node]]:
    """Nodes of each function and modifier body once, with a type environment."""
    c = ca.contract
    for fa in ca.functions:
        if fa.function.body is not None:
            for node in fa.function.body.walk():
                yield fa.function, fa.env, node
    for mod in c.modifiers:
        if mod.body is not None:
            env = TypeEnv(project, c, extra=mod.params)
            env.add_locals(mod.body)
            for node in mod.body.walk():
                yield None, env, node
