"""Authorization guards and mutex modifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..frontend import ast
from .context import Project, TypeEnv, is_msg_sender, root_identifier


@dataclass
class FunctionGuards:
    sender_guard_vars: set[str] = field(default_factory=set)
    guarding_modifiers: set[str] = field(default_factory=set)
    opaque_modifiers: set[str] = field(default_factory=set)
    mutex_vars: set[str] = field(default_factory=set)
    mutex_modifiers: set[str] = field(default_factory=set)

    @property
    def has_sender_equality_guard(self) -> bool:
        return bool(self.sender_guard_vars)

    @property
    def authorized(self) -> bool:
        """Caller restricted by a sender check, a guarding modifier or an unresolvable modifier."""
        return bool(self.sender_guard_vars or self.guarding_modifiers or self.opaque_modifiers)

    @property
    def mutex_protected(self) -> bool:
        return bool(self.mutex_modifiers)


@dataclass
class GuardFacts:
    contract: ast.ContractDef
    modifier_guards: dict[str, set[str]] = field(default_factory=dict)
    mutex_modifiers: dict[str, str] = field(default_factory=dict)
    functions: dict[int, FunctionGuards] = field(default_factory=dict)

    @property
    def guarding_modifiers(self) -> set[str]:
        return set(self.modifier_guards)

    @property
    def mutex_vars(self) -> set[str]:
        return set(self.mutex_modifiers.values())

    def for_function(self, fn: ast.FunctionDef) -> FunctionGuards:
        return self.functions.get(id(fn), FunctionGuards())


def _sender_compared_vars(cond: ast.Expression, env: TypeEnv, project: Project, contract: ast.ContractDef,
                          depth: int = 0) -> set[str]:
    """State variables a condition ties ``msg.sender`` to."""
    out: set[str] = set()
    for node in cond.walk():
        if isinstance(node, ast.BinaryOp) and node.op in ("==", "!="):
            for a, b in ((node.left, node.right), (node.right, node.left)):
                if is_msg_sender(a):
                    root = root_identifier(b)
                    if root is not None and env.is_state(root.name):
                        out.add(root.name)
        elif isinstance(node, ast.IndexAccess) and is_msg_sender(node.index):
            root = root_identifier(node.base)
            if root is not None and env.is_state(root.name):
                out.add(root.name)  # whitelist mapping keyed by caller
        elif isinstance(node, ast.Call) and isinstance(node.callee, ast.Identifier) and depth < 2:
            for fn in project.functions_named(contract, node.callee.name):
                for inner in _returned_exprs(fn):
                    out |= _sender_compared_vars(inner, TypeEnv(project, contract, fn), project, contract, depth + 1)
    return out


def _returned_exprs(fn: ast.FunctionDef) -> list[ast.Expression]:
    if fn.body is None:
        return []
    return [n.value for n in fn.body.walk() if isinstance(n, ast.Return) and n.value is not None]


def guard_statement_vars(stmt: ast.Statement, env: TypeEnv, project: Project, contract: ast.ContractDef) -> set[str]:
    if isinstance(stmt, ast.RequireStmt):
        return _sender_compared_vars(stmt.cond, env, project, contract)
    if isinstance(stmt, ast.If) and _always_aborts(stmt.then) and stmt.orelse is None:
        return _sender_compared_vars(stmt.cond, env, project, contract)
    return set()


def _always_aborts(stmt: ast.Statement) -> bool:
    if isinstance(stmt, ast.Revert):
        return True
    if isinstance(stmt, ast.Block):
        return any(isinstance(s, ast.Revert) for s in stmt.statements)
    return False


def _top_level_sender_guards(stmts: list[ast.Statement], env: TypeEnv, project: Project,
                             contract: ast.ContractDef) -> set[str]:
    out: set[str] = set()
    for s in stmts:
        out |= guard_statement_vars(s, env, project, contract)
    return out


def _bool_assign(stmt: ast.Statement) -> Optional[tuple[str, bool]]:
    if isinstance(stmt, ast.ExpressionStmt) and isinstance(stmt.expr, ast.Assignment) and stmt.expr.op == "=":
        target, value = stmt.expr.target, stmt.expr.value
        if isinstance(target, ast.Identifier) and isinstance(value, ast.Literal) and value.kind == "bool":
            return target.name, bool(value.value)
    return None


def mutex_variable(mod: ast.ModifierDef, env: TypeEnv) -> Optional[str]:
    """State bool written true before the placeholder and false after it."""
    if mod.body is None:
        return None
    stmts = mod.body.statements
    idx = [k for k, s in enumerate(stmts) if isinstance(s, ast.Placeholder)]
    if len(idx) != 1:
        return None
    p = idx[0]
    before = {a[0] for s in stmts[:p] if (a := _bool_assign(s)) and a[1]}
    after = {a[0] for s in stmts[p + 1:] if (a := _bool_assign(s)) and not a[1]}
    both = sorted(v for v in before & after if env.is_state(v))
    return both[0] if both else None


def guard_facts(contract: ast.ContractDef, project: Optional[Project] = None) -> GuardFacts:
    project = project or Project([])
    facts = GuardFacts(contract)
    seen_mods: set[str] = set()
    for c in project.linearize(contract):
        for mod in c.modifiers:
            if mod.name in seen_mods:
                continue
            seen_mods.add(mod.name)
            env = TypeEnv(project, contract, extra=mod.params)
            if mod.body is not None:
                vars_ = set()
                for node in mod.body.walk():
                    if isinstance(node, (ast.RequireStmt, ast.If)):
                        vars_ |= guard_statement_vars(node, env, project, contract)
                if vars_:
                    facts.modifier_guards[mod.name] = vars_
            mv = mutex_variable(mod, env)
            if mv:
                facts.mutex_modifiers[mod.name] = mv
    known_contracts = set(project.contracts) | set(contract.base_names)
    for _, fn in project.functions(contract):
        env = TypeEnv(project, contract, fn)
        g = FunctionGuards()
        if fn.body is not None:
            g.sender_guard_vars = _top_level_sender_guards(fn.body.statements, env, project, contract)
        for inv in fn.modifiers:
            if inv.name in facts.modifier_guards:
                g.guarding_modifiers.add(inv.name)
                g.sender_guard_vars |= facts.modifier_guards[inv.name]
            if inv.name in facts.mutex_modifiers:
                g.mutex_modifiers.add(inv.name)
                g.mutex_vars.add(facts.mutex_modifiers[inv.name])
            if inv.name not in seen_mods and inv.name not in known_contracts:
                g.opaque_modifiers.add(inv.name)
        facts.functions[id(fn)] = g
    return facts
