"""Per-function analyses: modifier expansion, CFGs, call sites, state access, guards."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..frontend import ast
from .calls import CallKind, CallSite, classify_calls
from .cfg import Cfg, EdgeLabel, build_cfg, detect_loops
from .context import Project, TypeEnv
from .guards import FunctionGuards, GuardFacts, guard_facts
from .modifiers import EffectiveBody, expand_modifiers
from .state import SELF_BALANCE, StateAccessSummary, state_access, write_summaries


@dataclass
class FunctionAnalysis:
    contract: ast.ContractDef
    function: ast.FunctionDef
    body: EffectiveBody
    cfg: Cfg
    calls: list[CallSite]
    access: StateAccessSummary
    env: TypeEnv
    guards: FunctionGuards


@dataclass
class ContractAnalysis:
    contract: ast.ContractDef
    guards: GuardFacts
    functions: list[FunctionAnalysis] = field(default_factory=list)

    def for_function(self, fn: ast.FunctionDef) -> FunctionAnalysis | None:
        for fa in self.functions:
            if fa.function is fn:
                return fa
        return None


def analyze_contract(contract: ast.ContractDef, project: Project) -> ContractAnalysis:
    """Analyze the functions declared directly in ``contract``."""
    facts = guard_facts(contract, project)
    summaries = write_summaries(project, contract)
    out = ContractAnalysis(contract, facts)
    for fn in contract.functions:
        body = expand_modifiers(fn, contract, project)
        env = TypeEnv(project, contract, fn)
        for mod_name in body.applied_modifiers:
            mod = project.modifier(contract, mod_name)
            if mod is not None:
                if mod.body is not None:
                    env.add_locals(mod.body)
                for p in mod.params:
                    if p.name:
                        env.locals.setdefault(p.name, p.type)
        cfg = build_cfg(body)
        calls = classify_calls(body, contract, project, env)
        access = state_access(cfg, body, calls, project, env, summaries)
        out.functions.append(FunctionAnalysis(contract, fn, body, cfg, calls, access, env, facts.for_function(fn)))
    return out


__all__ = [
    "CallKind",
    "CallSite",
    "Cfg",
    "ContractAnalysis",
    "EdgeLabel",
    "EffectiveBody",
    "FunctionAnalysis",
    "FunctionGuards",
    "GuardFacts",
    "Project",
    "SELF_BALANCE",
    "StateAccessSummary",
    "TypeEnv",
    "analyze_contract",
    "build_cfg",
    "classify_calls",
    "detect_loops",
    "expand_modifiers",
    "guard_facts",
    "state_access",
]
