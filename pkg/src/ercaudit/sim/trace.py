"""Line-oriented and JSON renderings of scenario runs."""

from __future__ import annotations

import json

from .model import TraceEvent, _jsonable, account_name
from .scenarios import OrderingResult, ScenarioOutcome


def event_line(ev: TraceEvent) -> str:
    indent = "  " * ev.depth
    deltas = " ".join(f"{k}:{a}->{b}" for k, a, b in ev.deltas)
    line = f"{ev.step:>4} {indent}{account_name(ev.sender)}.{ev.action} => {ev.result}"
    return f"{line} | {deltas}" if deltas else line


def render_text(outcome: ScenarioOutcome, trace: bool = True) -> str:
    m = outcome.metrics
    out = [f"scenario {outcome.name} [{outcome.variant.value}]"]
    if trace:
        out.extend(event_line(ev) for ev in outcome.world.trace)
    out.append(f"attacker_tokens_gained: {m.attacker_tokens_gained}")
    out.append(f"attacker_wei_gained: {m.attacker_wei_gained}")
    out.append(f"reverted_steps: {m.reverted_steps}")
    out.append(f"invariant_violations: {len(m.invariant_violations)}")
    out.extend(f"  - {v}" for v in m.invariant_violations)
    out.append(f"safe: {'yes' if outcome.safe else 'no'}")
    return "\n".join(out) + "\n"


def outcome_dict(outcome: ScenarioOutcome, trace: bool = True) -> dict:
    d = {
        "scenario": outcome.name,
        "variant": outcome.variant.value,
        "safe": outcome.safe,
        "metrics": outcome.metrics.to_dict(),
        "state_hash": outcome.world.state_hash(),
    }
    if trace:
        d["trace"] = [ev.to_dict() for ev in outcome.world.trace]
    return d


def render_json(outcome: ScenarioOutcome, trace: bool = True) -> str:
    return json.dumps(outcome_dict(outcome, trace), indent=2, ensure_ascii=True) + "\n"


def ordering_dict(res: OrderingResult) -> dict:
    return {
        "variant": res.variant.value,
        "worst_case": _jsonable(res.worst_case),
        "interleavings": res.interleavings,
        "witness": [str(tx) for tx in res.witness],
    }


def render_ordering_text(res: OrderingResult) -> str:
    out = [f"variant: {res.variant.value}",
           f"interleavings: {res.interleavings}",
           f"worst_case_tokens: {res.worst_case}",
           "witness:"]
    out.extend(f"  {i + 1}. {tx}" for i, tx in enumerate(res.witness))
    return "\n".join(out) + "\n"


def render_ordering_json(res: OrderingResult) -> str:
    return json.dumps(ordering_dict(res), indent=2, ensure_ascii=True) + "\n"
