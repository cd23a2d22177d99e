"""Canned attack schedules and the front-running interleaving oracle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .errors import TooManyTransactions, UnknownScenario
from .model import (
    ACCOMPLICE,
    ACCOMPLICE2,
    ALICE,
    ATTACKER,
    OWNER,
    SPENDER,
    Approve,
    BatchTransfer,
    Buy,
    ForceEther,
    Pause,
    ReentryHook,
    Sell,
    Transfer,
    TransferFrom,
    Tx,
    Unpause,
    Variant,
    Withdraw,
    World,
    _jsonable,
    account_name,
    execute,
    new_world,
)

MAX_ORDERING_TXS = 8


@dataclass
class Metrics:
    attacker_tokens_gained: int = 0
    attacker_wei_gained: int = 0
    reverted_steps: int = 0
    invariant_violations: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "attacker_tokens_gained": _jsonable(self.attacker_tokens_gained),
            "attacker_wei_gained": _jsonable(self.attacker_wei_gained),
            "reverted_steps": self.reverted_steps,
            "invariant_violations": list(self.invariant_violations),
        }


@dataclass
class ScenarioOutcome:
    name: str
    variant: Variant
    world: World
    metrics: Metrics
    safe: bool
    schedule: list[Tx]
    setup: list[Tx]
    results: list[Optional[str]]  # revert reason per attack tx, None when committed


@dataclass
class _Plan:
    world: World
    setup: list[Tx]
    attack: list[Tx]
    party: frozenset[int]
    # scenario-specific violations computed from the final world and per-tx results
    post: Callable[[World, list[Optional[str]]], list[str]] = lambda w, r: []
    # scenario-specific safety bound on top of "no invariant violations"
    bound: Callable[[Metrics, World, World], bool] = lambda m, start, end: True


def _holdings(world: World, party: Iterable[int]) -> tuple[int, int]:
    t = world.token
    return sum(t.balance(a) for a in party), sum(world.ether.get(a, 0) for a in party)


def _value(world: World, party: Iterable[int]) -> int:
    tokens, wei = _holdings(world, party)
    return tokens * world.token.rate + wei


def _mwa_plan(variant: Variant, n: int = 100, m: int = 50) -> _Plan:
    world = new_world(variant, supply=n + m)
    attack = [
        Tx(OWNER, Approve(SPENDER, n)),
        Tx(SPENDER, TransferFrom(OWNER, SPENDER, n)),
        Tx(OWNER, Approve(SPENDER, m)),
        Tx(SPENDER, TransferFrom(OWNER, SPENDER, m)),
    ]
    return _Plan(world, [], attack, frozenset({SPENDER}),
                 bound=lambda mt, s, e: mt.attacker_tokens_gained <= max(n, m))


def _reentry_setup(variant: Variant, hook: ReentryHook) -> tuple[World, list[Tx]]:
    world = new_world(variant, ether={ATTACKER: 10, ALICE: 1000}, hook=hook)
    return world, [Tx(ALICE, Buy(20)), Tx(ATTACKER, Buy(10))]


def _reentrancy_same(variant: Variant) -> _Plan:
    world, setup = _reentry_setup(variant, ReentryHook(ATTACKER, (Sell(10),), limit=2))
    return _Plan(world, setup, [Tx(ATTACKER, Sell(10))], frozenset({ATTACKER}),
                 bound=lambda mt, s, e: mt.attacker_wei_gained <= 10 * e.token.rate)


def _reentrancy_cross(variant: Variant) -> _Plan:
    world, setup = _reentry_setup(variant, ReentryHook(ATTACKER, (Transfer(ACCOMPLICE, 10),), limit=1))
    party = frozenset({ATTACKER, ACCOMPLICE})
    return _Plan(world, setup, [Tx(ATTACKER, Sell(10))], party,
                 bound=lambda mt, s, e: _value(e, party) <= _value(s, party))


def _overflow_batch(variant: Variant) -> _Plan:
    world = new_world(variant)
    setup = [Tx(OWNER, Transfer(ATTACKER, 10))]
    attack = [Tx(ATTACKER, BatchTransfer((ACCOMPLICE, ACCOMPLICE2), 1 << 255))]
    return _Plan(world, setup, attack, frozenset({ATTACKER, ACCOMPLICE, ACCOMPLICE2}))


def _frozen_ether(variant: Variant) -> _Plan:
    world = new_world(variant)
    if variant is Variant.INSECURE:
        world.token.has_withdraw = False
    setup = [Tx(ALICE, Buy(50)), Tx(ALICE, ForceEther(20))]

    def post(w: World, results: list[Optional[str]]) -> list[str]:
        stuck = w.unexpected_ether()
        if not w.token.has_withdraw and stuck > 0:
            return [f"{stuck} wei held by the token with no withdrawal path"]
        return []

    return _Plan(world, setup, [Tx(OWNER, Withdraw())], frozenset({ATTACKER}), post=post)


def _unprotected_withdraw(variant: Variant) -> _Plan:
    world = new_world(variant)
    if variant is Variant.INSECURE:
        world.token.withdraw_guarded = False
    return _Plan(world, [Tx(ALICE, Buy(50))], [Tx(ATTACKER, Withdraw())], frozenset({ATTACKER}),
                 bound=lambda mt, s, e: mt.attacker_wei_gained == 0)


def _forced_ether(variant: Variant) -> _Plan:
    world = new_world(variant)
    if variant is Variant.INSECURE:
        world.token.exact_balance_check = True
    attack = [Tx(ATTACKER, ForceEther(5)), Tx(ALICE, Buy(10)), Tx(ALICE, Sell(5))]

    def post(w: World, results: list[Optional[str]]) -> list[str]:
        return [f"{tx.action} by {account_name(tx.sender)} blocked after forced ether: {r}"
                for tx, r in zip(attack[1:], results[1:]) if r is not None]

    return _Plan(world, [Tx(ALICE, Buy(20))], attack, frozenset({ATTACKER}), post=post)


def _pause_gate(variant: Variant) -> _Plan:
    world = new_world(variant)
    attack = [
        Tx(OWNER, Pause()),
        Tx(ATTACKER, Transfer(ALICE, 5)),
        Tx(OWNER, Unpause()),
        Tx(ATTACKER, Transfer(ALICE, 5)),
    ]

    def post(w: World, results: list[Optional[str]]) -> list[str]:
        out = []
        if results[1] is None:
            out.append("transfer committed while the owner had requested a pause")
        if results[3] is not None:
            out.append(f"transfer after unpause reverted: {results[3]}")
        return out

    return _Plan(world, [Tx(OWNER, Transfer(ATTACKER, 10))], attack, frozenset({ATTACKER}), post=post)


SCENARIOS: dict[str, Callable[[Variant], _Plan]] = {
    "mwa-frontrun": _mwa_plan,
    "reentrancy-same": _reentrancy_same,
    "reentrancy-cross": _reentrancy_cross,
    "overflow-batch": _overflow_batch,
    "frozen-ether": _frozen_ether,
    "unprotected-withdraw": _unprotected_withdraw,
    "forced-ether": _forced_ether,
    "pause-gate": _pause_gate,
}


def scenario_names() -> list[str]:
    return list(SCENARIOS)


def run_scenario(name: str, variant: Variant | str = Variant.SECURE) -> ScenarioOutcome:
    if name not in SCENARIOS:
        raise UnknownScenario(name)
    variant = Variant.parse(variant)
    plan = SCENARIOS[name](variant)
    world = plan.world
    for tx in plan.setup:
        world, _ = execute(world, tx)
    start = world
    results: list[Optional[str]] = []
    for tx in plan.attack:
        world, err = execute(world, tx)
        results.append(None if err is None else getattr(err, "reason", str(err)))
    tokens0, wei0 = _holdings(start, plan.party)
    tokens1, wei1 = _holdings(world, plan.party)
    metrics = Metrics(
        attacker_tokens_gained=max(0, tokens1 - tokens0),
        attacker_wei_gained=max(0, wei1 - wei0),
        reverted_steps=world.reverted_steps - start.reverted_steps,
        invariant_violations=list(world.violations) + plan.post(world, results),
    )
    safe = not metrics.invariant_violations and plan.bound(metrics, start, world)
    return ScenarioOutcome(name, variant, world, metrics, safe, plan.setup + plan.attack, plan.setup, results)


# --- interleavings ------------------------------------------------------------


@dataclass
class OrderingResult:
    worst_case: int
    witness: tuple[Tx, ...]
    interleavings: int
    variant: Variant


def interleavings(a: list[Tx], b: list[Tx]) -> Iterable[tuple[Tx, ...]]:
    """All merges of ``a`` and ``b`` that keep each stream's own order."""
    total = len(a) + len(b)
    for slots in itertools.combinations(range(total), len(a)):
        chosen = set(slots)
        ia, ib = iter(a), iter(b)
        yield tuple(next(ia) if i in chosen else next(ib) for i in range(total))


def enumerate_orderings(owner_txs: list[Tx], spender_txs: list[Tx], variant: Variant | str = Variant.SECURE,
                        world: Optional[World] = None) -> OrderingResult:
    """Maximum tokens the spender side collects over every interleaving of the two streams."""
    variant = Variant.parse(variant)
    if len(owner_txs) + len(spender_txs) > MAX_ORDERING_TXS:
        raise TooManyTransactions(
            f"{len(owner_txs) + len(spender_txs)} transactions exceed the limit of {MAX_ORDERING_TXS}"
        )
    if world is None:
        supply = sum(tx.action.value for tx in owner_txs if isinstance(tx.action, Approve))
        world = new_world(variant, supply=max(supply, 1))
    party = {tx.sender for tx in spender_txs}
    party |= {tx.action.to for tx in spender_txs if isinstance(tx.action, TransferFrom)}
    base, _ = _holdings(world, party)
    best, witness, count = -1, (), 0
    for order in interleavings(owner_txs, spender_txs):
        count += 1
        w = world
        for tx in order:
            w, _ = execute(w, tx)
        gained = _holdings(w, party)[0] - base
        if gained > best:
            best, witness = gained, order
    return OrderingResult(max(best, 0), witness, count, variant)


def mwa_streams(n: int, m: int) -> tuple[list[Tx], list[Tx]]:
    """Owner approves ``n`` then ``m``; the spender tries to spend both.

    When ``m > n`` the spender also tries the remainder ``m - n``, which is what an
    honest spender collects after a raised approval under the tracked rule.
    """
    owner = [Tx(OWNER, Approve(SPENDER, n)), Tx(OWNER, Approve(SPENDER, m))]
    amounts = [n, m] + ([m - n] if m > n else [])
    spender = [Tx(SPENDER, TransferFrom(OWNER, SPENDER, a)) for a in amounts]
    return owner, spender


def mwa(n: int, m: int, variant: Variant | str = Variant.SECURE) -> OrderingResult:
    owner, spender = mwa_streams(n, m)
    return enumerate_orderings(owner, spender, variant, new_world(variant, supply=n + m))
