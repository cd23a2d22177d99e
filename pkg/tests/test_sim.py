from __future__ import annotations

import math

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from ercaudit.sim import (
    Overflow,
    Revert,
    TooManyTransactions,
    UnknownScenario,
    Variant,
    account_name,
    enumerate_orderings,
    mwa,
    new_world,
    run_scenario,
    scenario_names,
    step,
    u256,
)
from ercaudit.sim.model import (
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
    Withdraw,
    execute,
)
from ercaudit.sim.scenarios import SCENARIOS, interleavings
from ercaudit.sim.trace import outcome_dict, render_ordering_text, render_text
from random_txs import tx_lists

VARIANTS = [Variant.SECURE, Variant.INSECURE]
SLOW = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def test_u256_modes():
    assert u256.add(u256.MAX, 1, u256.Mode.WRAPPING) == 0
    assert u256.mul(2, 1 << 255, u256.Mode.WRAPPING) == 0
    assert u256.sub(0, 1, u256.Mode.WRAPPING) == u256.MAX
    with pytest.raises(Overflow):
        u256.add(u256.MAX, 1)
    with pytest.raises(Overflow):
        u256.sub(0, 1)
    assert u256.mul(3, 5) == 15


def test_allowance_exhaustion():
    w = new_world(Variant.SECURE)
    for tx in (Tx(OWNER, Approve(SPENDER, 100)), Tx(SPENDER, TransferFrom(OWNER, SPENDER, 60)),
               Tx(SPENDER, TransferFrom(OWNER, SPENDER, 40))):
        w = step(w, tx)
    assert w.token.balance(SPENDER) == 100
    with pytest.raises(Revert):
        step(w, Tx(SPENDER, TransferFrom(OWNER, SPENDER, 1)))


def test_batch_overflow_wraps_or_reverts():
    insecure = step(new_world(Variant.INSECURE), Tx(OWNER, Transfer(ATTACKER, 10)))
    after = step(insecure, Tx(ATTACKER, BatchTransfer((ALICE, ACCOMPLICE), 1 << 255)))
    assert after.token.balance(ALICE) == 1 << 255
    assert after.token.balance(ATTACKER) == 10
    assert after.violations
    secure = step(new_world(Variant.SECURE), Tx(OWNER, Transfer(ATTACKER, 10)))
    with pytest.raises(Overflow):
        step(secure, Tx(ATTACKER, BatchTransfer((ALICE, ACCOMPLICE), 1 << 255)))


def test_forced_ether_is_unexpected():
    w = step(new_world(Variant.SECURE), Tx(ATTACKER, ForceEther(5)))
    assert w.unexpected_ether() == 5
    assert w.token_ether() == 5 and w.token.contract_balance_tracked == 0


def test_zero_force_from_unfunded_account_is_a_noop():
    w0 = new_world(Variant.SECURE)
    assert ACCOMPLICE2 not in w0.ether
    w = step(w0, Tx(ACCOMPLICE2, ForceEther(0)))
    assert w.state_hash() == w0.state_hash()


def test_pause_gate():
    w = step(new_world(Variant.SECURE), Tx(OWNER, Transfer(ATTACKER, 10)))
    w = step(w, Tx(OWNER, Pause()))
    with pytest.raises(Revert, match="paused"):
        step(w, Tx(ATTACKER, Transfer(ALICE, 1)))
    with pytest.raises(Revert, match="owner"):
        step(w, Tx(ATTACKER, Unpause()))
    w = step(w, Tx(OWNER, Unpause()))
    assert step(w, Tx(ATTACKER, Transfer(ALICE, 1))).token.balance(ALICE) == 1


def test_zero_address_rejected_in_secure_only():
    with pytest.raises(Revert):
        step(new_world(Variant.SECURE), Tx(OWNER, Transfer(0, 1)))
    assert step(new_world(Variant.INSECURE), Tx(OWNER, Transfer(0, 1))).token.balance(0) == 1


@pytest.mark.parametrize("name", scenario_names())
def test_scenarios_split_on_variant(name):
    assert run_scenario(name, Variant.SECURE).safe
    assert not run_scenario(name, Variant.INSECURE).safe


def test_reentrancy_examples():
    bad = run_scenario("reentrancy-same", "insecure")
    assert bad.metrics.attacker_wei_gained == 30
    good = run_scenario("reentrancy-same", "secure")
    assert good.metrics.attacker_wei_gained == 10 and good.metrics.reverted_steps >= 1


def test_unknown_scenario():
    with pytest.raises(UnknownScenario):
        run_scenario("nope")


@pytest.mark.parametrize("name", scenario_names())
@pytest.mark.parametrize("variant", VARIANTS, ids=lambda v: v.value)
def test_metrics_recomputable_from_trace(name, variant):
    o = run_scenario(name, variant)
    events = [e for e in o.world.trace if e.step > len(o.setup)]
    party = SCENARIOS[name](variant).party

    def gained(prefix):
        keys = {f"{prefix}[{account_name(a)}]" for a in party}
        return max(0, sum(int(new) - int(old) for e in events if e.depth == 0 and e.ok
                          for key, old, new in e.deltas if key in keys))

    assert sum(1 for e in events if not e.ok) == o.metrics.reverted_steps
    assert gained("balances") == o.metrics.attacker_tokens_gained
    assert gained("ether") == o.metrics.attacker_wei_gained


def test_trace_renderings():
    o = run_scenario("reentrancy-same", Variant.SECURE)
    text = render_text(o, trace=True)
    assert "attacker.sell(10)" in text and "reentrant call" in text
    doc = outcome_dict(o, trace=True)
    assert doc["metrics"]["attacker_wei_gained"] == 10
    assert all({"step", "sender", "action", "result", "deltas"} <= set(e) for e in doc["trace"])


def test_ordering_examples():
    owner = [Tx(OWNER, Approve(SPENDER, 100)), Tx(OWNER, Approve(SPENDER, 50))]
    spender = [Tx(SPENDER, TransferFrom(OWNER, SPENDER, 100)), Tx(SPENDER, TransferFrom(OWNER, SPENDER, 50))]
    bad = enumerate_orderings(owner, spender, Variant.INSECURE)
    assert bad.worst_case == 150 and bad.interleavings == 6
    assert [str(t) for t in bad.witness[:2]] == ["owner: approve(spender, 100)",
                                                 "spender: transferFrom(owner, spender, 100)"]
    assert enumerate_orderings(owner, spender, Variant.SECURE).worst_case == 100
    assert "150" in render_ordering_text(bad)


@pytest.mark.parametrize("variant", VARIANTS, ids=lambda v: v.value)
def test_zero_approval_ordering(variant):
    res = enumerate_orderings([Tx(OWNER, Approve(SPENDER, 0))], [Tx(SPENDER, TransferFrom(OWNER, SPENDER, 1))],
                              variant)
    assert res.worst_case == 0


def test_ordering_limit():
    owner = [Tx(OWNER, Approve(SPENDER, i)) for i in range(5)]
    spender = [Tx(SPENDER, TransferFrom(OWNER, SPENDER, 1)) for _ in range(4)]
    with pytest.raises(TooManyTransactions):
        enumerate_orderings(owner, spender)


@given(a=st.integers(0, 4), b=st.integers(0, 4))
def test_interleavings_are_order_preserving_merges(a, b):
    xs = [Tx(OWNER, Approve(SPENDER, i)) for i in range(a)]
    ys = [Tx(SPENDER, Transfer(ALICE, i)) for i in range(b)]
    merges = list(interleavings(xs, ys))
    assert len(merges) == math.comb(a + b, a)
    assert len(set(merges)) == len(merges)
    for m in merges:
        assert [t for t in m if t.sender == OWNER] == xs
        assert [t for t in m if t.sender == SPENDER] == ys


# --- properties ---------------------------------------------------------------


@SLOW
@given(txs=tx_lists, variant=st.sampled_from(VARIANTS))
def test_conservation_and_atomic_revert(txs, variant):
    w = new_world(variant)
    for tx in txs:
        before, ether = w.state_hash(), w.total_ether()
        trace_len = len(w.trace)
        try:
            w = step(w, tx)
        except Revert:
            assert w.state_hash() == before
            assert len(w.trace) == trace_len
            continue
        assert sum(w.token.balances.values()) == w.token.total_supply
        assert w.total_ether() == ether


@SLOW
@given(txs=tx_lists)
def test_execute_matches_step(txs):
    w = new_world(Variant.SECURE)
    for tx in txs:
        before = w.state_hash()
        nxt, err = execute(w, tx)
        if err is not None:
            assert nxt.state_hash() == before
            assert nxt.reverted_steps == w.reverted_steps + 1
        w = nxt


_amount = st.integers(1, 200)


@SLOW
@given(n=_amount, m=_amount, spends=st.lists(st.integers(0, 400), min_size=1, max_size=6))
def test_mwa_safety_secure(n, m, spends):
    owner = [Tx(OWNER, Approve(SPENDER, n)), Tx(OWNER, Approve(SPENDER, m))]
    spender = [Tx(SPENDER, TransferFrom(OWNER, SPENDER, v)) for v in spends]
    res = enumerate_orderings(owner, spender, Variant.SECURE, new_world(Variant.SECURE, supply=n + m + 400))
    assert res.worst_case <= max(n, m)


@SLOW
@given(n=_amount, m=_amount)
def test_mwa_exploitability_insecure(n, m):
    assert mwa(n, m, Variant.INSECURE).worst_case == n + m
    assert mwa(n, m, Variant.SECURE).worst_case == max(n, m)


_hook_action = st.one_of(
    st.builds(Sell, st.integers(1, 20)),
    st.builds(Transfer, st.sampled_from([ALICE, ACCOMPLICE]), st.integers(0, 20)),
    st.builds(Buy, st.integers(1, 20)),
    st.just(Withdraw()),
    st.builds(Approve, st.sampled_from([SPENDER, ACCOMPLICE]), st.integers(0, 20)),
)


@SLOW
@given(program=st.lists(_hook_action, min_size=1, max_size=4), limit=st.integers(0, 20),
       bought=st.integers(1, 20), sold=st.integers(1, 20))
def test_reentrancy_safety_secure(program, limit, bought, sold):
    hook = ReentryHook(ATTACKER, tuple(program), limit=limit)
    w = new_world(Variant.SECURE, ether={ATTACKER: 100, ALICE: 1000}, hook=hook)
    w = step(w, Tx(ALICE, Buy(200)))
    w, _ = execute(w, Tx(ATTACKER, Buy(bought)))
    start = w.ether[ATTACKER]
    w, err = execute(w, Tx(ATTACKER, Sell(sold)))
    gained = w.ether[ATTACKER] - start
    assert gained <= (0 if err else sold * w.token.rate)
    assert not w.violations


@SLOW
@given(values=st.lists(st.integers(0, u256.MAX), min_size=1, max_size=20), count=st.integers(1, 20))
def test_checked_mode_never_wraps(values, count):
    w = new_world(Variant.SECURE, supply=u256.MAX)
    recipients = tuple([ALICE, ACCOMPLICE] * 10)[:count]
    for v in values:
        for tx in (Tx(OWNER, BatchTransfer(recipients, v)), Tx(OWNER, Transfer(ALICE, v))):
            w, _ = execute(w, tx)
            assert all(0 <= b <= u256.MAX for b in w.token.balances.values())
            assert sum(w.token.balances.values()) == w.token.total_supply
    assert not w.violations


@given(shift=st.sampled_from([1, 2, 3, 4]), extra=st.integers(0, 2))
def test_wrapping_batch_records_violation(shift, extra):
    count = 1 << shift
    recipients = tuple([ALICE, ACCOMPLICE, SPENDER, OWNER] * 4)[:count]
    w = step(new_world(Variant.INSECURE), Tx(OWNER, Transfer(ATTACKER, 100)))
    value = (1 << 256) // count + extra
    after = step(w, Tx(ATTACKER, BatchTransfer(recipients, value)))
    assert after.token.balance(ATTACKER) == 100 - count * extra
    assert any("sum of balances" in v for v in after.violations)
