"""Deterministic state-machine model of an ERC-20 token with buy/sell and attack scenarios."""

from __future__ import annotations

from .errors import DepthExceeded, Overflow, Revert, SimError, TooManyTransactions, UnknownScenario
from .model import (
    ACCOMPLICE,
    ACCOMPLICE2,
    ALICE,
    ATTACKER,
    OWNER,
    SPENDER,
    TOKEN,
    ZERO,
    Action,
    Approve,
    BatchTransfer,
    Burn,
    Buy,
    ForceEther,
    Mint,
    Pause,
    ReentryHook,
    Sell,
    TokenModel,
    TraceEvent,
    Transfer,
    TransferFrom,
    Tx,
    Unpause,
    Variant,
    Withdraw,
    World,
    account_name,
    check_invariants,
    execute,
    new_world,
    step,
)
from .scenarios import (
    SCENARIOS,
    Metrics,
    OrderingResult,
    ScenarioOutcome,
    enumerate_orderings,
    interleavings,
    mwa,
    mwa_streams,
    run_scenario,
    scenario_names,
)
from .u256 import MAX, MOD, Mode

__all__ = [name for name in dir() if not name.startswith("_")]
