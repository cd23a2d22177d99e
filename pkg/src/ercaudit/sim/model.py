"""Token state machines, the world they live in, and single-transaction execution."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field, fields
from enum import Enum
from typing import ClassVar, Optional

from . import u256
from .errors import DepthExceeded, Revert
from .u256 import Mode

ZERO = 0
OWNER = 1
ALICE = 2
SPENDER = 3
ATTACKER = 4
ACCOMPLICE = 5
ACCOMPLICE2 = 6
TOKEN = 100

NAMES = {ZERO: "zero", OWNER: "owner", ALICE: "alice", SPENDER: "spender", ATTACKER: "attacker",
         ACCOMPLICE: "accomplice", ACCOMPLICE2: "accomplice2", TOKEN: "token"}

DEFAULT_DEPTH = 16
MAX_BATCH = 20


def account_name(a: int) -> str:
    return NAMES.get(a, f"acct{a}")


class Variant(Enum):
    SECURE = "secure"
    INSECURE = "insecure-legacy"

    @classmethod
    def parse(cls, text: str | Variant) -> Variant:
        if isinstance(text, Variant):
            return text
        t = text.strip().lower()
        if t in ("insecure", "insecure-legacy", "legacy"):
            return cls.INSECURE
        if t == "secure":
            return cls.SECURE
        raise ValueError(f"unknown variant {text!r}")


# --- actions ---------------------------------------------------------------


_ADDRESS_FIELDS = frozenset({"spender", "to", "src"})


@dataclass(frozen=True)
class Action:
    name: ClassVar[str] = "?"

    def args(self) -> tuple:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __str__(self) -> str:
        parts = []
        for f in fields(self):
            a = getattr(self, f.name)
            if isinstance(a, tuple):
                parts.append("[" + ",".join(account_name(x) for x in a) + "]")
            elif f.name in _ADDRESS_FIELDS:
                parts.append(account_name(a))
            else:
                parts.append(str(a))
        return f"{self.name}({', '.join(parts)})"


@dataclass(frozen=True)
class Approve(Action):
    name: ClassVar[str] = "approve"
    spender: int
    value: int

    def __str__(self) -> str:
        return f"approve({account_name(self.spender)}, {self.value})"


@dataclass(frozen=True)
class Transfer(Action):
    name: ClassVar[str] = "transfer"
    to: int
    value: int

    def __str__(self) -> str:
        return f"transfer({account_name(self.to)}, {self.value})"


@dataclass(frozen=True)
class TransferFrom(Action):
    name: ClassVar[str] = "transferFrom"
    src: int
    to: int
    value: int

    def __str__(self) -> str:
        return f"transferFrom({account_name(self.src)}, {account_name(self.to)}, {self.value})"


@dataclass(frozen=True)
class BatchTransfer(Action):
    name: ClassVar[str] = "batchTransfer"
    recipients: tuple[int, ...]
    value: int


@dataclass(frozen=True)
class Buy(Action):
    name: ClassVar[str] = "buy"
    wei: int


@dataclass(frozen=True)
class Sell(Action):
    name: ClassVar[str] = "sell"
    tokens: int


@dataclass(frozen=True)
class Withdraw(Action):
    name: ClassVar[str] = "withdraw"


@dataclass(frozen=True)
class Pause(Action):
    name: ClassVar[str] = "pause"


@dataclass(frozen=True)
class Unpause(Action):
    name: ClassVar[str] = "unpause"


@dataclass(frozen=True)
class ForceEther(Action):
    name: ClassVar[str] = "force_ether"
    wei: int


@dataclass(frozen=True)
class Mint(Action):
    name: ClassVar[str] = "mint"
    to: int
    value: int

    def __str__(self) -> str:
        return f"mint({account_name(self.to)}, {self.value})"


@dataclass(frozen=True)
class Burn(Action):
    name: ClassVar[str] = "burn"
    value: int


@dataclass(frozen=True)
class Tx:
    sender: int
    action: Action

    def __str__(self) -> str:
        return f"{account_name(self.sender)}: {self.action}"


# --- state -----------------------------------------------------------------


@dataclass
class TokenModel:
    variant: Variant
    balances: dict[int, int] = field(default_factory=dict)
    allowances: dict[tuple[int, int], int] = field(default_factory=dict)
    transferred: dict[tuple[int, int], int] = field(default_factory=dict)
    total_supply: int = 0
    owner: int = OWNER
    paused: bool = False
    mutex_locked: bool = False
    contract_balance_tracked: int = 0
    rate: int = 1
    arithmetic_mode: Mode = Mode.CHECKED
    cei_enabled: bool = True
    # surface differences between the two variants
    has_mutex: bool = True
    has_pause: bool = True
    has_withdraw: bool = True
    withdraw_guarded: bool = True
    exact_balance_check: bool = False
    zero_address_check: bool = True

    @classmethod
    def create(cls, variant: Variant | str, supply: int = 0, owner: int = OWNER, rate: int = 1) -> TokenModel:
        variant = Variant.parse(variant)
        if variant is Variant.SECURE:
            tok = cls(variant, rate=rate, owner=owner)
        else:
            tok = cls(variant, rate=rate, owner=owner, arithmetic_mode=Mode.WRAPPING, cei_enabled=False,
                      has_mutex=False, has_pause=False, zero_address_check=False)
        if supply:
            tok.balances[owner] = supply
            tok.total_supply = supply
        return tok

    def balance(self, a: int) -> int:
        return self.balances.get(a, 0)

    def allowance(self, o: int, s: int) -> int:
        return self.allowances.get((o, s), 0)


@dataclass
class ReentryHook:
    """Follow-up actions run by ``owner`` each time the token sends it ether."""

    owner: int
    program: tuple[Action, ...]
    limit: int = 1
    fired: int = 0

    def __post_init__(self) -> None:
        if self.limit < 0:
            raise ValueError("hook limit must be non-negative")


@dataclass(frozen=True)
class TraceEvent:
    step: int
    depth: int
    sender: int
    action: str
    result: str  # "ok" or "revert: <reason>"
    deltas: tuple[tuple[str, int | bool, int | bool], ...] = ()

    @property
    def ok(self) -> bool:
        return self.result == "ok"

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "depth": self.depth,
            "sender": account_name(self.sender),
            "action": self.action,
            "result": self.result,
            "deltas": [{"key": k, "old": _jsonable(a), "new": _jsonable(b)} for k, a, b in self.deltas],
        }


def _jsonable(v: int | bool) -> int | bool | str:
    # values beyond 2^53 lose precision in many JSON readers
    if isinstance(v, int) and not isinstance(v, bool) and abs(v) > (1 << 53):
        return str(v)
    return v


@dataclass
class World:
    ether: dict[int, int]
    token: TokenModel
    hook: Optional[ReentryHook] = None
    trace: list[TraceEvent] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    reverted_steps: int = 0
    steps: int = 0
    max_depth: int = DEFAULT_DEPTH

    def clone(self) -> World:
        # trace events are immutable, so the log lists are copied shallowly
        return World(copy.deepcopy(self.ether), copy.deepcopy(self.token), copy.deepcopy(self.hook),
                     list(self.trace), list(self.violations), self.reverted_steps, self.steps, self.max_depth)

    def flat_state(self) -> dict[str, int | bool]:
        """Every state cell as ``name -> value``; logs and counters excluded."""
        t = self.token
        out: dict[str, int | bool] = {}
        # zero cells are omitted so an explicit 0 and a missing key hash alike
        for a, v in self.ether.items():
            if v:
                out[f"ether[{account_name(a)}]"] = v
        for a, v in t.balances.items():
            if v:
                out[f"balances[{account_name(a)}]"] = v
        for (o, s), v in t.allowances.items():
            if v:
                out[f"allowances[{account_name(o)},{account_name(s)}]"] = v
        for (o, s), v in t.transferred.items():
            if v:
                out[f"transferred[{account_name(o)},{account_name(s)}]"] = v
        out["total_supply"] = t.total_supply
        out["paused"] = t.paused
        out["mutex_locked"] = t.mutex_locked
        out["contract_balance_tracked"] = t.contract_balance_tracked
        if self.hook is not None:
            out["hook_fired"] = self.hook.fired
        return out

    def state_hash(self) -> str:
        payload = json.dumps(sorted((k, str(v)) for k, v in self.flat_state().items()))
        return hashlib.sha256(payload.encode()).hexdigest()

    def token_ether(self) -> int:
        return self.ether.get(TOKEN, 0)

    def unexpected_ether(self) -> int:
        """Ether the token holds beyond what its own bookkeeping recorded."""
        return self.token_ether() - self.token.contract_balance_tracked

    def total_ether(self) -> int:
        return sum(self.ether.values())


def new_world(variant: Variant | str, supply: int = 1000, ether: Optional[dict[int, int]] = None,
              rate: int = 1, hook: Optional[ReentryHook] = None) -> World:
    token = TokenModel.create(variant, supply=supply, rate=rate)
    funds = {OWNER: 1000, ALICE: 1000, SPENDER: 1000, ATTACKER: 1000, ACCOMPLICE: 0, TOKEN: 0}
    if ether is not None:
        funds.update(ether)
    return World(funds, token, hook)


# --- execution -------------------------------------------------------------


def _diff(before: dict, after: dict) -> tuple[tuple[str, int | bool, int | bool], ...]:
    keys = sorted(set(before) | set(after))
    return tuple((k, before.get(k, 0), after.get(k, 0)) for k in keys if before.get(k, 0) != after.get(k, 0))


class _Machine:
    """Executes actions against one world in place; callers handle cloning."""

    def __init__(self, world: World) -> None:
        self.w = world
        self.t = world.token

    # arithmetic in the token's mode
    def add(self, a: int, b: int) -> int:
        return u256.add(a, b, self.t.arithmetic_mode)

    def sub(self, a: int, b: int) -> int:
        return u256.sub(a, b, self.t.arithmetic_mode)

    def mul(self, a: int, b: int) -> int:
        return u256.mul(a, b, self.t.arithmetic_mode)

    def require(self, cond: bool, reason: str) -> None:
        if not cond:
            raise Revert(reason)

    def call(self, sender: int, action: Action, depth: int) -> None:
        """Run one frame; a revert restores the frame's pre-state and propagates."""
        if depth > self.w.max_depth:
            raise DepthExceeded(depth)
        before = self.w.flat_state()
        saved = copy.deepcopy((self.w.ether, self.w.token, self.w.hook))
        try:
            self.dispatch(sender, action, depth)
        except Revert as exc:
            # restore in place so enclosing frames keep valid references
            self.w.ether.clear()
            self.w.ether.update(saved[0])
            self.w.token.__dict__.update(saved[1].__dict__)
            if self.w.hook is not None:
                self.w.hook.__dict__.update(saved[2].__dict__)
            self.w.reverted_steps += 1
            self.w.trace.append(TraceEvent(self.w.steps, depth, sender, str(action), f"revert: {exc.reason}"))
            raise
        self.w.trace.append(TraceEvent(self.w.steps, depth, sender, str(action), "ok",
                                       _diff(before, self.w.flat_state())))

    def send_ether(self, to: int, wei: int, depth: int) -> None:
        self.require(self.w.token_ether() >= wei, "insufficient ether in token")
        self.w.ether[TOKEN] = self.w.token_ether() - wei
        self.w.ether[to] = self.w.ether.get(to, 0) + wei
        hook = self.w.hook
        if hook is not None and hook.owner == to and hook.fired < hook.limit:
            hook.fired += 1
            for follow in hook.program:
                try:
                    self.call(to, follow, depth + 1)
                except Revert:
                    pass  # the receiver swallows a failed re-entry

    def guard(self, blockable: bool = True) -> None:
        t = self.t
        if t.has_mutex and t.mutex_locked:
            raise Revert("reentrant call")
        if blockable and t.has_pause and t.paused:
            raise Revert("token is paused")

    def dispatch(self, sender: int, a: Action, depth: int) -> None:
        t = self.t
        if isinstance(a, ForceEther):
            self.require(self.w.ether.get(sender, 0) >= a.wei, "insufficient ether")
            self.w.ether[sender] = self.w.ether.get(sender, 0) - a.wei
            self.w.ether[TOKEN] = self.w.token_ether() + a.wei
            return
        if isinstance(a, (Pause, Unpause)):
            self.require(t.has_pause, f"{a.name} not supported")
            self.guard(blockable=False)
            self.require(sender == t.owner, "caller is not the owner")
            want = isinstance(a, Pause)
            self.require(t.paused != want, "already paused" if want else "not paused")
            t.paused = want
            return
        if isinstance(a, Withdraw):
            self.require(t.has_withdraw, "withdraw not supported")
            self.guard(blockable=False)
            if t.withdraw_guarded:
                self.require(sender == t.owner, "caller is not the owner")
            amount = self.w.token_ether()
            t.contract_balance_tracked = 0
            self._locked(lambda: self.send_ether(sender, amount, depth))
            return
        self.guard()
        if isinstance(a, Approve):
            self.approve(sender, a)
        elif isinstance(a, Transfer):
            self.move(sender, a.to, a.value)
        elif isinstance(a, TransferFrom):
            self.transfer_from(sender, a)
        elif isinstance(a, BatchTransfer):
            self.batch(sender, a)
        elif isinstance(a, Buy):
            self.buy(sender, a)
        elif isinstance(a, Sell):
            self.sell(sender, a, depth)
        elif isinstance(a, Mint):
            self.require(sender == t.owner, "caller is not the owner")
            self.require(not t.zero_address_check or a.to != ZERO, "mint to the zero address")
            t.total_supply = self.add(t.total_supply, a.value)
            t.balances[a.to] = self.add(t.balance(a.to), a.value)
        elif isinstance(a, Burn):
            self.require(t.balance(sender) >= a.value, "insufficient balance")
            t.balances[sender] = self.sub(t.balance(sender), a.value)
            t.total_supply = self.sub(t.total_supply, a.value)
        else:
            raise Revert(f"unsupported action {a.name}")

    def _locked(self, body) -> None:
        t = self.t
        if not t.has_mutex:
            body()
            return
        t.mutex_locked = True
        body()
        t.mutex_locked = False

    def move(self, src: int, to: int, value: int) -> None:
        t = self.t
        self.require(not t.zero_address_check or to != ZERO, "transfer to the zero address")
        self.require(t.balance(src) >= value, "insufficient balance")
        t.balances[src] = self.sub(t.balance(src), value)
        t.balances[to] = self.add(t.balance(to), value)

    def approve(self, sender: int, a: Approve) -> None:
        t = self.t
        self.require(not t.zero_address_check or a.spender != ZERO, "approve to the zero address")
        key = (sender, a.spender)
        if t.variant is Variant.SECURE:
            spent = t.transferred.get(key, 0)
            t.allowances[key] = self.sub(a.value, spent) if a.value > spent else 0
        else:
            t.allowances[key] = a.value

    def transfer_from(self, sender: int, a: TransferFrom) -> None:
        t = self.t
        key = (a.src, sender)
        self.require(t.allowance(*key) >= a.value, "insufficient allowance")
        self.move(a.src, a.to, a.value)
        t.allowances[key] = self.sub(t.allowance(*key), a.value)
        if t.variant is Variant.SECURE:
            t.transferred[key] = self.add(t.transferred.get(key, 0), a.value)

    def batch(self, sender: int, a: BatchTransfer) -> None:
        t = self.t
        n = len(a.recipients)
        self.require(0 < n <= MAX_BATCH, "bad recipient count")
        amount = self.mul(n, a.value)
        self.require(a.value > 0 and t.balance(sender) >= amount, "insufficient balance")
        t.balances[sender] = self.sub(t.balance(sender), amount)
        for r in a.recipients:
            t.balances[r] = self.add(t.balance(r), a.value)

    def _exact_balance(self) -> None:
        if self.t.exact_balance_check:
            self.require(self.w.token_ether() == self.t.contract_balance_tracked, "ether balance mismatch")

    def buy(self, sender: int, a: Buy) -> None:
        t = self.t
        self._exact_balance()
        self.require(self.w.ether.get(sender, 0) >= a.wei, "insufficient ether")
        tokens = a.wei // t.rate
        self.require(tokens > 0, "not enough ether")
        self.w.ether[sender] = self.w.ether.get(sender, 0) - a.wei
        self.w.ether[TOKEN] = self.w.token_ether() + a.wei
        t.contract_balance_tracked = self.add(t.contract_balance_tracked, a.wei)
        t.balances[sender] = self.add(t.balance(sender), tokens)
        t.total_supply = self.add(t.total_supply, tokens)

    def sell(self, sender: int, a: Sell, depth: int) -> None:
        t = self.t
        self._exact_balance()
        self.require(a.tokens > 0, "nothing to sell")
        stale = t.balance(sender)
        self.require(stale >= a.tokens, "insufficient balance")
        payout = self.mul(a.tokens, t.rate)
        if t.cei_enabled:
            self.require(t.contract_balance_tracked >= payout, "insufficient tracked ether")
            t.balances[sender] = self.sub(stale, a.tokens)
            t.total_supply = self.sub(t.total_supply, a.tokens)
            t.contract_balance_tracked = self.sub(t.contract_balance_tracked, payout)
            self._locked(lambda: self.send_ether(sender, payout, depth))
            return
        # legacy order: pay first, then book the sale against the balance read earlier
        self._locked(lambda: self.send_ether(sender, payout, depth))
        t.balances[sender] = self.sub(stale, a.tokens)
        t.total_supply = self.sub(t.total_supply, a.tokens)
        t.contract_balance_tracked = self.sub(t.contract_balance_tracked, payout)


def check_invariants(world: World) -> list[str]:
    t = world.token
    found = []
    total = sum(t.balances.values())
    if total != t.total_supply:
        found.append(f"step {world.steps}: sum of balances {total} != total supply {t.total_supply}")
    if t.contract_balance_tracked > world.token_ether():
        found.append(f"step {world.steps}: tracked ether {t.contract_balance_tracked} exceeds actual "
                     f"{world.token_ether()}")
    return found


def step(world: World, tx: Tx) -> World:
    """Execute ``tx`` on a copy of ``world``.

    Raises Revert (or DepthExceeded) without touching ``world``; on success the
    returned world carries the new trace events and any invariant violations.
    """
    new = world.clone()
    new.steps += 1
    _Machine(new).call(tx.sender, tx.action, 0)
    new.violations.extend(check_invariants(new))
    return new


def execute(world: World, tx: Tx) -> tuple[World, Optional[Exception]]:
    """Like ``step`` but a failure is logged in the trace instead of raised."""
    try:
        return step(world, tx), None
    except (Revert, DepthExceeded) as exc:
        out = world.clone()
        out.steps += 1
        out.reverted_steps += 1
        reason = exc.reason if isinstance(exc, Revert) else str(exc)
        out.trace.append(TraceEvent(out.steps, 0, tx.sender, str(tx.action), f"revert: {reason}"))
        return out, exc
