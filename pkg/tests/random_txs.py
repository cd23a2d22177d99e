"""Random transaction source shared by the property tests."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from ercaudit.sim.model import (
    ACCOMPLICE,
    ACCOMPLICE2,
    ALICE,
    ATTACKER,
    OWNER,
    SPENDER,
    ZERO,
    Approve,
    BatchTransfer,
    Burn,
    Buy,
    ForceEther,
    Mint,
    Pause,
    Sell,
    Transfer,
    TransferFrom,
    Tx,
    Unpause,
    Withdraw,
    World,
)

SENDERS = (OWNER, ALICE, SPENDER, ATTACKER, ACCOMPLICE, ACCOMPLICE2)
TARGETS = SENDERS + (ZERO,)
MAX_VALUE = 300


def random_tx(rng: random.Random, world: World | None = None) -> Tx:
    sender = rng.choice(SENDERS)
    v = rng.randint(0, MAX_VALUE)
    kind = rng.randrange(12)
    if kind == 0:
        action = Approve(rng.choice(TARGETS), v)
    elif kind == 1:
        action = Transfer(rng.choice(TARGETS), v)
    elif kind == 2:
        action = TransferFrom(rng.choice(SENDERS), rng.choice(TARGETS), v)
    elif kind == 3:
        k = rng.randint(1, 3)
        action = BatchTransfer(tuple(rng.choice(TARGETS) for _ in range(k)), v)
    elif kind == 4:
        action = Buy(v)
    elif kind == 5:
        action = Sell(v)
    elif kind == 6:
        action = Withdraw()
    elif kind == 7:
        action = Pause()
    elif kind == 8:
        action = Unpause()
    elif kind == 9:
        action = ForceEther(rng.randint(0, 20))
    elif kind == 10:
        action = Mint(rng.choice(TARGETS), v)
    else:
        action = Burn(v)
    return Tx(sender, action)


@st.composite
def txs(draw) -> Tx:
    return random_tx(random.Random(draw(st.integers(0, 2**32))))


tx_lists = st.lists(txs(), min_size=1, max_size=40)
