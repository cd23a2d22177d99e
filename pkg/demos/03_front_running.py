"""Search every ordering of an allowance change for the worst case.

    python demos/03_front_running.py

An owner approves N, then changes the approval to M. The spender races
both approvals with transferFrom calls. All order-preserving merges of the
two streams are executed, and the largest amount the spender ends up with
is reported along with the ordering that produced it.
"""

from __future__ import annotations

import random

from ercaudit.sim import Variant, mwa
from ercaudit.sim.trace import render_ordering_text


def main() -> None:
    for variant in (Variant.INSECURE, Variant.SECURE):
        print(render_ordering_text(mwa(100, 50, variant)))

    print("random sweep, N and M in [1, 200]")
    print(f"{'N':>4} {'M':>4} {'legacy':>7} {'N+M':>5} {'hardened':>9} {'max':>4}")
    rng = random.Random(7)
    for _ in range(10):
        n, m = rng.randint(1, 200), rng.randint(1, 200)
        bad = mwa(n, m, Variant.INSECURE).worst_case
        good = mwa(n, m, Variant.SECURE).worst_case
        print(f"{n:>4} {m:>4} {bad:>7} {n + m:>5} {good:>9} {max(n, m):>4}")


if __name__ == "__main__":
    main()
