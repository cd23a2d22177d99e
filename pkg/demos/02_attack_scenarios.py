"""Replay the canned attacks against both token variants.

    python demos/02_attack_scenarios.py

The legacy variant pays before it books, wraps on overflow, trusts its own
ether counter and lets approvals be front-run. The hardened variant reverts
or bounds each attack. The re-entrancy run is printed in full so the
nested sell calls are visible.
"""

from __future__ import annotations

from ercaudit.sim import Variant, run_scenario, scenario_names
from ercaudit.sim.trace import render_text


def main() -> None:
    print(f"{'scenario':<22} {'variant':<16} {'safe':<5} {'tokens':>8} {'wei':>5} {'reverts':>7}  violations")
    for name in scenario_names():
        for variant in (Variant.INSECURE, Variant.SECURE):
            o = run_scenario(name, variant)
            m = o.metrics
            tokens = m.attacker_tokens_gained
            tokens = f"2^{tokens.bit_length() - 1}" if tokens > 10**9 else str(tokens)
            print(f"{name:<22} {variant.value:<16} {'yes' if o.safe else 'no':<5} {tokens:>8} "
                  f"{m.attacker_wei_gained:>5} {m.reverted_steps:>7}  {len(m.invariant_violations)}")

    for variant in (Variant.INSECURE, Variant.SECURE):
        print()
        print(render_text(run_scenario("reentrancy-same", variant), trace=True), end="")


if __name__ == "__main__":
    main()
