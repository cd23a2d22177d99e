"""Audit a hardened token next to a few broken ones.

Run from the repository root:

    python demos/01_audit_tokens.py

The hardened token passes every gradable check. Each broken token fails the
check its flaw maps to, and the look-alike fixtures show the shapes that a
naive pattern match would flag but this analyzer accepts.
"""

from __future__ import annotations

from pathlib import Path

from ercaudit.pipeline import analyze_paths
from ercaudit.report import finding_line
from ercaudit.rules import Config

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
CORPUS = FIXTURES / "corpus"


def headline(title: str) -> None:
    print()
    print(title)
    print("=" * len(title))


def summarize(path: Path, config: Config | None = None) -> None:
    report = analyze_paths([path], config)
    s = report.matrix.summary
    print(f"{path.name:<34} passed {s.passed:>2}  failed {s.failed:>2}  "
          f"informational {s.informational}  success {s.success_rate:5.1f}%")
    for f in report.findings:
        if f.severity.rank >= 1:
            print("    " + finding_line(f).split(": ", 1)[1])


def main() -> None:
    headline("1. The hardened token")
    summarize(FIXTURES / "secure_token.sol")

    headline("2. Tokens with one flaw each")
    for name in ("c08_call_before_write.sol", "c15_approve_race.sol", "c02_unchecked_add.sol",
                 "c06_open_withdrawal.sol", "c68_transfer_no_return.sol"):
        summarize(CORPUS / name)

    headline("3. Look-alikes that must stay clean")
    cases = {
        "fp_mutex_modifier.sol": ({8}, "lock flag set around the call by a modifier"),
        "fp_safemath_using_for.sol": ({2, 13}, "SafeMath bound with `using ... for`"),
        "fp_checked_call_value.sol": ({5, 35}, "call.value whose result is required"),
        "fp_private_variable.sol": ({37}, "private variable with an ordinary name"),
        "fp_tracked_approve.sol": ({15}, "approve paired with tracked transferFrom"),
    }
    for name, (ids, why) in cases.items():
        report = analyze_paths([CORPUS / name], Config(enable=frozenset(ids)))
        checks = ",".join(str(i) for i in sorted(ids))
        print(f"{name:<28} checks {checks:<5} {len(report.findings)} findings   ({why})")


if __name__ == "__main__":
    main()
