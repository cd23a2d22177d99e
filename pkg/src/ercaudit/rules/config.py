"""Thresholds, severity overrides and check selection."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

from .registry import Severity, registry

DEFAULT_ALLOWLIST = frozenset(
    {
        # the six ERC-20 methods and optional metadata getters
        "totalSupply", "balanceOf", "transfer", "transferFrom", "approve", "allowance",
        "name", "symbol", "decimals",
        "increaseAllowance", "decreaseAllowance",
        # fail-safe, withdrawal and fixed-price exchange surface
        "pause", "unpause", "withdraw", "buy", "sell",
    }
)


class ConfigError(ValueError):
    pass


def parse_version(text: str) -> tuple[int, int, int]:
    parts = text.strip().split(".")
    try:
        nums = [int(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"bad version {text!r}") from exc
    if not 1 <= len(nums) <= 3 or any(n < 0 for n in nums):
        raise ConfigError(f"bad version {text!r}")
    nums += [0] * (3 - len(nums))
    return nums[0], nums[1], nums[2]


def parse_ids(text: str) -> set[int]:
    out: set[int] = set()
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part:
            a, b = part.split("-", 1)
            try:
                lo, hi = int(a), int(b)
            except ValueError as exc:
                raise ConfigError(f"bad check range {part!r}") from exc
            if lo > hi:
                raise ConfigError(f"empty check range {part!r}")
            out.update(range(lo, hi + 1))
        else:
            try:
                out.add(int(part))
            except ValueError as exc:
                raise ConfigError(f"bad check id {part!r}") from exc
    bad = sorted(i for i in out if not 1 <= i <= 82)
    if bad:
        raise ConfigError(f"unknown check ids {bad}")
    return out


@dataclass(frozen=True)
class Config:
    pragma_min: tuple[int, int, int] = (0, 5, 11)
    literal_digits: int = 7
    fallback_statements: int = 3
    nesting_depth: int = 4
    allowlist: frozenset[str] = DEFAULT_ALLOWLIST
    severity_overrides: dict[int, Severity] = field(default_factory=dict)
    enable: frozenset[int] = frozenset()
    disable: frozenset[int] = frozenset()
    min_severity: Severity = Severity.LOW

    def severity(self, check_id: int, default: Severity) -> Severity:
        return self.severity_overrides.get(check_id, default)

    def selection(self) -> set[int]:
        base = {d.id for d in registry() if d.enabled_default}
        if self.enable:
            base = set(self.enable)
        return base - set(self.disable)

    def merged(self, **overrides) -> Config:
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **clean)


def load_config(path: Optional[str | Path] = None, text: Optional[str] = None) -> Config:
    """Read ``key = value`` lines; ``severity.<id> = <level>`` overrides a check's severity."""
    if text is None:
        if path is None:
            return Config()
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=", ":"))
    parser.optionxform = str  # keep key case
    try:
        parser.read_string("[ercaudit]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    section = parser["ercaudit"]
    kwargs: dict = {}
    severities: dict[int, Severity] = {}
    for key, value in section.items():
        k = key.strip().lower().replace("-", "_")
        try:
            if k == "pragma_min":
                kwargs["pragma_min"] = parse_version(value)
            elif k in ("literal_digits", "fallback_statements", "nesting_depth"):
                kwargs[k] = int(value)
            elif k == "allowlist":
                kwargs["allowlist"] = frozenset(x.strip() for x in value.split(",") if x.strip())
            elif k in ("enable", "disable"):
                kwargs[k] = frozenset(parse_ids(value))
            elif k == "min_severity":
                kwargs["min_severity"] = Severity.parse(value)
            elif k.startswith("severity.") or k.startswith("severity_"):
                cid = int(k.split(".", 1)[-1] if "." in k else k.split("_", 1)[-1])
                if not 1 <= cid <= 82:
                    raise ConfigError(f"unknown check id {cid}")
                severities[cid] = Severity.parse(value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {value!r}") from exc
    if severities:
        kwargs["severity_overrides"] = severities
    return Config(**kwargs)


def ids_text(ids: Iterable[int]) -> str:
    return ",".join(str(i) for i in sorted(ids))
