"""Check registry, configuration and the check runner."""

from __future__ import annotations

from .bundle import AnalysisBundle, Finding, build_bundle, build_bundles, bundle_from_text
from .config import Config, ConfigError, load_config, parse_ids
from .engine import NOT_ASSESSABLE, CheckRun, execute, run_checks
from .registry import CheckDescriptor, Marker, Severity, Strategy, descriptor, registry

__all__ = [
    "AnalysisBundle",
    "CheckDescriptor",
    "CheckRun",
    "Config",
    "ConfigError",
    "Finding",
    "Marker",
    "NOT_ASSESSABLE",
    "Severity",
    "Strategy",
    "build_bundle",
    "build_bundles",
    "bundle_from_text",
    "descriptor",
    "execute",
    "load_config",
    "parse_ids",
    "registry",
    "run_checks",
]
