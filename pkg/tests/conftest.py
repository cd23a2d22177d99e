from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
CORPUS = FIXTURES / "corpus"
SECURE_TOKEN = FIXTURES / "secure_token.sol"
CATALOGUE_MD = ROOT / "paper.md"

sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture(scope="session")
def corpus_paths() -> list[Path]:
    from ercaudit.corpus import fixture_paths

    return fixture_paths(CORPUS)
