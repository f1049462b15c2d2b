from __future__ import annotations

import sys
from pathlib import Path

import pytest

from benchforge.sandbox import Supervisor

TESTS_DIR = Path(__file__).parent
REPO_ROOT = TESTS_DIR.parent
FIXTURES = REPO_ROOT / "fixtures"
FAKESHIM = TESTS_DIR / "fakeshim.py"


def fakeshim_cmd(*extra: str) -> list[str]:
    return [sys.executable, str(FAKESHIM), *extra]


@pytest.fixture(scope="session")
def supervisor():
    with Supervisor(shim_cmd=fakeshim_cmd(), workers=2) as sup:
        yield sup


@pytest.fixture()
def fresh_supervisor():
    with Supervisor(shim_cmd=fakeshim_cmd(), workers=2) as sup:
        yield sup
