from __future__ import annotations

import numpy as np
import pytest

from center_shadow.leaves import ModelSystem
from center_shadow.torus import AnosovMatrix


@pytest.fixture(scope="session")
def pillow():
    return ModelSystem.create("pillowcase")


@pytest.fixture(scope="session")
def trivial():
    return ModelSystem.create("trivial")


@pytest.fixture(scope="session")
def skewed():
    """Non-orthogonal splitting: C > 1 forces the iterate power N = 2."""
    return ModelSystem.create("pillowcase", AnosovMatrix(0, 1, -1, 3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_line():
    """Record one summary line per acceptance criterion; printed at the end of the session."""

    def record(number: int, title: str, passed: bool, detail: str) -> None:
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} ({detail})")

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
