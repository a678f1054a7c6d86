from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np
import pytest

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

from kstab import burns_simanca as bs  # noqa: E402
from kstab.action_algebra import element_coordinates  # noqa: E402
from kstab.kahler_models import ModelSpec  # noqa: E402

DEMO_DIR = TESTS.parent / "src" / "kstab" / "demos"
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def frozen() -> dict:
    return json.loads((TESTS / "frozen_oracles.json").read_text())


@pytest.fixture(scope="session")
def demos() -> dict:
    return {p.stem: ModelSpec.load(p) for p in sorted(DEMO_DIR.glob("*.json"))}


@pytest.fixture(scope="session")
def profile3():
    return bs.solve_profile(3)


def diag_element(model, *diagonals) -> np.ndarray:
    """Coordinates of the element with the given diagonal blocks."""
    return element_coordinates(model.algebra, [np.diag(np.asarray(d, float)) for d in diagonals])


class Ctx:
    """Minimal context accepted by the gluing functions."""

    def __init__(self, model, p, eps):
        self.model, self.p, self.eps = model, p, eps


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
