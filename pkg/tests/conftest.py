from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def reference_tables() -> dict:
    return json.loads((FIXTURES / "reference_tables.json").read_text())


def write_prices(path: Path, closes, start: str = "2000-10-06") -> Path:
    dates = np.busday_offset(np.datetime64(start, "D"), np.arange(len(closes)), roll="forward")
    lines = ["date,close"] + [f"{d},{c:.17g}" for d, c in zip(dates, closes)]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def price_file(tmp_path):
    def make(closes, name="prices.csv", start="2000-10-06"):
        return write_prices(tmp_path / name, closes, start)
    return make


@pytest.fixture(scope="session")
def eighteen_year_prices(tmp_path_factory) -> Path:
    """4537 closes (4536 returns, an 18-year daily span) from a seeded heavy-tailed random walk."""
    rng = np.random.default_rng(2018)
    x = rng.standard_t(df=3, size=4536) * 0.01
    closes = 100.0 * np.exp(np.concatenate([[0.0], np.cumsum(x)]))
    return write_prices(tmp_path_factory.mktemp("fx") / "eighteen_year.csv", closes)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log() -> list[str]:
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split(".")[0].split("]")[1])):
            terminalreporter.write_line(line)
