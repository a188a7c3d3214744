import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fftesc.design import DitherSet  # noqa: E402

WINDFARM_BINS = (6, 17, 31, 39, 47, 11)
HEATEX_BINS = (6, 11, 17, 23, 31, 39, 47)
HEATEX_AMPS = (0.003, 0.002, 0.002, 0.002, 0.003, 0.003, 0.002)


@pytest.fixture
def windfarm_dithers() -> DitherSet:
    return DitherSet.from_pairs([(0.003, f"{b}/128") for b in WINDFARM_BINS])


@pytest.fixture
def heatex_dithers() -> DitherSet:
    return DitherSet.from_pairs([(a, f"{b}/128") for a, b in zip(HEATEX_AMPS, HEATEX_BINS)])


ACCEPTANCE_LINES: list[str] = []


def report(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
