import numpy as np
import pytest

from cmcflux import twizzler as tw
from cmcflux.verify import twizzler_curve


@pytest.fixture(scope="session")
def twz():
    """The (R=1, H=1, c=0.3) generating curve used across modules."""
    return twizzler_curve(1.0, 1.0, 0.3)


@pytest.fixture(scope="session")
def helicoid_curve():
    return twizzler_curve(1.0, 0.0, 0.0)


@pytest.fixture(scope="session")
def twz_surface(twz):
    return tw.build_surface(twz)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""

    def record(number, title, ok, detail):
        _ACCEPTANCE.append((number, title, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
