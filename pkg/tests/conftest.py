import pytest

from qndsqueeze.atomic import BeamGeometry, load_line

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def line():
    return load_line()


@pytest.fixture(scope="session")
def fig6_geometry():
    return BeamGeometry.from_waist(50e-6)


class AcceptanceLog:
    """Collects one verdict per criterion and asserts it."""

    def check(self, label, ok, detail=""):
        verdict = "PASS" if ok else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{verdict}] {label}: {detail}")
        assert ok, f"{label}: {detail}"


@pytest.fixture
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for text in _ACCEPTANCE_LINES:
        terminalreporter.write_line(text)
