import pytest

from bridge_et import solvent


@pytest.fixture(scope="session")
def geom():
    return solvent.TriadGeometry()


@pytest.fixture(scope="session")
def records():
    return solvent.table1()


@pytest.fixture(scope="session")
def mthf():
    return solvent.find_solvent("MTHF")


_ACCEPTANCE = {}


class _Criterion:
    """Collects one acceptance criterion's verdict and detail lines."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.passed = None
        self.lines = []

    def note(self, text):
        self.lines.append(text)

    def verdict(self, ok, summary):
        self.passed = bool(ok)
        line = f"criterion {self.number} [{'PASS' if ok else 'FAIL'}] {self.title}: {summary}"
        print(line)
        for extra in self.lines:
            print("    " + extra)
        return ok


@pytest.fixture
def criterion():
    def make(number, title):
        c = _Criterion(number, title)
        _ACCEPTANCE[number] = c
        return c

    return make


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        c = _ACCEPTANCE[number]
        status = "PASS" if c.passed else ("FAIL" if c.passed is False else "ERROR")
        terminalreporter.write_line(f"criterion {number} [{status}] {c.title}")
        for extra in c.lines:
            terminalreporter.write_line("    " + extra)
