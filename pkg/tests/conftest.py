import pytest

from rsdlab import validate_instance


@pytest.fixture
def all_prefer():
    """Three identical students, two unit-capacity schools."""
    return validate_instance(dict(n=3, m=2, capacities=[1, 1],
                                  preferences=[[0, 1], [0, 1], [0, 1]]))


@pytest.fixture
def split4():
    return validate_instance(dict(n=4, m=2, capacities=[1, 1],
                                  preferences=[[0, 1], [0, 1], [1, 0], [1, 0]]))


ACCEPTANCE_LINES = []


@pytest.fixture
def record(capsys):
    """Log one acceptance line: shown immediately and again in the terminal summary."""

    def _record(label, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] {label}: {detail}" if passed is not None else f"[INFO] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
