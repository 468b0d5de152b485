import pytest

ACCEPTANCE = {}


@pytest.fixture
def record():
    """Store one summary line per acceptance criterion."""
    def add(number, text, result_lines):
        ACCEPTANCE[number] = (text, result_lines)
    return add


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        text, lines = ACCEPTANCE[number]
        tag = "PASS" if all(ok for ok, _ in lines) else "FAIL"
        terminalreporter.write_line("%s  criterion %2d: %s" % (tag, number, text))
        for _, line in lines:
            terminalreporter.write_line("          %s" % line)
