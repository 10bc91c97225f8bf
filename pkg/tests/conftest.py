import pytest

_ACCEPTANCE = []


class Criterion:
    def __init__(self, name):
        self.name = name

    def check(self, ok, detail):
        _ACCEPTANCE.append((self.name, bool(ok), detail))
        assert ok, f"{self.name}: {detail}"


@pytest.fixture
def criterion(request):
    return Criterion(request.node.name)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
