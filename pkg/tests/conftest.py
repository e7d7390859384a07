import pytest

from copula_mixing import Clayton, Frechet, HoeffdingM, HoeffdingW, Independence, Mardia

BUILTINS = {
    "indep": Independence(),
    "m": HoeffdingM(),
    "w": HoeffdingW(),
    "clayton1": Clayton(1.0),
    "clayton3": Clayton(3.0),
    "frechet": Frechet(0.3, 0.2),
    "mardia": Mardia(0.5),
}

# acceptance criterion outcomes, filled in by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture(params=list(BUILTINS), ids=list(BUILTINS))
def builtin(request):
    return BUILTINS[request.param]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}")
