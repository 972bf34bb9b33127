import pytest

from repi.density import parse_family

BUILTIN_SPECS = (
    "gaussian mean=0 sd=1",
    "exponential rate=1",
    "laplace var=1",
    "uniform lo=0 hi=1",
    "gamma2 rate=1",
    "potential knots=-1:1,0:0,2:0.5",
)

CLOSED_FORM_SPECS = BUILTIN_SPECS[:5]


@pytest.fixture(params=BUILTIN_SPECS)
def builtin_family(request):
    return parse_family(request.param)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
