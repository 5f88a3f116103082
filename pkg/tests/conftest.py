import pytest

from ddzeta.continuation import EvalParams
from ddzeta.special_fn import PrecisionContext

# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def p40():
    return EvalParams(ctx=PrecisionContext(target_decimal=40))


@pytest.fixture(scope="session")
def p80():
    return EvalParams()
