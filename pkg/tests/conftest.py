import pytest
from hypothesis import HealthCheck, settings
from mpmath import mp

from qaw.numctx import make_context

settings.register_profile(
    "qaw",
    deadline=None,
    max_examples=25,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qaw")

ACCEPTANCE_LINES: dict = {}



@pytest.fixture
def ctx50():
    ctx = make_context(50)
    with ctx.activate():
        yield ctx


@pytest.fixture
def ctx30():
    ctx = make_context(30)
    with ctx.activate():
        yield ctx


@pytest.fixture(autouse=True)
def _restore_precision():
    dps = mp.dps
    yield
    mp.dps = dps


@pytest.fixture
def acceptance_log():
    """Record one summary line per acceptance criterion (printed at the end of the run)."""

    def record(key, passed, detail):
        ACCEPTANCE_LINES[key] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.split(".")[0]), k)):
        passed, detail = ACCEPTANCE_LINES[key]
        terminalreporter.write_line(f"criterion {key:>5}: {'PASS' if passed else 'FAIL'}  {detail}")
