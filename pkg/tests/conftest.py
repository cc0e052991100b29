import pytest
from hypothesis import HealthCheck, settings

from qdspec.params import make_params
from qdspec.wavefunctions import WaveContext

# numerical properties are slow compared to hypothesis' defaults
settings.register_profile(
    "numerics", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("numerics")


@pytest.fixture(scope="session")
def p1():
    return make_params(1.0)


@pytest.fixture(scope="session")
def ctx1(p1):
    return WaveContext(p1)


_ACCEPTANCE_LINES: list = []


@pytest.fixture
def acceptance_log(capsys):
    """Print a criterion line straight to the terminal and keep it for the summary."""

    def log(line, details=()):
        _ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
            for d in details:
                print("    " + d)

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
