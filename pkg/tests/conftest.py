import pytest

from plurigreen.config import RunConfig, SearchBudget


@pytest.fixture
def cfg():
    return RunConfig()


@pytest.fixture
def quick_cfg():
    # small search budget for tests that run the disk engine many times
    return RunConfig(budget=SearchBudget(restarts=4, simplex_evals=200))


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one pass/fail line per acceptance criterion for the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
