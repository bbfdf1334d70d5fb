import pytest

from primeperiod import chaos, pipeline

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def default_trajectory():
    return chaos.integrate()


@pytest.fixture(scope="session")
def fig12(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig12")
    return pipeline.run_fig1_fig2(pipeline.ExperimentConfig(), out)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
