import os

from hypothesis import HealthCheck, settings

settings.register_profile("lab", max_examples=int(os.environ.get("HYPOTHESIS_EXAMPLES", "25")),
                          deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
