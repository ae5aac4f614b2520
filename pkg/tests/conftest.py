import os

from hnrel import exactalg

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_report_header(config):
    forced = os.environ.get("HNREL_PURE_PYTHON", "")
    return f"hnrel kernel: {exactalg.KERNEL}" + (" (forced pure Python)" if forced else "")
