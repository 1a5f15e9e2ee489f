import numpy as np

from pathexp.series import RawSeries


def geometric(rho, T=80, start=0, level=1.0, label="geo"):
    return RawSeries.from_values(level * rho ** np.arange(T, dtype=float), label=label, start=start)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
