import cmath
import math

import numpy as np
import pytest


def naive_dft(d):
    """Entry-by-entry DFT using cmath, independent of numpy broadcasting."""
    return np.array(
        [[cmath.exp(2j * math.pi * m * n / d) / math.sqrt(d) for n in range(d)] for m in range(d)]
    )


def naive_output(lam):
    d = len(lam)
    f = naive_dft(d)
    return np.array([sum(f[m][n] * lam[n] for n in range(d)) / math.sqrt(d) for m in range(d)])


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
