import numpy as np
import pytest

from linecont.curve import circle, ellipse


@pytest.fixture(scope="session")
def unit_circle():
    return circle(1.0)


@pytest.fixture(scope="session")
def ell():
    return ellipse(2.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def ellipse_support(a, b, t):
    """Closed-form support function, used as an independent oracle."""
    return np.sqrt((a * np.cos(t)) ** 2 + (b * np.sin(t)) ** 2)


def ellipse_point(a, b, t):
    """Boundary point with outward normal e^{it}, from the implicit equation."""
    h = ellipse_support(a, b, t)
    return (a * a * np.cos(t) + 1j * b * b * np.sin(t)) / h


@pytest.fixture
def acceptance_log(request):
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])
    return lines.append


def pytest_terminal_summary(terminalreporter, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
