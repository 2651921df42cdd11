import numpy as np
import pytest

from ecoepi.model import ParameterSet

FIG1 = dict(m=1.35, a=0.29, b=0.25, r=3.2, beta=0.8, K=5000.0, mu=1.2)
FIG2 = dict(m=1.35, a=0.29, b=0.025, r=3.2, beta=0.8, K=5000.0, mu=2.2)
FIG3 = dict(m=0.35, a=9.4, b=0.025, r=0.2, beta=0.04, K=50000.0, mu=0.1)

VARIANTS = ("classical", "harmless", "avoided", "toxic")
ECO_VARIANTS = ("harmless", "avoided", "toxic")

# Moderate rates for random trajectories: keeps the explicit integrator out of stiff regimes.
DYNAMICS_RANGES = {
    "a": (0.05, 2.0),
    "b": (0.01, 1.0),
    "r": (0.1, 3.0),
    "K": (1.0, 50.0),
    "beta": (0.05, 1.5),
    "mu": (0.1, 3.0),
}


def params(fig, variant="toxic", **over):
    return ParameterSet(**{**fig, **over}, variant=variant)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


_acceptance_lines = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the terminal summary."""
    def record(number, title, passed, detail=""):
        mark = "PASS" if passed else "FAIL"
        _acceptance_lines.append(f"[{mark}] criterion {number}: {title}" + (f" -- {detail}" if detail else ""))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
