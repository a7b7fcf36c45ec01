import numpy as np
import pytest

from fgmxfem.materials import FgmComposition, MaterialPhase, PRESETS
from fgmxfem.section import integrate_section


def homogeneous(E=70e9, nu=0.3, rho=2702.0):
    phase = MaterialPhase("iso", (E, 0.0, 0.0, 0.0, 0.0), nu, rho)
    return FgmComposition(phase, phase, 0.0)


@pytest.fixture
def iso_section():
    return integrate_section(homogeneous(), 0.1)


@pytest.fixture
def fgm_section():
    comp = FgmComposition(PRESETS["Al2O3"], PRESETS["Al"], 1.0)
    return integrate_section(comp, 0.1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail):
    """Store the one-line verdict of an acceptance criterion."""
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
