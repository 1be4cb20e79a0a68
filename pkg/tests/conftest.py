import math

import pytest

from pfslit.config import bundled_config
from pfslit.core import BeamSpec, SlitGeometry
from pfslit.experiment import ScreenModel
from pfslit.wavefield import AngularDensityModel, FieldParams

ELECTRON = dict(lambda0=5e-12, mass=9.1093837015e-31, a0=10.0, width=0.5e-6, separation=2e-6,
                screen=0.35, theta_max=math.pi / 50000)
NEON = dict(lambda0=1.8e-8, mass=3.3198227949243484e-26, a0=1.0, width=2e-6, separation=6e-6,
            screen=0.113, theta_max=math.pi / 200)
PAPER_SETUPS = {"electron": ELECTRON, "neon": NEON}

_acceptance_lines = []


def beam_of(p):
    return BeamSpec(lambda0=p["lambda0"], mass=p["mass"], a0=p["a0"])


def geometry_of(p, separation=None):
    sep = p["separation"] if separation is None else separation
    return SlitGeometry.symmetric(p["width"], sep, p["screen"])


def model_of(p, mode="approximate", c_f=None, separation=None):
    c_f = 5e-5 * p["lambda0"] if c_f is None else c_f
    return AngularDensityModel(beam_of(p), geometry_of(p, separation), FieldParams(c_f),
                               p["theta_max"], mode)


@pytest.fixture(scope="session", params=["electron", "neon"])
def setup_name(request):
    return request.param


@pytest.fixture(scope="session")
def screens():
    return {name: ScreenModel(bundled_config(name)) for name in PAPER_SETUPS}


@pytest.fixture
def report():
    """Record one acceptance line; lines are echoed in the terminal summary."""
    def _report(tag, passed, detail):
        _acceptance_lines.append(f"[{'PASS' if passed else 'FAIL'}] {tag}: {detail}")
        print(_acceptance_lines[-1])
        return passed
    return _report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
