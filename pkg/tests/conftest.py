import os
import sys

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

from irs_beamsim.env_model import SiteLayout, UEArea  # noqa: E402

WAVELENGTH = 0.0107


def open_layout(blockers=(), scatterers=(), bs=(20.0, 0.0, 6.0), irs=(0.0, 0.0, 5.0),
                wavelength=WAVELENGTH):
    """IRS on the x=0 wall looking along +x, BS facing it, 10 m x 10 m square."""
    return SiteLayout(bs, tuple(np.subtract(irs, bs)), irs, (1.0, 0.0, 0.0),
                      UEArea(3.0, 13.0, -5.0, 5.0, 1.5), tuple(blockers), tuple(scatterers), wavelength)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
