import math

import pytest

from bentlattice import WaveguideSpec, build_layout, solve_mode

WAVELENGTH = 0.8e-6
N_SITES, CORNER, LENGTH = 9, 5, 10.0


def pi32(n):
    return n * math.pi / 32


@pytest.fixture(scope="session")
def asym_spec():
    return WaveguideSpec.from_microns(6.0, 2.0, 1.444, 1e-3)


@pytest.fixture(scope="session")
def sym_spec():
    return WaveguideSpec.from_microns(6.0, 6.0, 1.444, 1e-3)


@pytest.fixture(scope="session")
def asym_mode(asym_spec):
    return solve_mode(asym_spec, WAVELENGTH)


@pytest.fixture(scope="session")
def sym_mode(sym_spec):
    return solve_mode(sym_spec, WAVELENGTH)


@pytest.fixture(scope="session")
def layouts(asym_spec, sym_spec):
    """Lazily built reference layouts keyed by (spec name, angle in pi/32)."""
    cache = {}
    specs = {"asym": asym_spec, "sym": sym_spec}

    def get(n, kind="asym"):
        key = (kind, n)
        if key not in cache:
            cache[key] = build_layout(N_SITES, CORNER, pi32(n), LENGTH, specs[kind], WAVELENGTH)
        return cache[key]

    return get


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
