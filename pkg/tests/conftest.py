import math

import numpy as np
import pytest
from hypothesis import strategies as st

from bargmann import devices
from bargmann.transforms import QuadraticGenerator, quadratic_hamiltonian_kernel


def complexes(max_abs=1.0):
    return st.builds(
        lambda r, phi: r * complex(math.cos(phi), math.sin(phi)),
        st.floats(0.0, max_abs),
        st.floats(0.0, 2 * math.pi),
    )


def random_hermitian(rng, n, scale=0.5):
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (M + M.conj().T) / 2


def random_symmetric(rng, n, scale=0.3):
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (M + M.T) / 2


def random_quadratic_kernel(rng, n):
    gen = QuadraticGenerator(random_symmetric(rng, n), random_hermitian(rng, n), rng.uniform(0.2, 1.0))
    return quadratic_hamiltonian_kernel(gen)


def random_device_kernel(rng):
    """One-mode unitary kernel: a random product of devices."""
    choices = [
        lambda: devices.displacement_kernel(complex(*rng.uniform(-0.8, 0.8, 2))),
        lambda: devices.squeezer_kernel(rng.uniform(-0.6, 0.6)),
        lambda: devices.phase_shifter(rng.uniform(0, 2 * math.pi)),
        lambda: random_quadratic_kernel(rng, 1),
    ]
    return choices[rng.integers(len(choices))]()


# one line per acceptance criterion, shown after the test summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
