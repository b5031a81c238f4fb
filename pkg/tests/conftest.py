import numpy as np
import pytest

from phaseless1d import potential as P


def barrier_matching(V0, L, k):
    """(r, t) for a square barrier on [0, L] by solving the 4x4 plane-wave matching system."""
    q = np.sqrt(complex(k * k - V0))
    eq, ek = np.exp(1j * q * L), np.exp(1j * k * L)
    M = np.array([
        [1, -1, -1, 0],
        [-1j * k, -1j * q, 1j * q, 0],
        [0, eq, 1 / eq, -ek],
        [0, 1j * q * eq, -1j * q / eq, -1j * k * ek],
    ])
    r, _, _, t = np.linalg.solve(M, [-1, -1j * k, 0, 0])
    return r, t


def barrier_closed_form(V0, L, k):
    """Textbook rectangular-barrier amplitudes (q = sqrt(k^2 - V0), complex when tunnelling)."""
    q = np.sqrt(complex(k * k - V0))
    D = np.cos(q * L) - 1j * (k * k + q * q) / (2 * k * q) * np.sin(q * L)
    return -1j * V0 * np.sin(q * L) / (2 * k * q) / D, np.exp(-1j * k * L) / D


def preset_suite():
    xs = np.linspace(0.0, 2.0, 41)
    return {
        "square": P.square_barrier(2.0, 1.0),
        "double": P.double_barrier(1.5, 0.5, 0.7),
        "gaussian": P.truncated_gaussian(1.5, 1.0, 0.3),
        "grid": P.grid_sampled(xs, 1 + np.sin(3 * xs) ** 2),
        "steps": P.piecewise_constant([(0.0, 0.5, 5.0), (0.5, 1.2, -1.0), (1.2, 2.0, 3.0)]),
        "shifted": P.translate(P.square_barrier(1.0, 1.0), 0.7),
    }


@pytest.fixture(scope="session")
def presets():
    return preset_suite()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
