"""Shared fixtures and brute-force oracles.

The oracles here never call the package's FFT or multiplier code: transforms
are explicit DFT sums and wavenumbers are enumerated by hand.
"""

import itertools

import numpy as np
import pytest

from mhdlimit.spectral import make_grid


def lattice_k(n):
    """Signed integer wavenumber for each FFT index, Nyquist kept as +n/2."""
    return np.array([i if i <= n // 2 else i - n for i in range(n)])


def dft_forward(values):
    """f̂(k) = n^-d Σ_x f(x) e^{-ik·x} by explicit summation (any d)."""
    n = values.shape[0]
    d = values.ndim
    x = 2 * np.pi * np.arange(n) / n
    k = lattice_k(n)
    E = np.exp(-1j * np.outer(k, x))  # (k, x)
    out = values.astype(complex)
    for axis in range(d):
        out = np.moveaxis(np.tensordot(E, np.moveaxis(out, axis, 0), axes=(1, 0)), 0, axis)
    return out / n**d


def dft_backward(coeffs):
    n = coeffs.shape[0]
    d = coeffs.ndim
    x = 2 * np.pi * np.arange(n) / n
    k = lattice_k(n)
    E = np.exp(1j * np.outer(x, k))  # (x, k)
    out = coeffs.astype(complex)
    for axis in range(d):
        out = np.moveaxis(np.tensordot(E, np.moveaxis(out, axis, 0), axes=(1, 0)), 0, axis)
    return out


def wavevectors(n, d):
    """Array (d, n, ..., n) of signed wavenumbers."""
    k = lattice_k(n)
    return np.array(np.meshgrid(*([k] * d), indexing="ij"))


def exact_derivative(coeffs, axis):
    """Physical-space ∂_axis by explicit DFT, Nyquist slot of that axis zeroed."""
    n = coeffs.shape[0]
    K = wavevectors(n, coeffs.ndim)[axis].astype(float)
    K[K == n // 2] = 0.0
    return dft_backward(1j * K * coeffs).real


def dealias_cube(coeffs):
    n = coeffs.shape[0]
    K = wavevectors(n, coeffs.ndim)
    keep = np.all(np.abs(K) <= n // 3, axis=0)
    return coeffs * keep


@pytest.fixture(scope="session")
def grid8():
    return make_grid(2, 8)


@pytest.fixture(scope="session")
def grid16():
    return make_grid(2, 16)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(2, 32)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(2, 64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def all_modes(n, d):
    k = lattice_k(n)
    return itertools.product(*([range(n)] * d)), k


# acceptance results, filled by test_acceptance.py and printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
