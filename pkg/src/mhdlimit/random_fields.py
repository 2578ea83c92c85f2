"""Counter-based random band-limited fields.

Every lattice mode k draws its coefficients from a Philox generator keyed by the
seed, with the mode index and the stream id placed in the high counter words.
The draw for a mode therefore does not depend on the grid size, on the order of
enumeration, or on which other modes are requested: the same (seed, stream)
yields the same continuum field on every grid that resolves the band.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .spectral import SpectralField, TorusGrid, VectorField, project_coeffs

_OFFSET = 1 << 10


def _mode_index(k: tuple[int, ...]) -> int:
    idx = 0
    for i, ki in enumerate(k):
        idx += (ki + _OFFSET) * (2 * _OFFSET) ** i
    return idx


@lru_cache(maxsize=64)
def _half_lattice(d: int, k_min: float, k_max: float) -> tuple[tuple[int, ...], ...]:
    """Canonical representatives (first nonzero entry positive) with k_min <= |k| <= k_max."""
    kint = int(np.floor(k_max))
    out = []
    for k in itertools.product(range(-kint, kint + 1), repeat=d):
        nz = [c for c in k if c != 0]
        if not nz or nz[0] < 0:
            continue
        mag = np.sqrt(sum(c * c for c in k))
        if k_min <= mag <= k_max:
            out.append(k)
    return tuple(out)


def random_coefficients(
    grid: TorusGrid,
    seed: int,
    stream: int,
    band: tuple[float, float],
    gamma: float,
    components: int,
) -> np.ndarray:
    """Hermitian coefficient stack (components, *grid.shape) with |f̂(k)| ~ |k|^-gamma on the band."""
    k_min, k_max = float(band[0]), float(band[1])
    if not 0 <= k_min <= k_max:
        raise ValueError(f"empty band [{k_min}, {k_max}]")
    if k_max > grid.n / 3:
        raise ValueError(f"band upper edge {k_max} exceeds the dealiasing cutoff n/3 = {grid.n / 3:.3f}")
    modes = _half_lattice(grid.d, k_min, k_max)
    if not modes:
        raise ValueError(f"band [{k_min}, {k_max}] contains no lattice modes")

    coeffs = np.zeros((components,) + grid.shape, dtype=np.complex128)
    n = grid.n
    for k in modes:
        bitgen = np.random.Philox(key=int(seed), counter=[0, 0, _mode_index(k), int(stream)])
        z = np.random.Generator(bitgen).standard_normal(2 * components)
        amp = np.sqrt(sum(c * c for c in k)) ** (-gamma) / np.sqrt(2.0)
        val = amp * (z[:components] + 1j * z[components:])
        pos = tuple(c % n for c in k)
        neg = tuple((-c) % n for c in k)
        coeffs[(slice(None),) + pos] = val
        coeffs[(slice(None),) + neg] = np.conj(val)
    return coeffs


def random_scalar_field(grid, seed, stream=0, band=(1.0, 4.0), gamma=1.0) -> SpectralField:
    c = random_coefficients(grid, seed, stream, band, gamma, 1)[0]
    return SpectralField(grid, c, real=True)


def random_vector_field(grid, seed, stream=0, band=(1.0, 4.0), gamma=1.0, divergence_free=True) -> VectorField:
    c = random_coefficients(grid, seed, stream, band, gamma, grid.d)
    if divergence_free:
        c = project_coeffs(grid, c)
    return VectorField(grid, c, divergence_free=divergence_free)
