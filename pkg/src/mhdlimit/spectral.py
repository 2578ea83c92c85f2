"""Fourier substrate on the periodic torus [0, 2π)^d.

Conventions
-----------
Coefficients are normalised so that

    f(x) = Σ_k f̂(k) exp(i k·x),     f̂ = fftn(f) / n^d,

and integrals use plain dx over [0, 2π)^d, so ‖f‖²_{L²} = (2π)^d Σ_k |f̂(k)|².
The per-axis wavenumber lattice is {-n/2+1, ..., n/2}; the Nyquist slot carries
+n/2.  Quadratic products are dealiased with the 2/3 rule (modes with any
|k_i| > n/3 are zeroed).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.fft as sfft

__all__ = [
    "TorusGrid",
    "SpectralField",
    "VectorField",
    "make_grid",
    "derivative",
    "gradient",
    "divergence",
    "laplacian",
    "leray_project",
    "pressure_gradient",
    "advect",
    "dealias",
    "lp_norm",
    "l2_inner",
]

DOMAIN_LENGTH = 2.0 * np.pi
HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on [0, 2π)^d with n points per axis."""

    d: int
    n: int

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError(f"dimension d must be 2 or 3, got {self.d}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"points per axis n must be a power of two >= 8, got {self.n}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def size(self) -> int:
        return self.n**self.d

    @property
    def dx(self) -> float:
        return DOMAIN_LENGTH / self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.d

    @property
    def cutoff(self) -> int:
        """Largest retained |k_i| under the 2/3 rule."""
        return self.n // 3

    @cached_property
    def axis_wavenumbers(self) -> np.ndarray:
        k = np.fft.fftfreq(self.n, d=1.0 / self.n)
        k[self.n // 2] = self.n // 2
        k.setflags(write=False)
        return k

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Broadcast wavenumber arrays, one per axis, in FFT ordering."""
        out = []
        for axis in range(self.d):
            shape = [1] * self.d
            shape[axis] = self.n
            k = np.broadcast_to(self.axis_wavenumbers.reshape(shape), self.shape)
            out.append(k)
        return tuple(out)

    @cached_property
    def k_squared(self) -> np.ndarray:
        k2 = sum(k.astype(float) ** 2 for k in self.wavenumbers)
        k2.setflags(write=False)
        return k2

    @cached_property
    def k_magnitude(self) -> np.ndarray:
        km = np.sqrt(self.k_squared)
        km.setflags(write=False)
        return km

    @cached_property
    def inverse_k_squared(self) -> np.ndarray:
        # mean mode mapped to 0
        with np.errstate(divide="ignore"):
            inv = np.where(self.k_squared > 0, 1.0 / self.k_squared, 0.0)
        inv.setflags(write=False)
        return inv

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        for k in self.wavenumbers:
            mask &= np.abs(k) <= self.cutoff
        mask.setflags(write=False)
        return mask

    @cached_property
    def derivative_multipliers(self) -> tuple[np.ndarray, ...]:
        """i·k_axis with the Nyquist slot of that axis zeroed."""
        out = []
        for k in self.wavenumbers:
            m = 1j * np.where(np.abs(k) == self.n // 2, 0.0, k)
            m.setflags(write=False)
            out.append(m)
        return tuple(out)

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, ...]:
        x = np.arange(self.n) * self.dx
        return tuple(np.meshgrid(*([x] * self.d), indexing="ij"))

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Physical values -> normalised coefficients over the trailing d axes."""
        axes = tuple(range(-self.d, 0))
        return sfft.fftn(values, axes=axes, norm="forward")

    def backward(self, coeffs: np.ndarray) -> np.ndarray:
        axes = tuple(range(-self.d, 0))
        return sfft.ifftn(coeffs, axes=axes, norm="forward")

    def backward_real(self, coeffs: np.ndarray) -> np.ndarray:
        """Inverse transform of Hermitian coefficients, returning real values."""
        axes = tuple(range(-self.d, 0))
        half = coeffs[..., : self.n // 2 + 1]
        return sfft.irfftn(half, s=self.shape, axes=axes, norm="forward")

    def reflect(self, coeffs: np.ndarray) -> np.ndarray:
        """Return c(-k) laid out on the lattice of c(k)."""
        axes = tuple(range(-self.d, 0))
        return np.roll(np.flip(coeffs, axis=axes), 1, axis=axes)


@lru_cache(maxsize=None)
def make_grid(d: int, n: int) -> TorusGrid:
    """Build (or fetch the shared instance of) the d-dimensional grid with n points per axis."""
    if not isinstance(d, (int, np.integer)) or not isinstance(n, (int, np.integer)):
        raise TypeError("d and n must be integers")
    return TorusGrid(int(d), int(n))


def _is_hermitian(grid: TorusGrid, coeffs: np.ndarray) -> bool:
    scale = np.max(np.abs(coeffs), initial=0.0)
    if scale == 0.0:
        return True
    resid = np.max(np.abs(coeffs - np.conj(grid.reflect(coeffs))))
    return bool(resid <= HERMITIAN_RTOL * scale)


class SpectralField:
    """A scalar field held by its Fourier coefficients.

    Physical values are synthesised lazily and cached; real fields (Hermitian
    coefficients) expose real values, anything else exposes complex values.
    Instances are treated as immutable.
    """

    __slots__ = ("grid", "coeffs", "real", "_values")

    def __init__(self, grid: TorusGrid, coeffs: np.ndarray, real: bool | None = None):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != grid.shape:
            raise ValueError(f"coefficient shape {coeffs.shape} does not match grid {grid.shape}")
        coeffs.setflags(write=False)
        self.grid = grid
        self.coeffs = coeffs
        self.real = _is_hermitian(grid, coeffs) if real is None else bool(real)
        self._values = None

    @classmethod
    def from_values(cls, grid: TorusGrid, values: np.ndarray) -> SpectralField:
        values = np.asarray(values)
        if values.shape != grid.shape:
            raise ValueError(f"value shape {values.shape} does not match grid {grid.shape}")
        real = not np.iscomplexobj(values)
        field = cls(grid, grid.forward(values), real=real)
        v = values.astype(np.float64 if real else np.complex128, copy=True)
        v.setflags(write=False)
        field._values = v
        return field

    @classmethod
    def zeros(cls, grid: TorusGrid) -> SpectralField:
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128), real=True)

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = self.grid.backward_real(self.coeffs) if self.real else self.grid.backward(self.coeffs)
            v.setflags(write=False)
            self._values = v
        return self._values

    def __add__(self, other: SpectralField) -> SpectralField:
        _check_grid(self.grid, other.grid)
        return SpectralField(self.grid, self.coeffs + other.coeffs, real=self.real and other.real)

    def __sub__(self, other: SpectralField) -> SpectralField:
        _check_grid(self.grid, other.grid)
        return SpectralField(self.grid, self.coeffs - other.coeffs, real=self.real and other.real)

    def __mul__(self, alpha: float) -> SpectralField:
        real = self.real and np.isrealobj(alpha)
        return SpectralField(self.grid, self.coeffs * alpha, real=real)

    __rmul__ = __mul__

    def __neg__(self) -> SpectralField:
        return SpectralField(self.grid, -self.coeffs, real=self.real)

    def __repr__(self) -> str:
        return f"SpectralField(d={self.grid.d}, n={self.grid.n}, real={self.real})"


class VectorField:
    """d real components on a shared grid, stored as a stacked coefficient array.

    ``divergence_free`` is a certificate: when set, the spectral divergence has
    been checked (or made) negligible relative to the field size.
    """

    __slots__ = ("grid", "coeffs", "divergence_free", "_values")

    def __init__(self, grid: TorusGrid, coeffs: np.ndarray, divergence_free: bool = False):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        if coeffs.shape != (grid.d,) + grid.shape:
            raise ValueError(f"vector coefficient shape {coeffs.shape} does not match grid")
        coeffs.setflags(write=False)
        self.grid = grid
        self.coeffs = coeffs
        self.divergence_free = bool(divergence_free)
        self._values = None

    @classmethod
    def from_values(cls, grid: TorusGrid, values: np.ndarray, divergence_free: bool = False) -> VectorField:
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (grid.d,) + grid.shape:
            raise ValueError(f"vector value shape {values.shape} does not match grid")
        field = cls(grid, grid.forward(values), divergence_free=divergence_free)
        v = values.copy()
        v.setflags(write=False)
        field._values = v
        return field

    @classmethod
    def from_components(cls, components, divergence_free: bool = False) -> VectorField:
        components = list(components)
        grid = components[0].grid
        for c in components[1:]:
            _check_grid(grid, c.grid)
        return cls(grid, np.stack([c.coeffs for c in components]), divergence_free=divergence_free)

    @classmethod
    def zeros(cls, grid: TorusGrid) -> VectorField:
        return cls(grid, np.zeros((grid.d,) + grid.shape, dtype=np.complex128), divergence_free=True)

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            v = self.grid.backward_real(self.coeffs)
            v.setflags(write=False)
            self._values = v
        return self._values

    @property
    def components(self) -> list[SpectralField]:
        return [SpectralField(self.grid, c, real=True) for c in self.coeffs]

    def certify(self, rtol: float = 1e-10) -> VectorField:
        """Return a copy whose divergence_free flag reflects a numerical check."""
        return VectorField(self.grid, self.coeffs, divergence_free=_divergence_small(self.grid, self.coeffs, rtol))

    def __add__(self, other: VectorField) -> VectorField:
        _check_grid(self.grid, other.grid)
        return VectorField(self.grid, self.coeffs + other.coeffs,
                           divergence_free=self.divergence_free and other.divergence_free)

    def __sub__(self, other: VectorField) -> VectorField:
        _check_grid(self.grid, other.grid)
        return VectorField(self.grid, self.coeffs - other.coeffs,
                           divergence_free=self.divergence_free and other.divergence_free)

    def __mul__(self, alpha: float) -> VectorField:
        return VectorField(self.grid, self.coeffs * alpha, divergence_free=self.divergence_free)

    __rmul__ = __mul__

    def __neg__(self) -> VectorField:
        return VectorField(self.grid, -self.coeffs, divergence_free=self.divergence_free)

    def __repr__(self) -> str:
        return f"VectorField(d={self.grid.d}, n={self.grid.n}, divergence_free={self.divergence_free})"


def _check_grid(a: TorusGrid, b: TorusGrid) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: (d={a.d}, n={a.n}) vs (d={b.d}, n={b.n})")


# ---------------------------------------------------------------------------
# coefficient-level kernels (shared with the solver)
# ---------------------------------------------------------------------------

def divergence_coeffs(grid: TorusGrid, coeffs: np.ndarray) -> np.ndarray:
    return sum(m * c for m, c in zip(grid.derivative_multipliers, coeffs))


def _divergence_small(grid: TorusGrid, coeffs: np.ndarray, rtol: float) -> bool:
    div = grid.backward(divergence_coeffs(grid, coeffs)).real
    scale = np.max(np.abs(grid.backward(coeffs).real), initial=0.0)
    return bool(np.max(np.abs(div), initial=0.0) <= rtol * max(scale, np.finfo(float).tiny))


def project_coeffs(grid: TorusGrid, coeffs: np.ndarray) -> np.ndarray:
    """Apply Id - k kᵀ/|k|² mode-wise; the mean mode passes through."""
    k = grid.wavenumbers
    kdotv = sum(ki * ci for ki, ci in zip(k, coeffs))
    kdotv = kdotv * grid.inverse_k_squared
    return np.stack([ci - ki * kdotv for ki, ci in zip(k, coeffs)])


def gradient_values(grid: TorusGrid, coeffs: np.ndarray) -> np.ndarray:
    """Physical ∂_j c for every leading component; output shape (..., d, *grid.shape)."""
    return np.stack(
        [grid.backward_real(m * coeffs) for m in grid.derivative_multipliers], axis=coeffs.ndim - grid.d
    )


def advect_coeffs(grid: TorusGrid, v_values: np.ndarray, f_coeffs: np.ndarray) -> np.ndarray:
    """Dealiased coefficients of v·∇f; f may carry leading component axes."""
    grads = gradient_values(grid, f_coeffs)
    return grid.forward(_contract(v_values, grads, grid.d)) * grid.dealias_mask


def _contract(v_values: np.ndarray, grads: np.ndarray, d: int) -> np.ndarray:
    # grads has shape (..., d, *spatial); contract its axis -(d+1) with v's leading axis
    axis = grads.ndim - d - 1
    out = 0.0
    for j in range(v_values.shape[0]):
        out = out + v_values[j] * np.take(grads, j, axis=axis)
    return out


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def dealias(field):
    """Zero every mode with some |k_i| > n/3."""
    mask = field.grid.dealias_mask
    if isinstance(field, VectorField):
        return VectorField(field.grid, field.coeffs * mask, divergence_free=field.divergence_free)
    return SpectralField(field.grid, field.coeffs * mask, real=field.real)


def derivative(f: SpectralField, axis: int) -> SpectralField:
    """Spectral ∂_axis f; the Nyquist slot of the differentiated axis is zeroed."""
    grid = f.grid
    if not 0 <= axis < grid.d:
        raise IndexError(f"axis {axis} out of range for d={grid.d}")
    return SpectralField(grid, grid.derivative_multipliers[axis] * f.coeffs, real=f.real)


def gradient(f: SpectralField) -> VectorField:
    grid = f.grid
    return VectorField(grid, np.stack([m * f.coeffs for m in grid.derivative_multipliers]))


def divergence(v: VectorField) -> SpectralField:
    return SpectralField(v.grid, divergence_coeffs(v.grid, v.coeffs), real=True)


def laplacian(f):
    if isinstance(f, VectorField):
        return VectorField(f.grid, -f.grid.k_squared * f.coeffs, divergence_free=f.divergence_free)
    return SpectralField(f.grid, -f.grid.k_squared * f.coeffs, real=f.real)


def leray_project(v: VectorField) -> VectorField:
    """Orthogonal projection onto divergence-free fields, Id - ∇(-Δ)⁻¹div."""
    return VectorField(v.grid, project_coeffs(v.grid, v.coeffs), divergence_free=True)


def advect(v: VectorField, f):
    """Dealiased pseudo-spectral product v·∇f for a scalar or vector f."""
    _check_grid(v.grid, f.grid)
    grid = v.grid
    if isinstance(f, VectorField):
        return VectorField(grid, advect_coeffs(grid, v.values, f.coeffs))
    return SpectralField(grid, advect_coeffs(grid, v.values, f.coeffs), real=f.real)


def pressure_gradient(u: VectorField, w: VectorField) -> VectorField:
    """∇(-Δ)⁻¹div(u·∇w), the gradient part of the dealiased advection u·∇w."""
    _check_grid(u.grid, w.grid)
    grid = u.grid
    n_hat = advect_coeffs(grid, u.values, w.coeffs)
    # i k (i k·N)/|k|^2 = -(k kᵀ/|k|²) N
    return VectorField(grid, project_coeffs(grid, n_hat) - n_hat)


def lp_norm(f, p: float = 2.0) -> float:
    """Physical-space L^p norm (Σ|f|^p Δx)^{1/p}; vector fields use the pointwise Euclidean length."""
    if p < 1:
        raise ValueError(f"exponent p must be >= 1, got {p}")
    if isinstance(f, VectorField):
        mag = np.sqrt(np.sum(f.values**2, axis=0))
    else:
        mag = np.abs(f.values)
    return _lp_of_magnitude(mag, p, f.grid.cell_volume)


def _lp_of_magnitude(mag: np.ndarray, p: float, cell_volume: float) -> float:
    if np.isinf(p):
        return float(np.max(mag, initial=0.0))
    if p == 2:
        return float(np.sqrt(np.sum(mag * mag) * cell_volume))
    if p == 1:
        return float(np.sum(mag) * cell_volume)
    return float((np.sum(mag**p) * cell_volume) ** (1.0 / p))


def l2_inner(f, g) -> float:
    """Real L² inner product ∫ f·g dx computed from coefficients."""
    _check_grid(f.grid, g.grid)
    return float(np.real(np.sum(f.coeffs * np.conj(g.coeffs))) * (DOMAIN_LENGTH ** f.grid.d))
