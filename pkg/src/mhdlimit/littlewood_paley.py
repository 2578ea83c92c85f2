"""Dyadic Littlewood-Paley machinery on the torus lattice.

The low-pass profile is the smooth ramp

    χ(ξ) = g((4/3 - |ξ|) / (4/3 - 3/4)),   g(t) = ψ(t) / (ψ(t) + ψ(1 - t)),   ψ(t) = e^{-1/t} (t > 0),

so χ ≡ 1 on |ξ| ≤ 3/4 and χ ≡ 0 on |ξ| ≥ 4/3, and φ(ξ) = χ(ξ/2) - χ(ξ) lives on
the ring 3/4 ≤ |ξ| ≤ 8/3.  Nonhomogeneous blocks are Δ_{-1} = χ(D),
Δ_j = φ(2^{-j}D) for j ≥ 0 and Δ_j = 0 for j ≤ -2; homogeneous blocks use
φ(2^{-j}D) for every j.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .spectral import (
    DOMAIN_LENGTH,
    SpectralField,
    TorusGrid,
    VectorField,
    _check_grid,
    _lp_of_magnitude,
    advect_coeffs,
)

__all__ = [
    "CHI_INNER",
    "CHI_OUTER",
    "smooth_step",
    "chi_profile",
    "phi_profile",
    "BesovIndex",
    "LPFilterBank",
    "LPDecomposition",
    "build_filter_bank",
    "dyadic_block",
    "low_pass",
    "decompose",
    "block_norms",
    "besov_norm",
    "sobolev_norm_direct",
    "paraproduct",
    "paraproduct_term",
    "remainder",
    "commutator_block",
    "commutator_norm",
]

CHI_INNER = 3.0 / 4.0
CHI_OUTER = 4.0 / 3.0


def smooth_step(t):
    """C^∞ step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def chi_profile(r):
    """Radial low-pass profile χ evaluated at |ξ| = r."""
    return smooth_step((CHI_OUTER - np.asarray(r, dtype=float)) / (CHI_OUTER - CHI_INNER))


def phi_profile(r):
    """Radial ring profile φ(ξ) = χ(ξ/2) - χ(ξ) evaluated at |ξ| = r."""
    r = np.asarray(r, dtype=float)
    return chi_profile(r / 2.0) - chi_profile(r)


@dataclass(frozen=True)
class BesovIndex:
    """Regularity s, integrability p and summation exponent r of B^s_{p,r}."""

    s: float
    p: float = 2.0
    r: float = 2.0

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"integrability p must lie in [1, inf], got {self.p}")
        if not self.r >= 1:
            raise ValueError(f"summation exponent r must lie in [1, inf], got {self.r}")

    def critical(self, d: int) -> float:
        return d / self.p + 1.0

    def admissible(self, d: int) -> bool:
        """(s > d/p + 1 and 1 < r < inf) or (s = d/p + 1 and r = 1)."""
        crit = self.critical(d)
        if self.s > crit and 1 < self.r < np.inf:
            return True
        return bool(np.isclose(self.s, crit, rtol=0, atol=1e-12) and self.r == 1)

    def shifted(self, ds: float) -> BesovIndex:
        return BesovIndex(self.s + ds, self.p, self.r)

    @classmethod
    def parse(cls, text: str) -> BesovIndex:
        parts = [t.strip() for t in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"Besov index must be 's,p,r', got {text!r}")
        return cls(*(float(t) for t in parts))

    def __str__(self) -> str:
        return f"{self.s:g},{self.p:g},{self.r:g}"


class LPFilterBank:
    """Sampled χ and φ(2^{-j}·) multipliers for j = -1 … j_max on a grid lattice.

    j_max is the smallest index whose partial sum χ(2^{-(j_max+1)}ξ) equals one
    on the whole 2/3-rule cube, so the blocks resolve every dealiased mode.
    """

    def __init__(self, grid: TorusGrid):
        self.grid = grid
        reach = np.sqrt(grid.d) * grid.cutoff
        j_max = 0
        while CHI_INNER * 2.0 ** (j_max + 1) < reach:
            j_max += 1
        self.j_max = j_max
        km = grid.k_magnitude
        self.chi = _frozen(chi_profile(km))
        self.phi = tuple(_frozen(phi_profile(km / 2.0**j)) for j in range(j_max + 1))

    @property
    def block_indices(self) -> range:
        return range(-1, self.j_max + 1)

    def multiplier(self, j: int, homogeneous: bool = False) -> np.ndarray:
        """Fourier multiplier of Δ_j (or of the homogeneous Δ̇_j)."""
        if homogeneous:
            if 0 <= j <= self.j_max:
                return self.phi[j]
            return _frozen(phi_profile(self.grid.k_magnitude / 2.0**j))
        if j <= -2:
            return np.zeros(self.grid.shape)
        if j > self.j_max:
            raise ValueError(f"block index {j} exceeds j_max = {self.j_max} for n = {self.grid.n}")
        return self.chi if j == -1 else self.phi[j]

    def low_pass_multiplier(self, j: int) -> np.ndarray:
        """χ(2^{-j}ξ) for j >= 0; zero for j < 0 (S_j = Σ_{j' <= j-1} Δ_{j'})."""
        if j < 0:
            return np.zeros(self.grid.shape)
        return self._low_pass[j] if j < len(self._low_pass) else _frozen(chi_profile(self.grid.k_magnitude / 2.0**j))

    @cached_property
    def _low_pass(self) -> tuple[np.ndarray, ...]:
        km = self.grid.k_magnitude
        return tuple(_frozen(chi_profile(km / 2.0**j)) for j in range(self.j_max + 2))

    def homogeneous_indices(self) -> range:
        """Homogeneous blocks touching the nonzero lattice: |k| >= 1 forces j >= -1."""
        return range(-1, self.j_max + 1)

    def partition_residual(self, radius: float | None = None) -> float:
        """max |χ + Σ φ_j - 1| over lattice points with |ξ| <= radius (default n/3)."""
        radius = self.grid.n / 3 if radius is None else radius
        total = self.chi + sum(self.phi)
        sel = self.grid.k_magnitude <= radius
        return float(np.max(np.abs(total[sel] - 1.0)))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def build_filter_bank(grid: TorusGrid) -> LPFilterBank:
    if grid.n < 8:
        raise ValueError("grid too small to host the j = 0 block (n < 8)")
    return LPFilterBank(grid)


# ---------------------------------------------------------------------------
# field plumbing
# ---------------------------------------------------------------------------

def _stack(f) -> tuple[TorusGrid, np.ndarray, bool]:
    """Normalise a scalar, vector, or sequence of fields to a component stack."""
    if isinstance(f, SpectralField):
        return f.grid, f.coeffs[None], f.real
    if isinstance(f, VectorField):
        return f.grid, f.coeffs, True
    if isinstance(f, (list, tuple)):
        grid = f[0].grid
        parts, real = [], True
        for g in f:
            _check_grid(grid, g.grid)
            g_grid, c, r = _stack(g)
            parts.append(c)
            real = real and r
        return grid, np.concatenate(parts), real
    raise TypeError(f"unsupported field type {type(f).__name__}")


def _rewrap(f, coeffs: np.ndarray):
    if isinstance(f, SpectralField):
        return SpectralField(f.grid, coeffs[0], real=f.real)
    if isinstance(f, VectorField):
        return VectorField(f.grid, coeffs, divergence_free=f.divergence_free)
    raise TypeError(f"unsupported field type {type(f).__name__}")


def dyadic_block(f, j: int, bank: LPFilterBank, homogeneous: bool = False):
    """Δ_j f (or Δ̇_j f when homogeneous)."""
    grid, c, _ = _stack(f)
    _check_grid(grid, bank.grid)
    return _rewrap(f, c * bank.multiplier(j, homogeneous))


def low_pass(f, j: int, bank: LPFilterBank):
    """S_j f = χ(2^{-j}D) f."""
    if j < 0:
        raise ValueError(f"low-pass index must be >= 0, got {j}")
    grid, c, _ = _stack(f)
    _check_grid(grid, bank.grid)
    return _rewrap(f, c * bank.low_pass_multiplier(j))


@dataclass
class LPDecomposition:
    """Blocks Δ_j f for j in ``indices``."""

    indices: list[int]
    blocks: list = field(repr=False)
    homogeneous: bool = False

    def reconstruct(self):
        out = self.blocks[0]
        for b in self.blocks[1:]:
            out = out + b
        return out


def decompose(f, bank: LPFilterBank, homogeneous: bool = False) -> LPDecomposition:
    js = list(bank.homogeneous_indices() if homogeneous else bank.block_indices)
    return LPDecomposition(js, [dyadic_block(f, j, bank, homogeneous) for j in js], homogeneous)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def block_norms(f, bank: LPFilterBank, p: float, homogeneous: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """(j values, ‖Δ_j f‖_{L^p}) with the Euclidean length taken over components pointwise."""
    grid, c, real = _stack(f)
    _check_grid(grid, bank.grid)
    js = np.array(list(bank.homogeneous_indices() if homogeneous else bank.block_indices))
    norms = np.empty(len(js))
    vol = DOMAIN_LENGTH**grid.d
    for i, j in enumerate(js):
        m = bank.multiplier(int(j), homogeneous)
        if p == 2:
            norms[i] = np.sqrt(vol * np.sum(np.abs(c * m) ** 2))
            continue
        vals = grid.backward(c * m)
        if real:
            mag = np.sqrt(np.sum(vals.real**2, axis=0))
        else:
            mag = np.sqrt(np.sum(np.abs(vals) ** 2, axis=0))
        norms[i] = _lp_of_magnitude(mag, p, grid.cell_volume)
    return js, norms


def _lr(seq: np.ndarray, r: float) -> float:
    if np.isinf(r):
        return float(np.max(seq, initial=0.0))
    return float(np.sum(seq**r) ** (1.0 / r))


def weighted_sequence_norm(js: np.ndarray, norms: np.ndarray, s: float, r: float) -> float:
    return _lr(2.0 ** (js * s) * norms, r)


def besov_norm(f, idx: BesovIndex, bank: LPFilterBank, homogeneous: bool = False) -> float:
    """‖(2^{js}‖Δ_j f‖_{L^p})_j‖_{ℓ^r} over j = -1 … j_max."""
    js, norms = block_norms(f, bank, idx.p, homogeneous)
    return weighted_sequence_norm(js, norms, idx.s, idx.r)


def sobolev_norm_direct(f, s: float) -> float:
    """(Σ_k (1+|k|²)^s |f̂(k)|² (2π)^d)^{1/2}, summed over components."""
    grid, c, _ = _stack(f)
    w = (1.0 + grid.k_squared) ** s
    return float(np.sqrt(DOMAIN_LENGTH**grid.d * np.sum(w * np.abs(c) ** 2)))


# ---------------------------------------------------------------------------
# Bony decomposition and commutators (scalar fields)
# ---------------------------------------------------------------------------

def _scalar_pair(u: SpectralField, v: SpectralField, bank: LPFilterBank) -> TorusGrid:
    if not isinstance(u, SpectralField) or not isinstance(v, SpectralField):
        raise TypeError("paraproduct and remainder act on scalar SpectralFields")
    _check_grid(u.grid, v.grid)
    _check_grid(u.grid, bank.grid)
    return u.grid


def _block_values(f: SpectralField, bank: LPFilterBank) -> list[np.ndarray]:
    vals = [f.grid.backward(f.coeffs * bank.multiplier(j)) for j in bank.block_indices]
    return [v.real for v in vals] if f.real else vals


def _finish(grid: TorusGrid, prod: np.ndarray, real: bool, dealias: bool = True) -> SpectralField:
    c = grid.forward(prod)
    if dealias:
        c = c * grid.dealias_mask
    return SpectralField(grid, c, real=real)


def paraproduct_term(u: SpectralField, v: SpectralField, j: int, bank: LPFilterBank,
                     dealias: bool = True) -> SpectralField:
    """The single summand S_{j-1}u · Δ_j v."""
    grid = _scalar_pair(u, v, bank)
    low = grid.backward(u.coeffs * bank.low_pass_multiplier(j - 1))
    blk = grid.backward(v.coeffs * bank.multiplier(j))
    real = u.real and v.real
    if real:
        low, blk = low.real, blk.real
    return _finish(grid, low * blk, real, dealias)


def paraproduct(u: SpectralField, v: SpectralField, bank: LPFilterBank) -> SpectralField:
    """T_u v = Σ_j S_{j-1}u Δ_j v, dealiased."""
    grid = _scalar_pair(u, v, bank)
    real = u.real and v.real
    vb = _block_values(v, bank)
    acc = np.zeros(grid.shape, dtype=float if real else complex)
    for i, j in enumerate(bank.block_indices):
        if j - 1 < 0:
            continue
        low = grid.backward(u.coeffs * bank.low_pass_multiplier(j - 1))
        acc = acc + (low.real if real else low) * vb[i]
    return _finish(grid, acc, real)


def remainder(u: SpectralField, v: SpectralField, bank: LPFilterBank) -> SpectralField:
    """R(u, v) = Σ_j Σ_{|k-j| <= 1} Δ_j u Δ_k v, dealiased."""
    grid = _scalar_pair(u, v, bank)
    real = u.real and v.real
    ub = _block_values(u, bank)
    vb = _block_values(v, bank)
    nb = len(ub)
    acc = np.zeros(grid.shape, dtype=float if real else complex)
    for i in range(nb):
        near = vb[i]
        if i > 0:
            near = near + vb[i - 1]
        if i + 1 < nb:
            near = near + vb[i + 1]
        acc = acc + ub[i] * near
    return _finish(grid, acc, real)


def commutator_block(v: VectorField, f: SpectralField, j: int, bank: LPFilterBank) -> SpectralField:
    """[v·∇, Δ_j] f = v·∇(Δ_j f) - Δ_j(v·∇f), products dealiased."""
    _check_grid(v.grid, f.grid)
    grid = v.grid
    if j <= -2:
        return SpectralField.zeros(grid)
    m = bank.multiplier(j)
    vv = v.values
    c = advect_coeffs(grid, vv, f.coeffs * m) - m * advect_coeffs(grid, vv, f.coeffs)
    return SpectralField(grid, c, real=f.real)


def commutator_norm(v: VectorField, f: SpectralField, idx: BesovIndex, bank: LPFilterBank) -> float:
    """‖(2^{jσ}‖[v·∇, Δ_j]f‖_{L^p})_{j >= -1}‖_{ℓ^r}."""
    _check_grid(v.grid, f.grid)
    grid = v.grid
    vv = v.values
    full = advect_coeffs(grid, vv, f.coeffs)
    js = np.array(list(bank.block_indices))
    norms = np.empty(len(js))
    for i, j in enumerate(js):
        m = bank.multiplier(int(j))
        c = advect_coeffs(grid, vv, f.coeffs * m) - m * full
        if idx.p == 2:
            norms[i] = np.sqrt(DOMAIN_LENGTH**grid.d * np.sum(np.abs(c) ** 2))
        else:
            norms[i] = _lp_of_magnitude(np.abs(grid.backward(c).real), idx.p, grid.cell_volume)
    return weighted_sequence_norm(js, norms, idx.s, idx.r)


def gradient_components(v: VectorField) -> list[SpectralField]:
    """The d² scalar fields ∂_j v^i, row-major in (i, j)."""
    grid = v.grid
    return [SpectralField(grid, m * c, real=True) for c in v.coeffs for m in grid.derivative_multipliers]


def sup_norm(f) -> float:
    """Grid max of the pointwise Euclidean length over components."""
    grid, c, real = _stack(f)
    vals = grid.backward(c)
    mag = np.sqrt(np.sum(vals.real**2 if real else np.abs(vals) ** 2, axis=0))
    return float(np.max(mag, initial=0.0))


def lipschitz_norm(f) -> float:
    """‖f‖_{L∞} + ‖∇f‖_{L∞} with the Frobenius length of the gradient."""
    grid, c, _ = _stack(f)
    grads = np.concatenate([m * c for m in grid.derivative_multipliers])
    return sup_norm(f) + float(np.max(np.sqrt(np.sum(grid.backward(grads).real ** 2, axis=0))))
