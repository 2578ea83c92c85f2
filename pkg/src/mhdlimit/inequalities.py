"""Empirical constants for the paraproduct, product, advection, pressure and commutator bounds.

Each inequality is evaluated as a ratio LHS/RHS on random band-limited fields.
The same continuum fields are sampled on grids n and 2n, so the maximum ratio
should not depend on resolution.  Constants are reported, never asserted.

Inequality ids:

===========================  ===================================================================
``paraproduct``              ‖T_u v‖_{B^s} ≤ C ‖u‖_{L∞} ‖v‖_{B^s}
``remainder``                ‖R(u,v)‖_{B^s} ≤ C ‖u‖_{L∞} ‖v‖_{B^s}                 (s > 0)
``remainder-negative``       ‖R(u,v)‖_{B^s_{p,r}} ≤ C ‖u‖_{B^{-1}_{∞,r}} ‖v‖_{B^{s+1}_{p,∞}}
``remainder-lipschitz``      ‖R(u,v)‖_{B^s} ≤ C (‖u‖_{L∞} + ‖∇u‖_{L∞}) ‖v‖_{B^{s-1}}   (s > 1)
``product``                  ‖uv‖_{B^s} ≤ C (‖u‖_{L∞}‖v‖_{B^s} + ‖v‖_{L∞}‖u‖_{B^s})
``advection``                ‖u·∇f‖_{B^{σ-1}} ≤ C ‖u‖_{B^{σ-1}} ‖f‖_{B^σ}           (div u = 0)
``pressure-upper``           ‖Π(u,v)‖_{B^σ} ≤ C (‖u‖_{C^{0,1}}‖v‖_{B^σ} + ‖v‖_{C^{0,1}}‖u‖_{B^σ})
``pressure-lower-uv``        ‖Π(u,v)‖_{B^{σ-1}} ≤ C ‖u‖_{B^{σ-1}} ‖v‖_{B^σ}
``pressure-lower-vu``        ‖Π(u,v)‖_{B^{σ-1}} ≤ C ‖v‖_{B^{σ-1}} ‖u‖_{B^σ}
``pressure-lower-min``       ‖Π(u,v)‖_{B^{σ-1}} ≤ C min of the two right sides above
``commutator``               ‖(2^{jσ}‖[v·∇, Δ_j]f‖_{L^p})_j‖_{ℓ^r} ≤ C N(∇v) ‖f‖_{B^σ}
===========================  ===================================================================

Here Π(u,v) = ∇(-Δ)^{-1}div(u·∇v).  The commutator's N(∇v) depends on σ:
‖∇v‖_{B^{d/p}_{p,∞}} + ‖∇v‖_{L∞} when σ < 1 + d/p, ‖∇v‖_{B^{d/p+1}_{p,∞}} when
σ = 1 + d/p and r > 1, and ‖∇v‖_{B^{σ-1}_{p,r}} otherwise.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .littlewood_paley import (
    BesovIndex,
    LPFilterBank,
    besov_norm,
    build_filter_bank,
    commutator_norm,
    gradient_components,
    lipschitz_norm,
    paraproduct,
    remainder,
    sup_norm,
)
from .csvio import format_row
from .random_fields import random_coefficients
from .spectral import SpectralField, TorusGrid, VectorField, advect, make_grid, pressure_gradient, project_coeffs

__all__ = [
    "INEQUALITIES",
    "DEFAULT_INDICES",
    "ConstantReport",
    "FieldSampler",
    "evaluate_ratio",
    "empirical_constant",
    "commutator_row",
    "VERIFY_SUITE",
    "run_suite",
]

SUP_BESOV_P = math.inf
ZERO_RHS = 1e-300


@dataclass
class ConstantReport:
    """Per-trial LHS/RHS ratios at one or more resolutions."""

    inequality_id: str
    idx: BesovIndex | None = None
    rows: list[tuple[int, int, float]] = field(default_factory=list)
    skipped: list[tuple[int, int]] = field(default_factory=list)
    constant: float | None = None
    parameters: list[float] | None = None
    fitted: list[float] | None = None

    def add(self, trial: int, n: int, ratio: float) -> None:
        self.rows.append((int(trial), int(n), float(ratio)))

    def skip(self, trial: int, n: int) -> None:
        self.skipped.append((int(trial), int(n)))

    @property
    def resolutions(self) -> list[int]:
        return sorted({n for _, n, _ in self.rows})

    def ratios(self, n: int | None = None) -> np.ndarray:
        return np.array([r for _, m, r in self.rows if n is None or m == n])

    def max_ratio(self, n: int | None = None) -> float:
        r = self.ratios(n)
        return float(np.max(r)) if len(r) else math.nan

    def stability(self) -> float:
        """Largest over smallest per-resolution max ratio (1 means identical)."""
        maxima = [self.max_ratio(n) for n in self.resolutions]
        if len(maxima) < 2:
            return 1.0
        lo, hi = min(maxima), max(maxima)
        if lo <= 0:
            return math.inf if hi > 0 else 1.0
        return hi / lo

    def csv_rows(self) -> list[list]:
        return [[self.inequality_id, t, n, r] for t, n, r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["inequality_id", "trial", "n", "ratio"])
        for row in self.csv_rows():
            w.writerow(format_row(row))
        return buf.getvalue()


class FieldSampler:
    """Band-limited random fields addressed by (trial, slot).

    Coefficients come from the counter-based generator, so trial t draws the
    same continuum functions on every grid that resolves the band.  The decay
    exponent varies per trial over ``gamma_range`` to spread the spectra.
    """

    def __init__(self, seed: int = 0, band: tuple[float, float] = (1.0, 5.0),
                 gamma_range: tuple[float, float] = (0.5, 3.0)):
        self.seed = int(seed)
        self.band = (float(band[0]), float(band[1]))
        self.gamma_range = gamma_range

    def gamma(self, trial: int) -> float:
        rng = np.random.default_rng([self.seed, int(trial)])
        return float(rng.uniform(*self.gamma_range))

    def _stream(self, trial: int, slot: int) -> int:
        return 16 * int(trial) + int(slot)

    def scalar(self, grid: TorusGrid, trial: int, slot: int) -> SpectralField:
        c = random_coefficients(grid, self.seed, self._stream(trial, slot), self.band, self.gamma(trial), 1)[0]
        return SpectralField(grid, c, real=True)

    def vector(self, grid: TorusGrid, trial: int, slot: int) -> VectorField:
        c = random_coefficients(grid, self.seed, self._stream(trial, slot), self.band, self.gamma(trial), grid.d)
        return VectorField(grid, project_coeffs(grid, c), divergence_free=True)


def _pressure(u: VectorField, v: VectorField) -> VectorField:
    return pressure_gradient(u, v)


def commutator_row(idx: BesovIndex, d: int) -> int:
    """Which of the three commutator bounds applies: 1, 2 or 3."""
    crit = 1.0 + d / idx.p
    if idx.s < crit - 1e-12:
        return 1
    if abs(idx.s - crit) <= 1e-12 and idx.r > 1:
        return 2
    return 3


def _commutator_rhs_norm(v: VectorField, idx: BesovIndex, bank: LPFilterBank) -> float:
    d = v.grid.d
    grads = gradient_components(v)
    row = commutator_row(idx, d)
    if row == 1:
        return besov_norm(grads, BesovIndex(d / idx.p, idx.p, math.inf), bank) + sup_norm(grads)
    if row == 2:
        return besov_norm(grads, BesovIndex(d / idx.p + 1, idx.p, math.inf), bank)
    return besov_norm(grads, BesovIndex(idx.s - 1, idx.p, idx.r), bank)


def _ratio_paraproduct(grid, sampler, trial, idx, bank):
    u, v = sampler.scalar(grid, trial, 0), sampler.scalar(grid, trial, 1)
    return besov_norm(paraproduct(u, v, bank), idx, bank), sup_norm(u) * besov_norm(v, idx, bank)


def _ratio_remainder(grid, sampler, trial, idx, bank):
    u, v = sampler.scalar(grid, trial, 0), sampler.scalar(grid, trial, 1)
    return besov_norm(remainder(u, v, bank), idx, bank), sup_norm(u) * besov_norm(v, idx, bank)


def _ratio_remainder_negative(grid, sampler, trial, idx, bank):
    u, v = sampler.scalar(grid, trial, 0), sampler.scalar(grid, trial, 1)
    rhs = (besov_norm(u, BesovIndex(-1.0, SUP_BESOV_P, idx.r), bank)
           * besov_norm(v, BesovIndex(idx.s + 1, idx.p, math.inf), bank))
    return besov_norm(remainder(u, v, bank), idx, bank), rhs


def _ratio_remainder_lipschitz(grid, sampler, trial, idx, bank):
    u, v = sampler.scalar(grid, trial, 0), sampler.scalar(grid, trial, 1)
    rhs = lipschitz_norm(u) * besov_norm(v, idx.shifted(-1.0), bank)
    return besov_norm(remainder(u, v, bank), idx, bank), rhs


def _ratio_product(grid, sampler, trial, idx, bank):
    u, v = sampler.scalar(grid, trial, 0), sampler.scalar(grid, trial, 1)
    uv = SpectralField.from_values(grid, u.values * v.values)
    uv = SpectralField(grid, uv.coeffs * grid.dealias_mask, real=True)
    rhs = sup_norm(u) * besov_norm(v, idx, bank) + sup_norm(v) * besov_norm(u, idx, bank)
    return besov_norm(uv, idx, bank), rhs


def _ratio_advection(grid, sampler, trial, idx, bank):
    u, f = sampler.vector(grid, trial, 0), sampler.scalar(grid, trial, 1)
    low = idx.shifted(-1.0)
    return besov_norm(advect(u, f), low, bank), besov_norm(u, low, bank) * besov_norm(f, idx, bank)


def _ratio_pressure_upper(grid, sampler, trial, idx, bank):
    u, v = sampler.vector(grid, trial, 0), sampler.vector(grid, trial, 1)
    rhs = lipschitz_norm(u) * besov_norm(v, idx, bank) + lipschitz_norm(v) * besov_norm(u, idx, bank)
    return besov_norm(_pressure(u, v), idx, bank), rhs


def _pressure_lower(which):
    def ratio(grid, sampler, trial, idx, bank):
        u, v = sampler.vector(grid, trial, 0), sampler.vector(grid, trial, 1)
        low = idx.shifted(-1.0)
        first = besov_norm(u, low, bank) * besov_norm(v, idx, bank)
        second = besov_norm(v, low, bank) * besov_norm(u, idx, bank)
        rhs = {"uv": first, "vu": second, "min": min(first, second)}[which]
        return besov_norm(_pressure(u, v), low, bank), rhs
    return ratio


def _ratio_commutator(grid, sampler, trial, idx, bank):
    v, f = sampler.vector(grid, trial, 0), sampler.scalar(grid, trial, 1)
    return commutator_norm(v, f, idx, bank), _commutator_rhs_norm(v, idx, bank) * besov_norm(f, idx, bank)


RatioFn = Callable[..., tuple[float, float]]

INEQUALITIES: dict[str, RatioFn] = {
    "paraproduct": _ratio_paraproduct,
    "remainder": _ratio_remainder,
    "remainder-negative": _ratio_remainder_negative,
    "remainder-lipschitz": _ratio_remainder_lipschitz,
    "product": _ratio_product,
    "advection": _ratio_advection,
    "pressure-upper": _ratio_pressure_upper,
    "pressure-lower-uv": _pressure_lower("uv"),
    "pressure-lower-vu": _pressure_lower("vu"),
    "pressure-lower-min": _pressure_lower("min"),
    "commutator": _ratio_commutator,
}

DEFAULT_INDICES: dict[str, BesovIndex] = {
    "paraproduct": BesovIndex(1.5, 2, 2),
    "remainder": BesovIndex(1.5, 2, 2),
    "remainder-negative": BesovIndex(1.5, 2, 2),
    "remainder-lipschitz": BesovIndex(2.5, 2, 2),
    "product": BesovIndex(1.5, 2, 2),
    "advection": BesovIndex(2.5, 2, 2),
    "pressure-upper": BesovIndex(2.5, 2, 2),
    "pressure-lower-uv": BesovIndex(2.5, 2, 2),
    "pressure-lower-vu": BesovIndex(2.5, 2, 2),
    "pressure-lower-min": BesovIndex(2.5, 2, 2),
    "commutator": BesovIndex(1.5, 2, 2),
}

_NEEDS_ADMISSIBLE = {"advection", "pressure-upper", "pressure-lower-uv", "pressure-lower-vu", "pressure-lower-min"}


def _check_hypotheses(ineq: str, idx: BesovIndex, d: int) -> None:
    if ineq in _NEEDS_ADMISSIBLE and not idx.admissible(d):
        raise ValueError(f"{ineq} needs an admissible index, got {idx} for d = {d}")
    if ineq in ("remainder", "product") and idx.s <= 0:
        raise ValueError(f"{ineq} needs s > 0, got {idx.s}")
    if ineq == "remainder-lipschitz" and idx.s <= 1:
        raise ValueError(f"{ineq} needs s > 1, got {idx.s}")
    if ineq == "commutator" and idx.s <= -d * min(1 - 1 / idx.p, 1 / idx.p):
        raise ValueError(f"commutator needs σ > -d·min(1-1/p, 1/p), got {idx}")


def evaluate_ratio(ineq: str, grid: TorusGrid, sampler, trial: int, idx: BesovIndex,
                   bank: LPFilterBank | None = None) -> tuple[float, float]:
    """(LHS, RHS) of one inequality on one trial."""
    if ineq not in INEQUALITIES:
        raise KeyError(f"unknown inequality id {ineq!r}; known: {sorted(INEQUALITIES)}")
    return INEQUALITIES[ineq](grid, sampler, trial, idx, bank or build_filter_bank(grid))


def empirical_constant(ineq: str, sampler=None, trials: int = 50, n: int = 32,
                       idx: BesovIndex | None = None, d: int = 2) -> ConstantReport:
    """Ratios LHS/RHS for ``trials`` draws at resolutions n and 2n.

    Trials whose right side vanishes are skipped and recorded.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    idx = idx or DEFAULT_INDICES[ineq]
    _check_hypotheses(ineq, idx, d)
    sampler = sampler or FieldSampler()
    report = ConstantReport(ineq, idx)
    for m in (n, 2 * n):
        grid = make_grid(d, m)
        bank = build_filter_bank(grid)
        for t in range(trials):
            lhs, rhs = evaluate_ratio(ineq, grid, sampler, t, idx, bank)
            if not np.isfinite(rhs) or rhs <= ZERO_RHS:
                report.skip(t, m)
                continue
            report.add(t, m, lhs / rhs)
    return report


VERIFY_SUITE: tuple[tuple[str, BesovIndex], ...] = tuple(DEFAULT_INDICES.items()) + (
    ("commutator", BesovIndex(2.0, 2, 2)),
    ("commutator", BesovIndex(2.0, 2, 1)),
    ("advection", BesovIndex(2.1, 4, 2)),
)


def run_suite(trials: int = 50, n: int = 32, seed: int = 0, suite=VERIFY_SUITE) -> list[ConstantReport]:
    sampler = FieldSampler(seed)
    return [empirical_constant(ineq, sampler, trials, n, idx) for ineq, idx in suite]
