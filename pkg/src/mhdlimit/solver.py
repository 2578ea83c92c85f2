"""Pseudo-spectral integration of viscous/resistive and ideal incompressible MHD.

The pressure is eliminated with the Leray projector, so the evolved system is

    ∂_t u = P(-u·∇u + b·∇b) + μΔu,
    ∂_t b = -u·∇b + b·∇u + νΔb.

Time stepping is classical RK4 applied in integrating-factor form, so the heat
semigroups e^{μtΔ}, e^{νtΔ} are integrated exactly and one dt serves a whole
viscosity sweep.  The same integrator drives the scalar transport-diffusion
equation ∂_t f + v·∇f - εΔf = g.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .spectral import (
    DOMAIN_LENGTH,
    SpectralField,
    TorusGrid,
    VectorField,
    _check_grid,
    divergence_coeffs,
    gradient_values,
    project_coeffs,
)

__all__ = [
    "SolverError",
    "CFLViolation",
    "BlowupError",
    "MHDState",
    "SolverConfig",
    "Trajectory",
    "rhs",
    "step",
    "solve",
    "solve_elsasser",
    "solve_transport_diffusion",
    "elsasser",
    "inverse_elsasser",
    "default_dt",
    "energy",
    "cross_helicity",
]

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Integration failure at simulation time ``t``."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} (t = {t:.17g})")
        self.message = message
        self.t = t


class CFLViolation(SolverError):
    pass


class BlowupError(SolverError):
    pass


@dataclass(frozen=True)
class MHDState:
    u: VectorField
    b: VectorField
    t: float = 0.0

    def __post_init__(self):
        _check_grid(self.u.grid, self.b.grid)

    @property
    def grid(self) -> TorusGrid:
        return self.u.grid

    @classmethod
    def zeros(cls, grid: TorusGrid, t: float = 0.0) -> MHDState:
        return cls(VectorField.zeros(grid), VectorField.zeros(grid), t)


@dataclass(frozen=True)
class SolverConfig:
    mu: float = 0.0
    nu: float = 0.0
    dt: float = 1e-3
    t_end: float = 0.5
    snapshot_stride: int = 10
    blowup_threshold: float = 100.0
    cfl_limit: float = 1.0

    def __post_init__(self):
        for name in ("mu", "nu"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"solver.{name} must be >= 0, got {getattr(self, name)}")
        for name in ("dt", "t_end", "blowup_threshold", "cfl_limit"):
            if not getattr(self, name) > 0:
                raise ValueError(f"solver.{name} must be > 0, got {getattr(self, name)}")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ValueError(f"solver.snapshot_stride must be a positive integer, got {self.snapshot_stride}")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))

    def replace(self, **changes) -> SolverConfig:
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        data.update(changes)
        return SolverConfig(**data)


@dataclass
class Trajectory:
    """Stored snapshots plus per-step scalar diagnostics."""

    snapshots: list
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return np.array([_time_of(s) for s in self.snapshots])

    @property
    def final(self):
        return self.snapshots[-1]

    def __len__(self) -> int:
        return len(self.snapshots)


def _time_of(s) -> float:
    return s.t if isinstance(s, MHDState) else s[0]


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def energy(state: MHDState) -> float:
    """½(‖u‖²_{L²} + ‖b‖²_{L²})."""
    vol = DOMAIN_LENGTH**state.grid.d
    return 0.5 * vol * float(np.sum(np.abs(state.u.coeffs) ** 2) + np.sum(np.abs(state.b.coeffs) ** 2))


def cross_helicity(state: MHDState) -> float:
    """∫ u·b dx."""
    vol = DOMAIN_LENGTH**state.grid.d
    return vol * float(np.real(np.sum(state.u.coeffs * np.conj(state.b.coeffs))))


def _max_magnitude(values: np.ndarray, lead: int) -> float:
    axes = tuple(range(lead))
    return float(np.sqrt(np.max(np.sum(values**2, axis=axes))))


# ---------------------------------------------------------------------------
# integrating-factor RK4 on coefficient stacks
# ---------------------------------------------------------------------------

class _IFRK4:
    """Integrating-factor RK4 for ∂_t y_i = N_i(y, t) - c_i |k|² y_i."""

    def __init__(self, grid: TorusGrid, diffusivities, dt: float, nonlinear):
        self.grid = grid
        self.dt = dt
        self.nonlinear = nonlinear
        k2 = grid.k_squared
        self.half = [np.exp(-c * k2 * dt / 2) for c in diffusivities]
        self.full = [h * h for h in self.half]

    def advance(self, ys: list[np.ndarray], t: float) -> list[np.ndarray]:
        dt, E, E2 = self.dt, self.half, self.full
        k1 = self.nonlinear(ys, t)
        k2 = self.nonlinear([e * (y + 0.5 * dt * a) for e, y, a in zip(E, ys, k1)], t + 0.5 * dt)
        k3 = self.nonlinear([e * y + 0.5 * dt * b for e, y, b in zip(E, ys, k2)], t + 0.5 * dt)
        k4 = self.nonlinear([e2 * y + dt * e * c for e, e2, y, c in zip(E, E2, ys, k3)], t + dt)
        return [
            e2 * y + (dt / 6.0) * (e2 * a + 2.0 * e * (b + c) + d)
            for e, e2, y, a, b, c, d in zip(E, E2, ys, k1, k2, k3, k4)
        ]


def _mhd_nonlinear(grid: TorusGrid):
    mask = grid.dealias_mask

    def nonlinear(ys, t):
        u_hat, b_hat = ys
        u = grid.backward_real(u_hat)
        b = grid.backward_real(b_hat)
        gu = gradient_values(grid, u_hat)  # (i, j, ...) = ∂_j u_i
        gb = gradient_values(grid, b_hat)
        nu_phys = 0.0
        nb_phys = 0.0
        for j in range(grid.d):
            nu_phys = nu_phys - u[j] * gu[:, j] + b[j] * gb[:, j]
            nb_phys = nb_phys - u[j] * gb[:, j] + b[j] * gu[:, j]
        nu_hat = project_coeffs(grid, grid.forward(nu_phys) * mask)
        nb_hat = grid.forward(nb_phys) * mask
        return [nu_hat, nb_hat]

    return nonlinear


def _elsasser_nonlinear(grid: TorusGrid):
    mask = grid.dealias_mask

    def nonlinear(ys, t):
        zp_hat, zm_hat = ys
        zp = grid.backward_real(zp_hat)
        zm = grid.backward_real(zm_hat)
        gp = gradient_values(grid, zp_hat)
        gm = gradient_values(grid, zm_hat)
        np_phys = 0.0
        nm_phys = 0.0
        for j in range(grid.d):
            np_phys = np_phys - zm[j] * gp[:, j]
            nm_phys = nm_phys - zp[j] * gm[:, j]
        return [project_coeffs(grid, grid.forward(np_phys) * mask),
                project_coeffs(grid, grid.forward(nm_phys) * mask)]

    return nonlinear


def rhs(state: MHDState, mu: float, nu: float) -> tuple[VectorField, VectorField]:
    """(du/dt, db/dt) with the pressure eliminated by Leray projection."""
    grid = state.grid
    nu_hat, nb_hat = _mhd_nonlinear(grid)([state.u.coeffs, state.b.coeffs], state.t)
    k2 = grid.k_squared
    du = VectorField(grid, nu_hat - mu * k2 * state.u.coeffs, divergence_free=True)
    db = VectorField(grid, nb_hat - nu * k2 * state.b.coeffs)
    return du, db


class _Monitor:
    """Per-step diagnostics, CFL check, and blowup guard for an MHD pair."""

    def __init__(self, grid: TorusGrid, config: SolverConfig, pair_names=("u", "b")):
        self.grid = grid
        self.config = config
        self.rows: dict[str, list[float]] = {
            k: [] for k in ("t", "energy", "cross_helicity", "max_gradient", "dissipation", "divergence", "cfl")
        }

    def record(self, u_hat: np.ndarray, b_hat: np.ndarray, t: float, check: bool = True) -> None:
        grid, cfg = self.grid, self.config
        vol = DOMAIN_LENGTH**grid.d
        eu = np.abs(u_hat) ** 2
        eb = np.abs(b_hat) ** 2
        k2 = grid.k_squared
        u = grid.backward_real(u_hat)
        b = grid.backward_real(b_hat)
        speed = _max_magnitude(u, 1) + _max_magnitude(b, 1)
        grad = _max_magnitude(gradient_values(grid, u_hat), 2) + _max_magnitude(gradient_values(grid, b_hat), 2)
        div = 0.0
        for c, phys in ((u_hat, u), (b_hat, b)):
            scale = np.max(np.abs(phys), initial=0.0)
            if scale > 0:
                div = max(div, float(np.max(np.abs(grid.backward_real(divergence_coeffs(grid, c))))) / scale)
        cfl = cfg.dt * speed / grid.dx
        r = self.rows
        r["t"].append(t)
        r["energy"].append(0.5 * vol * float(eu.sum() + eb.sum()))
        r["cross_helicity"].append(vol * float(np.real(np.sum(u_hat * np.conj(b_hat)))))
        r["max_gradient"].append(grad)
        r["dissipation"].append(vol * float(np.sum(k2 * (cfg.mu * eu + cfg.nu * eb))))
        r["divergence"].append(div)
        r["cfl"].append(cfl)
        if not check:
            return
        if not math.isfinite(grad) or grad > cfg.blowup_threshold:
            raise BlowupError(
                f"blowup guard tripped: ‖∇u‖∞ + ‖∇b‖∞ = {grad:.6g} > {cfg.blowup_threshold:g}", t
            )
        if cfl > cfg.cfl_limit:
            raise CFLViolation(f"CFL number {cfl:.4g} exceeds limit {cfg.cfl_limit:g} (dt = {cfg.dt:g})", t)

    def arrays(self) -> dict[str, np.ndarray]:
        return {k: np.asarray(v) for k, v in self.rows.items()}


def _reproject(grid, u_hat, b_hat):
    return project_coeffs(grid, u_hat), project_coeffs(grid, b_hat)


def step(state: MHDState, config: SolverConfig) -> MHDState:
    """Advance one dt, after checking the CFL condition and the blowup guard at the start state."""
    grid = state.grid
    mon = _Monitor(grid, config)
    mon.record(state.u.coeffs, state.b.coeffs, state.t)
    integ = _IFRK4(grid, (config.mu, config.nu), config.dt, _mhd_nonlinear(grid))
    u_hat, b_hat = integ.advance([state.u.coeffs, state.b.coeffs], state.t)
    u_hat, b_hat = _reproject(grid, u_hat, b_hat)
    return MHDState(VectorField(grid, u_hat, True), VectorField(grid, b_hat, True), state.t + config.dt)


def _run_pair(initial: MHDState, config: SolverConfig, nonlinear, diffusivities, to_physical=None) -> Trajectory:
    grid = initial.grid
    if not (initial.u.divergence_free and initial.b.divergence_free):
        u, b = initial.u.certify(), initial.b.certify()
        if not (u.divergence_free and b.divergence_free):
            raise ValueError("initial data must be divergence-free")
    integ = _IFRK4(grid, diffusivities, config.dt, nonlinear)
    n_steps = config.n_steps
    ys = [initial.u.coeffs, initial.b.coeffs]
    mon = _Monitor(grid, config)
    to_physical = to_physical or (lambda a, b: (a, b))

    def snapshot(ys, t):
        a, b = to_physical(*ys)
        return MHDState(VectorField(grid, a, True), VectorField(grid, b, True), t)

    snaps = [snapshot(ys, initial.t)]
    t = initial.t
    for i in range(n_steps):
        mon.record(*to_physical(*ys), t)
        ys = integ.advance(ys, t)
        ys = list(_reproject(grid, *ys))
        t = initial.t + (i + 1) * config.dt
        if (i + 1) % config.snapshot_stride == 0 or i + 1 == n_steps:
            snaps.append(snapshot(ys, t))
    mon.record(*to_physical(*ys), t)
    return Trajectory(snaps, mon.arrays())


def solve(initial: MHDState, config: SolverConfig) -> Trajectory:
    """Integrate (u, b) from ``initial`` to t_end; μ = ν = 0 gives ideal MHD."""
    log.debug("solve: n=%d mu=%g nu=%g dt=%g steps=%d", initial.grid.n, config.mu, config.nu,
              config.dt, config.n_steps)
    return _run_pair(initial, config, _mhd_nonlinear(initial.grid), (config.mu, config.nu))


def solve_elsasser(initial: MHDState, config: SolverConfig) -> Trajectory:
    """Equal-coefficient MHD evolved in Elsässer form, snapshots reported as (u, b)."""
    if config.mu != config.nu:
        raise ValueError("Elsässer evolution requires mu == nu")
    zp, zm = elsasser(initial)
    start = MHDState(zp, zm, initial.t)
    return _run_pair(start, config, _elsasser_nonlinear(initial.grid), (config.mu, config.mu),
                     to_physical=lambda a, b: (0.5 * (a + b), 0.5 * (a - b)))


def elsasser(state: MHDState) -> tuple[VectorField, VectorField]:
    """(ū, b̄) = (u + b, u - b)."""
    df = state.u.divergence_free and state.b.divergence_free
    return (VectorField(state.grid, state.u.coeffs + state.b.coeffs, df),
            VectorField(state.grid, state.u.coeffs - state.b.coeffs, df))


def inverse_elsasser(zp: VectorField, zm: VectorField, t: float = 0.0) -> MHDState:
    df = zp.divergence_free and zm.divergence_free
    return MHDState(VectorField(zp.grid, 0.5 * (zp.coeffs + zm.coeffs), df),
                    VectorField(zp.grid, 0.5 * (zp.coeffs - zm.coeffs), df), t)


def default_dt(state: MHDState, t_end: float, cfl: float = 0.5, min_steps: int = 100) -> float:
    """cfl × dx / (‖u‖∞ + ‖b‖∞), shrunk so t_end is an integer number of at least ``min_steps`` steps."""
    grid = state.grid
    speed = _max_magnitude(state.u.values, 1) + _max_magnitude(state.b.values, 1)
    steps = min_steps
    if speed > 0:
        steps = max(steps, math.ceil(t_end * speed / (cfl * grid.dx)))
    return t_end / steps


# ---------------------------------------------------------------------------
# scalar transport-diffusion
# ---------------------------------------------------------------------------

Source = Union[None, SpectralField, VectorField, Callable[[float], object]]


def _at(source, t):
    return source(t) if callable(source) else source


def solve_transport_diffusion(v: Source, f0: SpectralField, g: Source, eps: float,
                              config: SolverConfig) -> Trajectory:
    """Integrate ∂_t f + v·∇f - εΔf = g; snapshots are (t, SpectralField) pairs.

    ``v`` and ``g`` are fields or callables of time.  Diagnostics carry the
    per-step ‖∇v‖∞ and CFL number.
    """
    if eps < 0:
        raise ValueError(f"diffusivity eps must be >= 0, got {eps}")
    grid = f0.grid
    mask = grid.dealias_mask

    def velocity(t):
        vt = _at(v, t)
        return None if vt is None else vt

    def nonlinear(ys, t):
        (f_hat,) = ys
        out = np.zeros(grid.shape, dtype=complex)
        vt = velocity(t)
        if vt is not None:
            grads = gradient_values(grid, f_hat)
            vv = vt.values
            adv = sum(vv[j] * grads[j] for j in range(grid.d))
            out = out - grid.forward(adv) * mask
        gt = _at(g, t)
        if gt is not None:
            out = out + gt.coeffs
        return [out]

    integ = _IFRK4(grid, (eps,), config.dt, nonlinear)
    n_steps = config.n_steps
    y = [f0.coeffs]
    t = 0.0
    snaps = [(t, f0)]
    rows = {"t": [], "grad_v": [], "cfl": []}

    def check(t):
        vt = velocity(t)
        if vt is None:
            gv, speed = 0.0, 0.0
        else:
            if not vt.divergence_free and not vt.certify().divergence_free:
                raise ValueError("transport velocity must be divergence-free")
            gv = _max_magnitude(gradient_values(grid, vt.coeffs), 2)
            speed = _max_magnitude(vt.values, 1)
        cfl = config.dt * speed / grid.dx
        rows["t"].append(t)
        rows["grad_v"].append(gv)
        rows["cfl"].append(cfl)
        if cfl > config.cfl_limit:
            raise CFLViolation(f"CFL number {cfl:.4g} exceeds limit {config.cfl_limit:g}", t)

    for i in range(n_steps):
        check(t)
        y = integ.advance(y, t)
        t = (i + 1) * config.dt
        if (i + 1) % config.snapshot_stride == 0 or i + 1 == n_steps:
            snaps.append((t, SpectralField(grid, y[0], real=f0.real)))
    check(t)
    return Trajectory(snaps, {k: np.asarray(val) for k, val in rows.items()})
