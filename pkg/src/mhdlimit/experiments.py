"""Inviscid-limit experiment harness.

Differences between trajectories are measured in Sobolev (``float`` index s,
weight (1+|k|²)^s) or Besov (:class:`BesovIndex`) norms.  The error of a pair
of states is ‖δu‖ + ‖δb‖ in the chosen norm.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .data import transport_pair
from .inequalities import ConstantReport
from .littlewood_paley import (
    BesovIndex,
    LPFilterBank,
    besov_norm,
    build_filter_bank,
    gradient_components,
    low_pass,
    sobolev_norm_direct,
    sup_norm,
)
from .solver import MHDState, SolverConfig, SolverError, Trajectory, solve, solve_transport_diffusion
from .spectral import SpectralField, VectorField, gradient, make_grid

__all__ = [
    "NormIndex",
    "norm_label",
    "field_norm",
    "DifferenceSeries",
    "SweepRecord",
    "SweepAborted",
    "SplitResult",
    "EnvelopeReport",
    "fit_slope",
    "difference_metrics",
    "inviscid_sweep",
    "data_perturbation_sweep",
    "mollification_split",
    "envelope_check",
    "transport_diffusion_uniformity",
    "transport_uniformity_suite",
    "UNIFORMITY_EPS",
]

log = logging.getLogger(__name__)

NormIndex = Union[float, BesovIndex]

TIME_TOLERANCE = 1e-9


def norm_label(idx: NormIndex) -> str:
    if isinstance(idx, BesovIndex):
        return f"B^{idx.s:g}_{idx.p:g},{idx.r:g}"
    return f"H^{float(idx):g}"


def field_norm(f, idx: NormIndex, bank: LPFilterBank | None = None) -> float:
    if isinstance(idx, BesovIndex):
        return besov_norm(f, idx, bank or build_filter_bank(f.grid))
    return sobolev_norm_direct(f, float(idx))


def _shift(idx: NormIndex, ds: float) -> NormIndex:
    return idx.shifted(ds) if isinstance(idx, BesovIndex) else float(idx) + ds


def _trapezoid_cumulative(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y, dtype=float)
    if len(t) > 1:
        out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(t))
    return out


# ---------------------------------------------------------------------------
# difference metrics
# ---------------------------------------------------------------------------

@dataclass
class DifferenceSeries:
    """Per-time norms of (δu, δb) and of the Elsässer differences (δū, δb̄)."""

    times: np.ndarray
    u: dict[str, np.ndarray]
    b: dict[str, np.ndarray]
    elsasser_plus: dict[str, np.ndarray]
    elsasser_minus: dict[str, np.ndarray]

    @property
    def labels(self) -> list[str]:
        return list(self.u)

    def total(self, label: str) -> np.ndarray:
        return self.u[label] + self.b[label]

    def elsasser_total(self, label: str) -> np.ndarray:
        return self.elsasser_plus[label] + self.elsasser_minus[label]

    def sup(self, label: str) -> float:
        return float(np.max(self.total(label)))


def _pair_at(traj: Trajectory, t: float) -> MHDState:
    times = traj.times
    i = int(np.argmin(np.abs(times - t)))
    if abs(times[i] - t) > TIME_TOLERANCE * max(1.0, abs(t)):
        raise ValueError(f"no snapshot within tolerance of t = {t:.17g} (nearest {times[i]:.17g})")
    return traj.snapshots[i]


def difference_metrics(traj1: Trajectory, traj2: Trajectory, indices: Sequence[NormIndex],
                       bank: LPFilterBank | None = None) -> DifferenceSeries:
    """Norms of traj1 - traj2 at the snapshot times of traj1."""
    times = traj1.times
    grid = traj1.snapshots[0].grid
    bank = bank or build_filter_bank(grid)
    labels = [norm_label(i) for i in indices]
    u = {lab: np.empty(len(times)) for lab in labels}
    b = {lab: np.empty(len(times)) for lab in labels}
    zp = {lab: np.empty(len(times)) for lab in labels}
    zm = {lab: np.empty(len(times)) for lab in labels}
    for n, t in enumerate(times):
        s1 = traj1.snapshots[n]
        s2 = _pair_at(traj2, t)
        du, db = s1.u - s2.u, s1.b - s2.b
        dzp, dzm = du + db, du - db
        for idx, lab in zip(indices, labels):
            u[lab][n] = field_norm(du, idx, bank)
            b[lab][n] = field_norm(db, idx, bank)
            zp[lab][n] = field_norm(dzp, idx, bank)
            zm[lab][n] = field_norm(dzm, idx, bank)
    return DifferenceSeries(times, u, b, zp, zm)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

class SweepAborted(SolverError):
    """A sweep member tripped the blowup guard or violated CFL."""


def fit_slope(params: Sequence[float], errors: Sequence[float], floor: float = 0.0):
    """Least-squares slope of log(error) vs log(param), skipping errors below ``floor``.

    Returns (slope, intercept, rms residual, number of points used); the slope
    is NaN when fewer than four points survive.
    """
    p = np.asarray(params, dtype=float)
    e = np.asarray(errors, dtype=float)
    keep = (p > 0) & (e > floor) & np.isfinite(e)
    if keep.sum() < 4:
        return math.nan, math.nan, math.nan, int(keep.sum())
    x, y = np.log(p[keep]), np.log(e[keep])
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.sqrt(np.mean((A @ np.array([slope, intercept]) - y) ** 2)))
    return float(slope), float(intercept), resid, int(keep.sum())


@dataclass
class SweepRecord:
    """Sup-in-time errors against a reference run, one per sweep value."""

    kind: str
    parameters: np.ndarray
    errors: np.ndarray
    lower_errors: np.ndarray
    slope: float
    lower_slope: float
    residual: float
    norm: str
    lower_norm: str
    extra: dict[str, np.ndarray] = field(default_factory=dict)
    extra_slopes: dict[str, float] = field(default_factory=dict)
    series: list[DifferenceSeries] = field(default_factory=list, repr=False)


def _solve_member(args):
    state, config = args
    return solve(state, config)


def _run_all(jobs, tasks):
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_solve_member, tasks))
    return [_solve_member(t) for t in tasks]


def _check_values(values, name):
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or len(vals) == 0:
        raise ValueError(f"{name} must be a non-empty list")
    if np.any(vals < 0):
        raise ValueError(f"{name} must be non-negative")
    if np.any(np.diff(vals) > 0):
        raise ValueError(f"{name} must be decreasing toward 0")
    return vals


def _index_pair(s: float, indices):
    primary = s if not indices else indices[0]
    return primary, _shift(primary, -1.0)


def _sweep_record(kind, params, reference, runs, s, indices, floor, bank) -> SweepRecord:
    primary, lower = _index_pair(s, indices)
    all_idx = [primary, lower] + [i for i in (indices or [])[1:]]
    labels = [norm_label(i) for i in all_idx]
    series = [difference_metrics(r, reference, all_idx, bank) for r in runs]
    errors = np.array([ds.sup(labels[0]) for ds in series])
    lower_errors = np.array([ds.sup(labels[1]) for ds in series])
    slope, _, resid, _ = fit_slope(params, errors, floor)
    lower_slope, *_ = fit_slope(params, lower_errors, floor)
    extra, extra_slopes = {}, {}
    for lab in labels[2:]:
        extra[lab] = np.array([ds.sup(lab) for ds in series])
        extra_slopes[lab] = fit_slope(params, extra[lab], floor)[0]
    return SweepRecord(kind, np.asarray(params, dtype=float), errors, lower_errors, slope, lower_slope,
                       resid, labels[0], labels[1], extra, extra_slopes, series)


def inviscid_sweep(u0: VectorField, b0: VectorField, mus: Sequence[float], nus: Sequence[float],
                   s: float, config: SolverConfig, indices: Sequence[NormIndex] | None = None,
                   floor: float = 1e-10, jobs: int = 1) -> SweepRecord:
    """Errors sup_t ‖(u^μ, b^μ) - (u⁰, b⁰)‖ against the ideal run, one per (μ, ν) pair.

    The first entry of ``indices`` (default H^s) is the primary norm; its s-1
    shift is recorded alongside.  Further indices are recorded in ``extra``.
    """
    mus = _check_values(mus, "mu list")
    nus = _check_values(nus, "nu list")
    if len(mus) != len(nus):
        raise ValueError("mu and nu lists must have equal length")
    start = MHDState(u0, b0, 0.0)
    tasks = [(start, config.replace(mu=0.0, nu=0.0))]
    tasks += [(start, config.replace(mu=float(m), nu=float(n))) for m, n in zip(mus, nus)]
    try:
        trajs = _run_all(jobs, tasks)
    except SolverError as exc:
        raise SweepAborted(f"viscosity sweep aborted: {exc.message}", exc.t) from exc
    bank = build_filter_bank(u0.grid)
    return _sweep_record("viscosity", mus, trajs[0], trajs[1:], s, indices, floor, bank)


def data_perturbation_sweep(u0: VectorField, b0: VectorField, w_u: VectorField, w_b: VectorField,
                            amplitudes: Sequence[float], s: float, config: SolverConfig,
                            indices: Sequence[NormIndex] | None = None, floor: float = 1e-10,
                            jobs: int = 1) -> SweepRecord:
    """Errors of runs from (u0 + αw_u, b0 + αw_b) against the run from (u0, b0), at fixed μ, ν."""
    amps = _check_values(amplitudes, "amplitude list")
    start = MHDState(u0, b0, 0.0)
    tasks = [(start, config)]
    tasks += [(MHDState(u0 + float(a) * w_u, b0 + float(a) * w_b, 0.0), config) for a in amps]
    try:
        trajs = _run_all(jobs, tasks)
    except SolverError as exc:
        raise SweepAborted(f"data-perturbation sweep aborted: {exc.message}", exc.t) from exc
    bank = build_filter_bank(u0.grid)
    return _sweep_record("data-perturbation", amps, trajs[0], trajs[1:], s, indices, floor, bank)


# ---------------------------------------------------------------------------
# mollification split
# ---------------------------------------------------------------------------

@dataclass
class SplitResult:
    """Three-way split of the viscous-vs-ideal error through S_j-mollified runs."""

    j: int
    mu: float
    nu: float
    viscous_tail: DifferenceSeries  # viscous full vs viscous mollified
    middle: DifferenceSeries        # viscous mollified vs ideal mollified
    ideal_tail: DifferenceSeries    # ideal mollified vs ideal full
    total: DifferenceSeries         # viscous full vs ideal full
    data_tail_u: float              # ‖(Id - S_j)u0‖_{H^s}
    data_tail_b: float
    label: str = ""

    def sups(self) -> dict[str, float]:
        lab = self.label
        return {
            "viscous_tail": self.viscous_tail.sup(lab),
            "middle": self.middle.sup(lab),
            "ideal_tail": self.ideal_tail.sup(lab),
            "total": self.total.sup(lab),
        }


def mollification_split(u0: VectorField, b0: VectorField, j: int, mu: float, nu: float, s: float,
                        config: SolverConfig, indices: Sequence[NormIndex] | None = None,
                        jobs: int = 1) -> SplitResult:
    grid = u0.grid
    bank = build_filter_bank(grid)
    if j > bank.j_max:
        raise ValueError(f"mollification index {j} exceeds j_max = {bank.j_max}")
    if j < 0:
        raise ValueError(f"mollification index must be >= 0, got {j}")
    u0j, b0j = low_pass(u0, j, bank), low_pass(b0, j, bank)
    full, moll = MHDState(u0, b0), MHDState(u0j, b0j)
    viscous = config.replace(mu=float(mu), nu=float(nu))
    ideal = config.replace(mu=0.0, nu=0.0)
    try:
        vf, vm, im, ifull = _run_all(jobs, [(full, viscous), (moll, viscous), (moll, ideal), (full, ideal)])
    except SolverError as exc:
        raise SweepAborted(f"mollification split aborted: {exc.message}", exc.t) from exc
    idx = list(indices) if indices else [s]
    label = norm_label(idx[0])
    return SplitResult(
        j=j, mu=float(mu), nu=float(nu),
        viscous_tail=difference_metrics(vf, vm, idx, bank),
        middle=difference_metrics(vm, im, idx, bank),
        ideal_tail=difference_metrics(im, ifull, idx, bank),
        total=difference_metrics(vf, ifull, idx, bank),
        data_tail_u=sobolev_norm_direct(u0 - u0j, s),
        data_tail_b=sobolev_norm_direct(b0 - b0j, s),
        label=label,
    )


# ---------------------------------------------------------------------------
# Grönwall envelopes
# ---------------------------------------------------------------------------

@dataclass
class EnvelopeReport:
    """Measured viscous-ideal gap against its Grönwall envelope.

    ``constant`` is max(1, ``raw_constant``), where ``raw_constant`` is the
    smallest prefactor for which C·gap·e^{B(t)} dominates the measured error at
    every recorded time.  The exponent B(t) integrates
    1 + ‖u‖_{H^s} + ‖v‖_{H^s} + ‖b‖_{H^s} + ‖c‖_{H^s} with unit constant.
    """

    times: np.ndarray
    measured: np.ndarray           # ‖ω‖²_{H^{s-1}} + ‖a‖²_{H^{s-1}}
    gap: np.ndarray                # initial gap + μ²∫‖u‖²_{H^{s+1}} + ν²∫‖b‖²_{H^{s+1}}
    exponent: np.ndarray           # B(t)
    envelope: np.ndarray
    raw_constant: float
    constant: float
    measured_top: np.ndarray       # ‖ω‖²_{H^s} + ‖a‖²_{H^s}
    gap_top: np.ndarray
    envelope_top: np.ndarray
    raw_constant_top: float
    constant_top: float
    integrands: dict[str, np.ndarray] = field(default_factory=dict)
    exponents: dict[str, np.ndarray] = field(default_factory=dict)


def _fit_constant(measured, gap, exponent) -> float:
    denom = gap * np.exp(exponent)
    ok = denom > 0
    if not np.any(measured > 0):
        return 0.0
    if not np.all(ok[measured > 0]):
        return math.inf
    return float(np.max(measured[ok] / denom[ok]))


def envelope_check(traj_viscous: Trajectory, traj_ideal: Trajectory, s: float, mu: float, nu: float,
                   besov: BesovIndex | None = None) -> EnvelopeReport:
    grid = traj_viscous.snapshots[0].grid
    bank = build_filter_bank(grid)
    times = traj_viscous.times
    ref = [_pair_at(traj_ideal, t) for t in times]
    vis = traj_viscous.snapshots
    if all(not np.any(st.u.coeffs) and not np.any(st.b.coeffs) for st in ref):
        raise ValueError("reference trajectory is identically zero")
    besov = besov or BesovIndex(s, 2.0, 2.0)

    def H(f, k):
        return sobolev_norm_direct(f, k)

    m_low = np.array([H(a.u - c.u, s - 1) ** 2 + H(a.b - c.b, s - 1) ** 2 for a, c in zip(vis, ref)])
    m_top = np.array([H(a.u - c.u, s) ** 2 + H(a.b - c.b, s) ** 2 for a, c in zip(vis, ref)])
    u_s1 = np.array([H(a.u, s + 1) ** 2 for a in vis])
    b_s1 = np.array([H(a.b, s + 1) ** 2 for a in vis])
    u_s2 = np.array([H(a.u, s + 2) ** 2 for a in vis])
    b_s2 = np.array([H(a.b, s + 2) ** 2 for a in vis])
    ref_s1 = np.array([H(c.u, s + 1) ** 2 + H(c.b, s + 1) ** 2 for c in ref])
    hs = np.array([H(a.u, s) + H(c.u, s) + H(a.b, s) + H(c.b, s) for a, c in zip(vis, ref)])
    bs = np.array([besov_norm(a.u, besov, bank) + besov_norm(c.u, besov, bank)
                   + besov_norm(a.b, besov, bank) + besov_norm(c.b, besov, bank) for a, c in zip(vis, ref)])

    b_integrand = 1.0 + hs
    exponent = _trapezoid_cumulative(times, b_integrand)
    gap = m_low[0] + mu**2 * _trapezoid_cumulative(times, u_s1) + nu**2 * _trapezoid_cumulative(times, b_s1)
    gap_top = (m_top[0] + mu**2 * _trapezoid_cumulative(times, u_s2) + nu**2 * _trapezoid_cumulative(times, b_s2)
               + _trapezoid_cumulative(times, ref_s1 * m_low))

    raw = _fit_constant(m_low, gap, exponent)
    raw_top = _fit_constant(m_top, gap_top, exponent)
    c, c_top = max(1.0, raw), max(1.0, raw_top)
    return EnvelopeReport(
        times=times, measured=m_low, gap=gap, exponent=exponent, envelope=c * gap * np.exp(exponent),
        raw_constant=raw, constant=c, measured_top=m_top, gap_top=gap_top,
        envelope_top=c_top * gap_top * np.exp(exponent), raw_constant_top=raw_top, constant_top=c_top,
        integrands={"A": b_integrand, "B": b_integrand, "Abar": bs, "Bbar": bs},
        exponents={"A": exponent, "B": exponent,
                   "Abar": _trapezoid_cumulative(times, bs), "Bbar": _trapezoid_cumulative(times, bs)},
    )


# ---------------------------------------------------------------------------
# transport-diffusion uniformity
# ---------------------------------------------------------------------------

@dataclass
class UniformityRun:
    eps: float
    times: np.ndarray
    lhs: np.ndarray        # sup_{τ<=t} ‖f(τ)‖_{B^s_{p,r}}
    base: np.ndarray       # ‖f0‖ + ∫‖g‖
    integral: np.ndarray   # ∫(‖∇v‖∞‖f‖ + ‖∇f‖∞‖v‖)


def _uniformity_run(v, f0, g, eps, idx, config, bank) -> UniformityRun:
    traj = solve_transport_diffusion(v, f0, g, eps, config)
    times = traj.times
    fnorm = np.array([besov_norm(f, idx, bank) for _, f in traj.snapshots])
    gnorm = np.zeros_like(fnorm)
    if g is not None:
        gnorm = np.array([besov_norm(g(t) if callable(g) else g, idx, bank) for t in times])
    vnorm = np.zeros_like(fnorm)
    gradv = np.zeros_like(fnorm)
    if v is not None:
        for i, t in enumerate(times):
            vt = v(t) if callable(v) else v
            vnorm[i] = besov_norm(vt, idx, bank)
            gradv[i] = sup_norm(gradient_components(vt))
    gradf = np.array([sup_norm(gradient(f)) for _, f in traj.snapshots])
    integrand = gradv * fnorm + gradf * vnorm
    return UniformityRun(
        eps=eps, times=times, lhs=np.maximum.accumulate(fnorm),
        base=fnorm[0] + _trapezoid_cumulative(times, gnorm),
        integral=_trapezoid_cumulative(times, integrand),
    )


def _minimal_constant(run: UniformityRun) -> float:
    """Smallest C >= 0 with lhs <= base + C·integral at every recorded time."""
    excess = run.lhs - run.base
    pos = run.integral > 0
    if not np.any(pos):
        return 0.0
    return max(0.0, float(np.max(excess[pos] / run.integral[pos])))


def transport_diffusion_uniformity(v, f0: SpectralField, g, eps_list: Sequence[float], idx: BesovIndex,
                                   config: SolverConfig) -> ConstantReport:
    """Per-ε ratio of sup_t ‖f‖_{B^s_{p,r}} to the transport-diffusion envelope.

    The commutator constant C is fitted once, at the largest ε, as the smallest
    value for which the envelope dominates there; every ε is then scored with
    that C.  Ratios that do not grow as ε → 0 are the uniformity claim.  The
    per-ε minimal constants are kept in ``report.fitted`` as a cross-check.
    """
    if idx.s <= -1:
        raise ValueError(f"regularity s must exceed -1, got {idx.s}")
    eps_values = [float(e) for e in eps_list]
    if not eps_values or min(eps_values) < 0:
        raise ValueError("eps list must be non-empty and non-negative")
    bank = build_filter_bank(f0.grid)
    runs = [_uniformity_run(v, f0, g, e, idx, config, bank) for e in eps_values]
    c_fit = _minimal_constant(runs[int(np.argmax(eps_values))])
    report = ConstantReport("transport-uniformity", idx)
    report.constant = c_fit
    report.parameters = eps_values
    report.fitted = [_minimal_constant(run) for run in runs]
    for i, run in enumerate(runs):
        rhs = run.base + c_fit * run.integral
        ok = rhs > 0
        ratio = float(np.max(run.lhs[ok] / rhs[ok])) if np.any(ok) else 0.0
        report.add(i, f0.grid.n, ratio)
    return report


UNIFORMITY_EPS = (0.1, 0.01, 0.001, 0.0)


def transport_uniformity_suite(pairs: int = 10, n: int = 64, eps_list: Sequence[float] = UNIFORMITY_EPS,
                               idx: BesovIndex = BesovIndex(1.5, 2, 2), t_end: float = 0.5, dt: float = 0.0025,
                               seed: int = 0, grad_v: float = 4.0) -> list[ConstantReport]:
    """Uniformity reports for ``pairs`` random stationary (v, f0) with g = 0."""
    grid = make_grid(2, n)
    config = SolverConfig(dt=dt, t_end=t_end, snapshot_stride=2)
    reports = []
    for i in range(pairs):
        v, f0 = transport_pair(grid, seed + i, grad_v)
        reports.append(transport_diffusion_uniformity(v, f0, None, eps_list, idx, config))
    return reports
