"""Static SVG line charts for trajectories, sweeps, splits and envelopes.

Figures are built on the object API (no pyplot state) and written with a fixed
hash salt and no date stamp, so identical data gives byte-identical files.
"""

from __future__ import annotations

import os

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

__all__ = [
    "save_svg",
    "plot_diagnostics",
    "plot_sweep",
    "plot_split",
    "plot_envelope",
    "plot_uniformity",
    "plot_constants",
    "plot_blocks",
]

_STYLE = {
    "svg.hashsalt": "mhdlimit",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}


def _figure(nrows: int = 1, ncols: int = 1, size=(6.0, 4.0)):
    fig = Figure(figsize=size)
    FigureCanvasSVG(fig)
    axes = fig.subplots(nrows, ncols, squeeze=False)
    return fig, axes


def save_svg(fig: Figure, path: str | os.PathLike) -> str:
    with matplotlib.rc_context(_STYLE):
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": "mhdlimit"})
    return str(path)


def _positive(y):
    y = np.asarray(y, dtype=float)
    return np.where(y > 0, y, np.nan)


def plot_diagnostics(diagnostics: dict[str, np.ndarray], path) -> str:
    with matplotlib.rc_context(_STYLE):
        fig, ax = _figure(2, 2, (8.0, 5.5))
        t = diagnostics["t"]
        panels = [("energy", "energy"), ("cross_helicity", "cross-helicity"),
                  ("max_gradient", "‖∇u‖∞ + ‖∇b‖∞"), ("divergence", "relative divergence")]
        for a, (key, label) in zip(ax.flat, panels):
            if key not in diagnostics:
                a.set_visible(False)
                continue
            a.plot(t, diagnostics[key])
            a.set_xlabel("t")
            a.set_ylabel(label)
        ax[1, 1].set_yscale("symlog", linthresh=1e-16)
        fig.tight_layout()
        return save_svg(fig, path)


def plot_sweep(record, path) -> str:
    """Log-log sup-in-time errors against the sweep parameter with the fitted rate."""
    with matplotlib.rc_context(_STYLE):
        fig, ax = _figure()
        a = ax[0, 0]
        p = np.asarray(record.parameters, dtype=float)
        a.loglog(p, _positive(record.errors), "o-", label=f"{record.norm}  slope {record.slope:.3f}")
        a.loglog(p, _positive(record.lower_errors), "s--",
                 label=f"{record.lower_norm}  slope {record.lower_slope:.3f}")
        for lab, vals in record.extra.items():
            a.loglog(p, _positive(vals), "^:", label=f"{lab}  slope {record.extra_slopes[lab]:.3f}")
        good = (p > 0) & (np.asarray(record.errors) > 0)
        if good.sum() >= 2:
            ref = record.errors[good][0] * (p[good] / p[good][0])
            a.loglog(p[good], ref, "k:", lw=0.8, label="slope 1")
        a.set_xlabel("viscosity μ = ν" if record.kind == "viscosity" else "perturbation amplitude")
        a.set_ylabel("sup-in-time error")
        a.legend(loc="best", fontsize=7)
        fig.tight_layout()
        return save_svg(fig, path)


def plot_split(split, path) -> str:
    with matplotlib.rc_context(_STYLE):
        fig, ax = _figure()
        a = ax[0, 0]
        lab = split.label
        for name, series in (("viscous full vs mollified", split.viscous_tail),
                             ("viscous vs ideal (mollified)", split.middle),
                             ("ideal mollified vs full", split.ideal_tail),
                             ("total", split.total)):
            a.semilogy(series.times, _positive(series.total(lab)), label=name)
        a.set_xlabel("t")
        a.set_ylabel(f"{lab} difference")
        a.set_title(f"j = {split.j}, μ = {split.mu:g}, ν = {split.nu:g}")
        a.legend(loc="best", fontsize=7)
        fig.tight_layout()
        return save_svg(fig, path)


def plot_envelope(report, path) -> str:
    with matplotlib.rc_context(_STYLE):
        fig, ax = _figure(1, 2, (9.0, 3.8))
        a, b = ax[0]
        a.semilogy(report.times, _positive(report.measured), label="measured")
        a.semilogy(report.times, _positive(report.envelope), label=f"envelope, C = {report.constant:.3g}")
        a.set_title("H^{s-1}")
        b.semilogy(report.times, _positive(report.measured_top), label="measured")
        b.semilogy(report.times, _positive(report.envelope_top), label=f"envelope, C = {report.constant_top:.3g}")
        b.set_title("H^s")
        for x in (a, b):
            x.set_xlabel("t")
            x.legend(loc="best", fontsize=7)
        fig.tight_layout()
        return save_svg(fig, path)


def plot_uniformity(reports, path) -> str:
    """Per-ε ratios, one line per (v, f0) pair, ε on a symlog axis so ε = 0 shows."""
    with matplotlib.rc_context(_STYLE):
        fig, ax = _figure()
        a = ax[0, 0]
        for i, rep in enumerate(reports):
            eps = np.asarray(rep.parameters, dtype=float)
            a.plot(eps, rep.ratios(), "o-", lw=0.9, label=f"pair {i}" if len(reports) <= 10 else None)
        a.set_xscale("symlog", linthresh=1e-3)
        a.invert_xaxis()
        a.set_xlabel("ε")
        a.set_ylabel("LHS / RHS")
        if len(reports) <= 10:
            a.legend(loc="best", fontsize=6, ncol=2)
        fig.tight_layout()
        return save_svg(fig, path)


def plot_constants(reports, path) -> str:
    """Max ratio per inequality at each resolution."""
    with matplotlib.rc_context(_STYLE):
        fig, ax = _figure(size=(8.0, 4.0))
        a = ax[0, 0]
        labels = [f"{r.inequality_id}\n({r.idx})" for r in reports]
        xs = np.arange(len(reports))
        res = sorted({n for r in reports for n in r.resolutions})
        width = 0.8 / max(1, len(res))
        for i, n in enumerate(res):
            a.bar(xs + i * width, [r.max_ratio(n) for r in reports], width, label=f"n = {n}")
        a.set_xticks(xs + 0.4 - width / 2, labels, rotation=60, ha="right", fontsize=6)
        a.set_ylabel("max LHS / RHS")
        a.legend(loc="best", fontsize=7)
        fig.tight_layout()
        return save_svg(fig, path)


def plot_blocks(named_norms: dict[str, tuple[np.ndarray, np.ndarray]], p: float, path) -> str:
    """‖Δ_j f‖_{L^p} against j for each named field."""
    with matplotlib.rc_context(_STYLE):
        fig, ax = _figure()
        a = ax[0, 0]
        for name, (js, norms) in named_norms.items():
            a.semilogy(js, _positive(norms), "o-", label=name)
        a.set_xlabel("block index j")
        a.set_ylabel(f"‖Δ_j f‖_L{p:g}")
        a.legend(loc="best", fontsize=7)
        fig.tight_layout()
        return save_svg(fig, path)
