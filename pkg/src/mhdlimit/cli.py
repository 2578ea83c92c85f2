"""Command-line entry point: ``mhdlimit <subcommand> [options]``.

Exit status is 0 on success, 2 for usage or configuration errors (the message
names the offending field) and 1 for runtime failures such as a blowup trip,
which reports the trip time.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import csvio, plotting
from .config import ConfigError, RunConfig, load_config, serialize_config
from .data import generate_data, random_solenoidal
from .experiments import (
    UNIFORMITY_EPS,
    SplitResult,
    data_perturbation_sweep,
    envelope_check,
    fit_slope,
    inviscid_sweep,
    mollification_split,
    transport_uniformity_suite,
)
from .inequalities import run_suite
from .littlewood_paley import BesovIndex, besov_norm, block_norms, build_filter_bank, sobolev_norm_direct
from .snapshot import SnapshotError, read_snapshot, state_snapshot, write_snapshot
from .solver import MHDState, SolverConfig, SolverError, default_dt, solve
from .spectral import VectorField, make_grid

__all__ = ["main", "build_parser", "prepare_run", "MIN_QUADRATURE_NODES"]

log = logging.getLogger("mhdlimit")

MIN_QUADRATURE_NODES = 50


# ---------------------------------------------------------------------------
# shared setup
# ---------------------------------------------------------------------------

def prepare_run(cfg: RunConfig, state: MHDState | None = None) -> tuple[MHDState, SolverConfig]:
    """Initial state (generated from ``cfg.data`` unless given) and a solver config.

    dt = 0 picks half the advective CFL step of the initial state; stride = 0
    keeps at least 50 stored snapshots for quadrature.
    """
    if state is None:
        grid = make_grid(cfg.grid.d, cfg.grid.n)
        u0, b0 = generate_data(grid, cfg.data.seed, cfg.data.gamma, cfg.data.band, cfg.data.amplitude, cfg.norms.s)
        state = MHDState(u0, b0, 0.0)
    dt = cfg.solver.dt or default_dt(state, cfg.solver.t_end)
    steps = max(1, int(round(cfg.solver.t_end / dt)))
    stride = cfg.solver.snapshot_stride or max(1, steps // MIN_QUADRATURE_NODES)
    try:
        return state, cfg.solver_config(dt, stride)
    except ValueError as exc:
        raise ConfigError("solver", str(exc)) from None


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir())
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(out: Path, name: str, table) -> str:
    header, rows = table
    return csvio.write_csv(out / name, header, rows)


def _sweep_indices(cfg: RunConfig) -> list:
    for idx in cfg.norms.indices:
        if not idx.admissible(cfg.grid.d):
            raise ConfigError("norms.indices", f"index ({idx}) is not admissible for d = {cfg.grid.d}")
    return [cfg.norms.s] + list(cfg.norms.indices)


def _load_state(path: str | None) -> MHDState | None:
    if not path:
        return None
    return read_snapshot(path).to_state()


def _check_state_grid(cfg: RunConfig, state: MHDState | None) -> None:
    if state is not None and (state.grid.d, state.grid.n) != (cfg.grid.d, cfg.grid.n):
        raise ConfigError("grid", f"snapshot grid (d={state.grid.d}, n={state.grid.n}) differs from "
                                  f"configured (d={cfg.grid.d}, n={cfg.grid.n})")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(cfg: RunConfig, args) -> int:
    state = _load_state(args.input)
    _check_state_grid(cfg, state)
    state, scfg = prepare_run(cfg, state)
    out = _out_dir(cfg)
    traj = solve(state, scfg)
    _write(out, "diagnostics.csv", csvio.diagnostics_table(traj.diagnostics))
    plotting.plot_diagnostics(traj.diagnostics, out / "diagnostics.svg")
    if not args.no_snapshots:
        snap_dir = out / "snapshots"
        snap_dir.mkdir(exist_ok=True)
        for i, st in enumerate(traj.snapshots):
            write_snapshot(snap_dir / f"snap_{i:04d}.mhds", st)
    if args.envelope and (scfg.mu > 0 or scfg.nu > 0):
        ideal = solve(state, scfg.replace(mu=0.0, nu=0.0))
        rep = envelope_check(traj, ideal, cfg.norms.s, scfg.mu, scfg.nu)
        _write(out, "envelope.csv", csvio.envelope_table(rep))
        plotting.plot_envelope(rep, out / "envelope.svg")
        print(f"envelope constants: H^(s-1) C = {rep.constant:.6g} (raw {rep.raw_constant:.6g}), "
              f"H^s C = {rep.constant_top:.6g} (raw {rep.raw_constant_top:.6g})")
    print(f"simulate: {scfg.n_steps} steps of dt = {scfg.dt:.6g}, {len(traj)} snapshots -> {out}")
    return 0


def _perturbations(cfg: RunConfig, grid) -> tuple[VectorField, VectorField]:
    sw, dt = cfg.sweep, cfg.data
    w_u = random_solenoidal(grid, sw.perturbation_seed, 0, dt.gamma, dt.band, sw.perturbation_amplitude, cfg.norms.s)
    w_b = random_solenoidal(grid, sw.perturbation_seed, 1, dt.gamma, dt.band, sw.perturbation_amplitude, cfg.norms.s)
    if sw.perturb == "u":
        w_b = VectorField.zeros(grid)
    elif sw.perturb == "b":
        w_u = VectorField.zeros(grid)
    return w_u, w_b


def cmd_sweep(cfg: RunConfig, args) -> int:
    state = _load_state(args.input)
    _check_state_grid(cfg, state)
    state, scfg = prepare_run(cfg, state)
    out = _out_dir(cfg)
    sw, jobs, s = cfg.sweep, cfg.run.jobs, cfg.norms.s
    if sw.kind == "mollification":
        return _mollification_sweep(cfg, state, scfg, out)
    indices = _sweep_indices(cfg)
    if sw.kind == "viscosity":
        rec = inviscid_sweep(state.u, state.b, sw.values, sw.values, s, scfg, indices, jobs=jobs)
    else:
        w_u, w_b = _perturbations(cfg, state.grid)
        rec = data_perturbation_sweep(state.u, state.b, w_u, w_b, sw.values, s, scfg, indices, jobs=jobs)
    _write(out, "sweep.csv", csvio.sweep_table(rec))
    plotting.plot_sweep(rec, out / "sweep.svg")
    print(f"sweep ({rec.kind}): {len(rec.parameters)} runs, {rec.norm} slope {rec.slope:.4f}, "
          f"{rec.lower_norm} slope {rec.lower_slope:.4f} -> {out}")
    return 0


def _mollification_sweep(cfg: RunConfig, state: MHDState, scfg: SolverConfig, out: Path) -> int:
    splits: list[SplitResult] = []
    for mu in cfg.sweep.values:
        splits.append(mollification_split(state.u, state.b, cfg.sweep.j, mu, mu, cfg.norms.s, scfg,
                                          jobs=cfg.run.jobs))
    rows = []
    for sp in splits:
        sups = sp.sups()
        rows.append([sp.mu, sups["viscous_tail"], sups["middle"], sups["ideal_tail"], sups["total"]])
    slope = fit_slope([r[0] for r in rows], [r[2] for r in rows])[0]
    rows.append(["slope", "", slope, "", ""])
    csvio.write_csv(out / "sweep.csv", ["mu", "viscous_tail", "middle", "ideal_tail", "total"], rows)
    for i, sp in enumerate(splits):
        plotting.plot_split(sp, out / f"split_{i:02d}.svg")
    print(f"sweep (mollification, j = {cfg.sweep.j}): middle-term slope {slope:.4f} -> {out}")
    return 0


def cmd_split(cfg: RunConfig, args) -> int:
    state = _load_state(args.input)
    _check_state_grid(cfg, state)
    state, scfg = prepare_run(cfg, state)
    out = _out_dir(cfg)
    bank = build_filter_bank(state.grid)
    if cfg.sweep.j > bank.j_max:
        raise ConfigError("sweep.j", f"{cfg.sweep.j} exceeds j_max = {bank.j_max} for n = {cfg.grid.n}")
    sp = mollification_split(state.u, state.b, cfg.sweep.j, scfg.mu, scfg.nu, cfg.norms.s, scfg, jobs=cfg.run.jobs)
    _write(out, "split.csv", csvio.split_table(sp))
    _write(out, "split_summary.csv", csvio.split_summary_table(sp))
    plotting.plot_split(sp, out / "split.svg")
    sups = sp.sups()
    print("split: " + ", ".join(f"{k} {v:.6g}" for k, v in sups.items()) + f" -> {out}")
    return 0


def cmd_analyze(cfg: RunConfig, args) -> int:
    snap = read_snapshot(args.input)
    out = _out_dir(cfg)
    indices = list(cfg.norms.indices) or [BesovIndex(cfg.norms.s, 2, 2)]
    grid = make_grid(snap.d, snap.n)
    bank = build_filter_bank(grid)
    rows, blocks = [], {}
    for name, f in snap.named_fields():
        for idx in indices:
            rows.append([name, idx.s, idx.p, idx.r, besov_norm(f, idx, bank), sobolev_norm_direct(f, idx.s)])
        blocks[name] = block_norms(f, bank, indices[0].p)
    csvio.write_csv(out / "norms.csv", ["field", "s", "p", "r", "besov_norm", "sobolev_norm"], rows)
    plotting.plot_blocks(blocks, indices[0].p, out / "blocks.svg")
    print(f"analyze: {len(rows)} rows (t = {snap.time:.6g}) -> {out}")
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    out = _out_dir(cfg)
    if args.suite in ("all", "constants"):
        reports = run_suite(args.trials, args.n, args.seed)
        _write(out, "constants.csv", csvio.constants_table(reports))
        _write(out, "constants_summary.csv", csvio.constants_summary_table(reports))
        plotting.plot_constants(reports, out / "constants.svg")
        worst = max(r.stability() for r in reports)
        print(f"verify constants: {len(reports)} inequalities, worst n/2n stability {worst:.4f}")
    if args.suite in ("all", "transport"):
        reps = transport_uniformity_suite(args.pairs, n=max(args.n, 32), seed=args.seed)
        rows = []
        for pair, rep in enumerate(reps):
            for (k, _, ratio), eps, fitted in zip(rep.rows, rep.parameters, rep.fitted):
                rows.append([pair, eps, ratio, rep.constant, fitted])
        csvio.write_csv(out / "transport.csv", ["pair", "eps", "ratio", "constant", "minimal_constant"], rows)
        plotting.plot_uniformity(reps, out / "transport.svg")
        spread = max(r.max_ratio() / min(r.ratios()) for r in reps)
        print(f"verify transport: {len(reps)} pairs, eps {list(UNIFORMITY_EPS)}, worst ratio spread {spread:.4f}")
    print(f"verify -> {out}")
    return 0


def cmd_gen_data(cfg: RunConfig, args) -> int:
    state, _ = prepare_run(cfg)
    target = Path(args.file) if args.file else _out_dir(cfg) / "data.mhds"
    target.parent.mkdir(parents=True, exist_ok=True)
    write_snapshot(target, state_snapshot(state))
    print(f"gen-data: seed {cfg.data.seed}, gamma {cfg.data.gamma:g}, amplitude {cfg.data.amplitude:g} -> {target}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat 'section.key = value' config file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--out", help="output directory (default: $MHDLIMIT_OUT or ./mhdlimit-out)")
    p.add_argument("--jobs", type=int, help="concurrent solver runs")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mhdlimit", description="Pseudo-spectral inviscid-limit lab for MHD.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="one solve: snapshots and diagnostics CSV")
    _common(p)
    p.add_argument("--in", dest="input", help="initial-data snapshot (default: generate from config)")
    p.add_argument("--no-snapshots", action="store_true")
    p.add_argument("--envelope", action="store_true", help="also run the ideal reference and fit the envelope")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="viscosity, data-perturbation or mollification sweep")
    _common(p)
    p.add_argument("--in", dest="input")
    p.add_argument("--kind", help="viscosity | data-perturbation | mollification")
    p.add_argument("--values", help="comma-separated decreasing sweep values")
    p.add_argument("--norms", help="extra Besov indices 's,p,r;s,p,r'")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("split", help="mollification split at sweep.j")
    _common(p)
    p.add_argument("--in", dest="input")
    p.add_argument("--j", type=int)
    p.add_argument("--mu", type=float)
    p.add_argument("--nu", type=float)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("analyze", help="Besov and Sobolev norms of a snapshot file")
    _common(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--norms", help="Besov indices 's,p,r;s,p,r'")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="empirical inequality constants and ε-uniformity")
    _common(p)
    p.add_argument("--suite", choices=("all", "constants", "transport"), default="all")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen-data", help="write an initial-data snapshot")
    _common(p)
    p.add_argument("--file", help="snapshot path (default: <out>/data.mhds)")
    p.set_defaults(func=cmd_gen_data)
    return parser


def _overrides(args) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(item, "expected KEY=VALUE")
        k, v = item.split("=", 1)
        pairs[k.strip()] = v.strip()
    flag_keys = {"out": "output.dir", "jobs": "run.jobs", "kind": "sweep.kind", "values": "sweep.values",
                 "norms": "norms.indices", "j": "sweep.j", "mu": "solver.mu", "nu": "solver.nu"}
    for attr, key in flag_keys.items():
        val = getattr(args, attr, None)
        if val is not None:
            pairs[key] = str(val)
    return pairs


def resolve_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return cfg.with_values(_overrides(args))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        out = Path(cfg.output_dir())
        code = args.func(cfg, args)
        if code == 0 and args.command != "analyze" and out.is_dir():
            (out / "config.txt").write_text(serialize_config(cfg))
        return code
    except ConfigError as exc:
        print(f"mhdlimit: config error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"mhdlimit: run failed: {exc}", file=sys.stderr)
        return 1
    except (SnapshotError, OSError, ValueError) as exc:
        print(f"mhdlimit: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
