"""Run configuration as flat ``section.key = value`` text.

Blank lines and ``#`` comments are ignored.  Lists are comma separated; Besov
index lists separate triples with ``;`` (``norms.indices = 2.5,2,2; 2.1,4,2``).
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field

from .littlewood_paley import BesovIndex
from .solver import SolverConfig

__all__ = [
    "ConfigError",
    "GridSection",
    "SolverSection",
    "NormSection",
    "SweepSection",
    "DataSection",
    "OutputSection",
    "RunSection",
    "RunConfig",
    "parse_config",
    "load_config",
    "serialize_config",
    "SWEEP_KINDS",
    "OUTPUT_ENV",
]

OUTPUT_ENV = "MHDLIMIT_OUT"
DEFAULT_OUTPUT = "mhdlimit-out"
SWEEP_KINDS = ("viscosity", "data-perturbation", "mollification")
PERTURB_TARGETS = ("both", "u", "b")


class ConfigError(ValueError):
    """A configuration value is malformed or out of range; ``key`` names it."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class GridSection:
    d: int = 2
    n: int = 64


@dataclass(frozen=True)
class SolverSection:
    mu: float = 0.0
    nu: float = 0.0
    dt: float = 0.0             # 0 picks half the advective CFL step at t = 0
    t_end: float = 0.5
    snapshot_stride: int = 0    # 0 picks a stride giving at least 50 snapshots
    blowup_threshold: float = 100.0
    cfl_limit: float = 1.0


@dataclass(frozen=True)
class NormSection:
    s: float = 2.5
    indices: tuple = ()


@dataclass(frozen=True)
class SweepSection:
    kind: str = "viscosity"
    values: tuple = tuple(0.1 * 2.0**-k for k in range(1, 7))
    j: int = 2
    perturb: str = "both"
    perturbation_seed: int = 101
    perturbation_amplitude: float = 1.0


@dataclass(frozen=True)
class DataSection:
    seed: int = 1
    gamma: float = 6.5
    amplitude: float = 20.0
    band: tuple = (1.0, 8.0)


@dataclass(frozen=True)
class OutputSection:
    dir: str = ""


@dataclass(frozen=True)
class RunSection:
    jobs: int = 1


_SECTIONS = {
    "grid": GridSection,
    "solver": SolverSection,
    "norms": NormSection,
    "sweep": SweepSection,
    "data": DataSection,
    "output": OutputSection,
    "run": RunSection,
}

_FLOAT_LISTS = {"sweep.values", "data.band"}
_INDEX_LISTS = {"norms.indices"}


@dataclass(frozen=True)
class RunConfig:
    grid: GridSection = field(default_factory=GridSection)
    solver: SolverSection = field(default_factory=SolverSection)
    norms: NormSection = field(default_factory=NormSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    data: DataSection = field(default_factory=DataSection)
    output: OutputSection = field(default_factory=OutputSection)
    run: RunSection = field(default_factory=RunSection)

    def __post_init__(self):
        _validate(self)

    def with_values(self, pairs: dict[str, str]) -> RunConfig:
        """A copy with dotted-key overrides given as text."""
        sections = {name: dataclasses.asdict(getattr(self, name)) for name in _SECTIONS}
        for key, text in pairs.items():
            sec, name = _split_key(key)
            sections[sec][name] = _convert(key, text, getattr(_SECTIONS[sec](), name))
        return _build(sections)

    def output_dir(self) -> str:
        return self.output.dir or os.environ.get(OUTPUT_ENV, "") or DEFAULT_OUTPUT

    def solver_config(self, dt: float, stride: int) -> SolverConfig:
        s = self.solver
        return SolverConfig(mu=s.mu, nu=s.nu, dt=dt, t_end=s.t_end, snapshot_stride=stride,
                            blowup_threshold=s.blowup_threshold, cfl_limit=s.cfl_limit)


def _split_key(key: str) -> tuple[str, str]:
    parts = key.strip().split(".")
    if len(parts) != 2 or parts[0] not in _SECTIONS:
        raise ConfigError(key, "unknown key (expected section.name with section in "
                               + ", ".join(_SECTIONS) + ")")
    names = {f.name for f in dataclasses.fields(_SECTIONS[parts[0]])}
    if parts[1] not in names:
        raise ConfigError(key, f"unknown key; {parts[0]} accepts {', '.join(sorted(names))}")
    return parts[0], parts[1]


def _convert(key: str, text: str, default):
    text = text.strip()
    try:
        if key in _INDEX_LISTS:
            return tuple(BesovIndex.parse(t) for t in text.split(";") if t.strip())
        if key in _FLOAT_LISTS:
            return tuple(float(t) for t in text.split(",") if t.strip())
        if isinstance(default, bool):
            if text.lower() not in ("true", "false"):
                raise ValueError("expected true or false")
            return text.lower() == "true"
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {text!r}: {exc}") from None


def _build(sections: dict[str, dict]) -> RunConfig:
    return RunConfig(**{name: _SECTIONS[name](**vals) for name, vals in sections.items()})


def _require(ok: bool, key: str, message: str) -> None:
    if not ok:
        raise ConfigError(key, message)


def _finite(x: float) -> bool:
    return math.isfinite(x)


def _validate(cfg: RunConfig) -> None:
    g, s, nm, sw, dt, rn = cfg.grid, cfg.solver, cfg.norms, cfg.sweep, cfg.data, cfg.run
    _require(g.d in (2, 3), "grid.d", f"must be 2 or 3, got {g.d}")
    _require(g.n >= 8 and g.n & (g.n - 1) == 0, "grid.n", f"must be a power of two >= 8, got {g.n}")
    _require(_finite(s.mu) and s.mu >= 0, "solver.mu", f"must be >= 0, got {s.mu}")
    _require(_finite(s.nu) and s.nu >= 0, "solver.nu", f"must be >= 0, got {s.nu}")
    _require(_finite(s.dt) and s.dt >= 0, "solver.dt", f"must be >= 0 (0 = automatic), got {s.dt}")
    _require(_finite(s.t_end) and s.t_end > 0, "solver.t_end", f"must be > 0, got {s.t_end}")
    _require(s.snapshot_stride >= 0, "solver.snapshot_stride", "must be >= 0 (0 = automatic)")
    _require(s.blowup_threshold > 0, "solver.blowup_threshold", "must be > 0")
    _require(s.cfl_limit > 0, "solver.cfl_limit", "must be > 0")
    _require(math.isfinite(nm.s), "norms.s", "must be finite")
    _require(sw.kind in SWEEP_KINDS, "sweep.kind", f"must be one of {', '.join(SWEEP_KINDS)}, got {sw.kind!r}")
    _require(len(sw.values) > 0, "sweep.values", "must not be empty")
    _require(all(v >= 0 for v in sw.values), "sweep.values", "must be non-negative")
    _require(all(a >= b for a, b in zip(sw.values, sw.values[1:])), "sweep.values", "must be decreasing toward 0")
    _require(sw.j >= 0, "sweep.j", "must be >= 0")
    _require(sw.perturb in PERTURB_TARGETS, "sweep.perturb", f"must be one of {', '.join(PERTURB_TARGETS)}")
    _require(dt.gamma > 0, "data.gamma", f"must be > 0, got {dt.gamma}")
    _require(dt.amplitude >= 0, "data.amplitude", "must be >= 0")
    _require(len(dt.band) == 2 and 0 <= dt.band[0] <= dt.band[1], "data.band", "must be k_min,k_max with 0 <= k_min <= k_max")
    _require(dt.band[1] <= g.n / 3, "data.band", f"upper edge {dt.band[1]} exceeds the dealiasing cutoff n/3 = {g.n / 3:.4g}")
    _require(rn.jobs >= 1, "run.jobs", "must be >= 1")


def parse_config(text: str) -> RunConfig:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'section.key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        _split_key(key)
        if key in pairs:
            raise ConfigError(key, f"duplicate key on line {lineno}")
        pairs[key] = value
    return RunConfig().with_values(pairs)


def load_config(path: str | os.PathLike) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def _render(value) -> str:
    if isinstance(value, tuple):
        if value and isinstance(value[0], BesovIndex):
            return "; ".join(f"{i.s:.17g},{i.p:.17g},{i.r:.17g}" for i in value)
        return ",".join(f"{float(v):.17g}" for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def serialize_config(cfg: RunConfig) -> str:
    lines = []
    for name in _SECTIONS:
        sec = getattr(cfg, name)
        for f in dataclasses.fields(sec):
            lines.append(f"{name}.{f.name} = {_render(getattr(sec, f.name))}")
    return "\n".join(lines) + "\n"
