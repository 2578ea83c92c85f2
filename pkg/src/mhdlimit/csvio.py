"""CSV emission with lossless float formatting."""

from __future__ import annotations

import csv
import math
import os
from numbers import Integral, Real
from typing import Iterable, Sequence

__all__ = ["format_value", "format_row", "write_csv", "read_csv"]


def format_value(x) -> str:
    """17 significant digits for floats so every float64 round-trips exactly."""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, Integral):
        return str(int(x))
    if isinstance(x, Real):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.17g}"
    return str(x)


def format_row(row: Iterable) -> list[str]:
    return [format_value(x) for x in row]


def write_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(header))
        for row in rows:
            w.writerow(format_row(row))
    return str(path)


def read_csv(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty CSV (missing header row)")
    return rows[0], rows[1:]


# ---------------------------------------------------------------------------
# tables for result objects
# ---------------------------------------------------------------------------

DIAGNOSTIC_COLUMNS = ("t", "energy", "cross_helicity", "max_gradient", "dissipation", "divergence", "cfl")


def diagnostics_table(diagnostics: dict) -> tuple[list[str], list[list]]:
    cols = [c for c in DIAGNOSTIC_COLUMNS if c in diagnostics]
    return cols, [list(r) for r in zip(*(diagnostics[c] for c in cols))]


def sweep_table(record) -> tuple[list[str], list[list]]:
    """One row per sweep value, then a footer row holding the fitted slopes."""
    extra = list(record.extra)
    header = ["parameter", f"error_{record.norm}", f"error_{record.lower_norm}"] + [f"error_{e}" for e in extra]
    rows = [[p, e, lo] + [record.extra[x][i] for x in extra]
            for i, (p, e, lo) in enumerate(zip(record.parameters, record.errors, record.lower_errors))]
    rows.append(["slope", record.slope, record.lower_slope] + [record.extra_slopes[x] for x in extra])
    return header, rows


def split_table(split) -> tuple[list[str], list[list]]:
    lab = split.label
    parts = (split.viscous_tail, split.middle, split.ideal_tail, split.total)
    header = ["t", "viscous_tail", "middle", "ideal_tail", "total"]
    rows = [[t] + [p.total(lab)[i] for p in parts] for i, t in enumerate(split.total.times)]
    return header, rows


def split_summary_table(split) -> tuple[list[str], list[list]]:
    rows = [["j", split.j], ["mu", split.mu], ["nu", split.nu]]
    rows += [[f"sup_{k}", v] for k, v in split.sups().items()]
    rows += [["data_tail_u", split.data_tail_u], ["data_tail_b", split.data_tail_b]]
    return ["quantity", "value"], rows


def envelope_table(report) -> tuple[list[str], list[list]]:
    header = ["t", "measured", "gap", "exponent", "envelope", "measured_top", "gap_top", "envelope_top"]
    cols = [report.times, report.measured, report.gap, report.exponent, report.envelope,
            report.measured_top, report.gap_top, report.envelope_top]
    return header, [list(r) for r in zip(*cols)]


def constants_table(reports) -> tuple[list[str], list[list]]:
    rows = []
    for rep in reports:
        rows.extend(rep.csv_rows())
    return ["inequality_id", "trial", "n", "ratio"], rows


def constants_summary_table(reports) -> tuple[list[str], list[list]]:
    header = ["inequality_id", "s", "p", "r", "n", "max_ratio", "stability", "skipped"]
    rows = []
    for rep in reports:
        idx = rep.idx
        for n in rep.resolutions:
            rows.append([rep.inequality_id, idx.s, idx.p, idx.r, n, rep.max_ratio(n), rep.stability(),
                         len(rep.skipped)])
    return header, rows
